#include "dmgsim/traffic.hpp"

#include <cmath>
#include <stdexcept>

namespace dmgsim {

namespace {
__extension__ using u128 = unsigned __int128;
}

double TrafficProfile::app_rate_bps() const
{
    return static_cast<double>(burst_packets) * packet_size * 8.0 / mean_period.seconds();
}

std::uint64_t burst_packets_for(double eta, std::uint32_t n_stas, const McsEntry& mcs,
                                SimTime period, std::uint32_t packet_size)
{
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw std::invalid_argument("eta must lie in (0,1]");
    }
    if (n_stas == 0) {
        throw std::invalid_argument("n_stas must be >= 1");
    }
    if (packet_size == 0) {
        throw std::invalid_argument("packet_size must be positive");
    }
    const long double per_sta_bps =
        static_cast<long double>(eta) * static_cast<long double>(mcs.phy_rate_bps) / n_stas;
    const long double packets = per_sta_bps * static_cast<long double>(period.count()) /
                                (1e9L * 8.0L * packet_size);
    // Relative slack absorbs binary rounding of eta for exact multiples.
    const auto n = static_cast<std::uint64_t>(std::ceil(packets * (1.0L - 1e-12L)));
    return n == 0 ? 1 : n;
}

std::uint64_t burst_packets_for_rate(std::uint64_t rate_bps, SimTime period, std::uint32_t packet_size)
{
    if (rate_bps == 0 || packet_size == 0) {
        throw std::invalid_argument("rate and packet size must be positive");
    }
    const u128 bits = static_cast<u128>(rate_bps) *
                                   static_cast<std::uint64_t>(period.count());
    const u128 denom = static_cast<u128>(1'000'000'000ULL) * 8U * packet_size;
    return static_cast<std::uint64_t>((bits + denom - 1) / denom);
}

SimTime clamp_period(double draw_ns)
{
    if (!(draw_ns >= static_cast<double>(kMinPeriod.count()))) {
        return kMinPeriod;
    }
    return SimTime::ns(static_cast<SimTime::rep>(std::llround(draw_ns)));
}

SimTime next_period(const TrafficProfile& profile, RngStream& stream)
{
    const double mean = static_cast<double>(profile.mean_period.count());
    const double draw = stream.gaussian(mean, profile.deviation_ratio * mean);
    if (profile.deviation_ratio == 0.0) {
        return profile.mean_period;
    }
    return clamp_period(draw);
}

SimTime app_start_time(const TrafficProfile& profile, std::optional<SimTime> first_sp_block_start,
                       RngStream& stream, SimTime earliest)
{
    const double u = stream.uniform(0.0, static_cast<double>(profile.mean_period.count()));
    if (profile.smart_start && first_sp_block_start) {
        return *first_sp_block_start;
    }
    auto offset = static_cast<SimTime::rep>(std::floor(u));
    if (offset >= profile.mean_period.count()) {
        offset = profile.mean_period.count() - 1;
    }
    return earliest + SimTime::ns(offset);
}

PeriodicBurstSource::PeriodicBurstSource(std::uint32_t flow, TrafficProfile profile, SimTime t0,
                                         RngStream period_stream)
    : profile_(profile), period_stream_(std::move(period_stream))
{
    state_.flow = flow;
    state_.t0 = t0;
    state_.next_burst_at = t0;
}

PeriodicBurstSource::EmitResult PeriodicBurstSource::emit(SimTime now, TxQueue& queue,
                                                          const std::function<void(const Packet&, bool accepted)>& on_packet)
{
    if (now != state_.next_burst_at) {
        throw std::logic_error("burst emitted at " + now.to_string() + " but due at " +
                               state_.next_burst_at.to_string());
    }
    EmitResult r;
    for (std::uint64_t i = 0; i < profile_.burst_packets; ++i) {
        const Packet p{state_.flow, state_.next_seq++, profile_.packet_size, now};
        const bool ok = queue.enqueue(p);
        ++(ok ? r.accepted : r.dropped);
        if (on_packet) {
            on_packet(p, ok);
        }
    }
    ++state_.bursts_emitted;
    state_.next_burst_at = now + next_period(profile_, period_stream_);
    return r;
}

} // namespace dmgsim
