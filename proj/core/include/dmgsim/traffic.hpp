#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "dmgsim/phy.hpp"
#include "dmgsim/rng.hpp"
#include "dmgsim/sim_time.hpp"
#include "dmgsim/tx_queue.hpp"

namespace dmgsim {

inline constexpr std::uint32_t kDefaultPacketSize = 1448;
inline constexpr SimTime kMinPeriod = SimTime::us(1);

/// Periodic burst source parameters. Every burst holds burst_packets packets
/// generated at the same instant.
struct TrafficProfile {
    SimTime mean_period = kDefaultPeriod;
    double deviation_ratio = 0.0; ///< rho: sigma = rho * mean_period
    std::uint32_t packet_size = kDefaultPacketSize;
    std::uint64_t burst_packets = 1;
    bool smart_start = false;

    double app_rate_bps() const;
};

/// ceil((eta * phy_rate / n_stas) * T / (8 * packet_size)); at least 1 for eta > 0.
/// Throws std::invalid_argument unless 0 < eta <= 1 and n_stas >= 1.
std::uint64_t burst_packets_for(double eta, std::uint32_t n_stas, const McsEntry& mcs,
                                SimTime period, std::uint32_t packet_size);

/// ceil(rate * T / (8 * packet_size)) in exact integer arithmetic.
std::uint64_t burst_packets_for_rate(std::uint64_t rate_bps, SimTime period,
                                     std::uint32_t packet_size);

/// Maps one Gaussian period draw (in ns) to a SimTime, clamped below at 1 us.
SimTime clamp_period(double draw_ns);

/// Next inter-burst period ~ N(T, (rho*T)^2), clamped at 1 us. One Gaussian
/// draw is consumed even when rho == 0, which returns exactly T.
SimTime next_period(const TrafficProfile& profile, RngStream& stream);

/// Smart start with an allocation: the first SP block's absolute start.
/// Otherwise uniform over [earliest, earliest + T). One uniform draw is
/// consumed in every case.
SimTime app_start_time(const TrafficProfile& profile, std::optional<SimTime> first_sp_block_start,
                       RngStream& stream, SimTime earliest = SimTime::zero());

struct FlowState {
    std::uint32_t flow = 0;
    SimTime t0;
    SimTime next_burst_at;
    std::uint64_t bursts_emitted = 0;
    std::uint32_t next_seq = 0;
};

/// Generator for one STA: emits a burst into a TxQueue and advances its
/// own clock by a freshly drawn period.
class PeriodicBurstSource {
public:
    PeriodicBurstSource(std::uint32_t flow, TrafficProfile profile, SimTime t0, RngStream period_stream);

    struct EmitResult {
        std::uint64_t accepted = 0;
        std::uint64_t dropped = 0;
    };

    /// Requires now == next_burst_at (std::logic_error otherwise). Every
    /// generated packet is reported to on_packet in FIFO order, with whether
    /// the queue took it.
    EmitResult emit(SimTime now, TxQueue& queue,
                    const std::function<void(const Packet&, bool accepted)>& on_packet);

    const FlowState& state() const { return state_; }
    const TrafficProfile& profile() const { return profile_; }

private:
    TrafficProfile profile_;
    FlowState state_;
    RngStream period_stream_;
};

} // namespace dmgsim
