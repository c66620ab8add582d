#include "dmgsim/phy.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace dmgsim {

namespace {
__extension__ using u128 = unsigned __int128;
}

McsEntry dmg_sc_mcs(int index)
{
    // DMG SC PHY nominal rates in Mb/s x 100 for MCS 1..12.
    static constexpr std::array<std::uint64_t, 12> rates_cmbps = {
        38500, 77000, 96250, 115500, 125125, 154000, 192500, 231000, 250250, 308000, 385000, 462000};
    if (index < 1 || index > 12) {
        throw std::out_of_range("DMG SC MCS index must be in 1..12, got " + std::to_string(index));
    }
    return {index, rates_cmbps[static_cast<std::size_t>(index - 1)] * 10'000};
}

namespace {

bool is_pow2_minus_one(std::uint32_t v)
{
    const std::uint64_t x = std::uint64_t{v} + 1;
    return (x & (x - 1)) == 0;
}

} // namespace

void MacTimingParams::validate(std::uint32_t packet_size) const
{
    if (!is_pow2_minus_one(cw_min) || !is_pow2_minus_one(cw_max)) {
        throw std::invalid_argument("cw_min and cw_max must be of the form 2^k - 1");
    }
    if (cw_min > cw_max) {
        throw std::invalid_argument("cw_min must not exceed cw_max");
    }
    if (slot == SimTime::zero()) {
        throw std::invalid_argument("slot time must be positive");
    }
    if (aifs < slot) {
        throw std::invalid_argument("aifs must be at least one slot");
    }
    const std::uint64_t msdu = std::uint64_t{packet_size} + per_msdu_overhead;
    if (max_amsdu < msdu) {
        throw std::invalid_argument("max_amsdu smaller than one MSDU");
    }
    if (max_ampdu < msdu + per_mpdu_overhead) {
        throw std::invalid_argument("max_ampdu smaller than one MPDU");
    }
}

SimTime payload_airtime(std::uint64_t bytes, const McsEntry& mcs)
{
    const u128 num = static_cast<u128>(bytes) * 8U * 1'000'000'000U;
    const u128 ns = (num + mcs.phy_rate_bps - 1) / mcs.phy_rate_bps;
    return SimTime::ns(static_cast<SimTime::rep>(ns));
}

SimTime frame_tx_duration(std::uint64_t payload_bytes, const McsEntry& mcs,
                          const MacTimingParams& timing)
{
    return timing.preamble_header + payload_airtime(payload_bytes, mcs);
}

Batch assemble_ampdu(const TxQueue& queue, const MacTimingParams& timing, SimTime budget,
                     const McsEntry& mcs)
{
    Batch batch;
    const SimTime overhead = timing.preamble_header + timing.sifs + timing.block_ack_duration;
    if (budget <= overhead) {
        return batch;
    }
    const SimTime payload_budget = budget - overhead;

    std::uint64_t psdu = 0;
    std::uint64_t amsdu = 0; // bytes in the A-MSDU being filled
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const std::uint64_t msdu = std::uint64_t{queue[i].size} + timing.per_msdu_overhead;
        const bool new_mpdu = batch.mpdus.empty() || amsdu + msdu > timing.max_amsdu;
        const std::uint64_t next = psdu + msdu + (new_mpdu ? timing.per_mpdu_overhead : 0);
        if (next > timing.max_ampdu || payload_airtime(next, mcs) > payload_budget) {
            break;
        }
        if (new_mpdu) {
            batch.mpdus.push_back({});
            amsdu = 0;
        }
        amsdu += msdu;
        psdu = next;
        batch.mpdus.back().end_packet = i + 1;
        batch.mpdus.back().psdu_bytes_through = psdu;
        batch.payload_bytes += queue[i].size;
        ++batch.packets;
    }
    if (batch.packets > 0) {
        batch.psdu_bytes = psdu;
        batch.airtime = frame_tx_duration(psdu, mcs, timing);
        batch.exchange = batch.airtime + timing.sifs + timing.block_ack_duration;
    }
    return batch;
}

SimTime mpdu_end_time(SimTime start, const Batch::Mpdu& m, const McsEntry& mcs,
                      const MacTimingParams& timing)
{
    return start + timing.preamble_header + payload_airtime(m.psdu_bytes_through, mcs);
}

SimTime sp_duration_for(std::uint64_t burst_packets, std::uint32_t packet_size,
                        const McsEntry& mcs, const MacTimingParams& timing)
{
    TxQueue q;
    for (std::uint64_t i = 0; i < burst_packets; ++i) {
        q.enqueue({0, static_cast<std::uint32_t>(i), packet_size, SimTime::zero()});
    }
    SimTime total;
    while (!q.empty()) {
        const auto b = assemble_ampdu(q, timing, SimTime::max(), mcs);
        if (b.empty()) {
            throw std::logic_error("sp_duration_for: packet does not fit an A-MPDU");
        }
        total += b.exchange;
        q.pop_front(b.packets);
    }
    return total;
}

} // namespace dmgsim
