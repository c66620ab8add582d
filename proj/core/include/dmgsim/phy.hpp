#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dmgsim/sim_time.hpp"
#include "dmgsim/tx_queue.hpp"

namespace dmgsim {

struct McsEntry {
    int index = 4;
    std::uint64_t phy_rate_bps = 1'155'000'000;
};

/// DMG single-carrier MCS 1..12. Throws std::out_of_range otherwise.
McsEntry dmg_sc_mcs(int index);

/// MAC/PHY timing and framing constants (802.11ad DMG defaults).
struct MacTimingParams {
    SimTime slot = SimTime::us(5);
    SimTime sifs = SimTime::us(3);
    SimTime aifs = SimTime::us(13);
    SimTime preamble_header = SimTime::us(2);
    SimTime block_ack_duration = SimTime::us(2);
    std::uint32_t per_mpdu_overhead = 32;  ///< MAC header + FCS + delimiter
    std::uint32_t per_msdu_overhead = 36;  ///< LLC/SNAP + IPv4 + UDP
    std::uint32_t max_amsdu = 7935;
    std::uint32_t max_ampdu = 262143;
    std::uint32_t cw_min = 15;
    std::uint32_t cw_max = 1023;
    std::uint32_t retry_limit = 7;

    /// Checks the contention-window form (2^k - 1), ordering and that one
    /// packet of `packet_size` fits the aggregation limits.
    void validate(std::uint32_t packet_size) const;
};

/// Payload airtime ceil(8 * bytes / rate) in ns, without preamble.
SimTime payload_airtime(std::uint64_t bytes, const McsEntry& mcs);

/// preamble_header + payload airtime.
SimTime frame_tx_duration(std::uint64_t payload_bytes, const McsEntry& mcs,
                          const MacTimingParams& timing);

/// One A-MPDU: the first `packets` packets of the queue.
struct Batch {
    struct Mpdu {
        std::size_t end_packet = 0;        ///< exclusive index into the batch
        std::uint64_t psdu_bytes_through = 0; ///< PSDU bytes up to this MPDU's end
    };

    std::size_t packets = 0;
    std::uint64_t payload_bytes = 0; ///< application bytes only
    std::uint64_t psdu_bytes = 0;
    SimTime airtime;   ///< PPDU duration
    SimTime exchange;  ///< airtime + SIFS + block-ack
    std::vector<Mpdu> mpdus;

    bool empty() const { return packets == 0; }
};

/// Greedy FIFO packing: MSDUs into A-MSDUs up to max_amsdu, A-MSDUs into one
/// A-MPDU up to max_ampdu, stopping before the exchange (airtime + SIFS +
/// block-ack) would exceed `budget`. The queue is not modified.
Batch assemble_ampdu(const TxQueue& queue, const MacTimingParams& timing, SimTime budget,
                     const McsEntry& mcs);

/// Reception time of the last byte of MPDU `m` for a PPDU starting at `start`.
SimTime mpdu_end_time(SimTime start, const Batch::Mpdu& m, const McsEntry& mcs,
                      const MacTimingParams& timing);

/// Exact SP time needed to drain `burst_packets` fresh packets back to back:
/// the sum of batch exchanges produced by assemble_ampdu.
SimTime sp_duration_for(std::uint64_t burst_packets, std::uint32_t packet_size,
                        const McsEntry& mcs, const MacTimingParams& timing);

} // namespace dmgsim
