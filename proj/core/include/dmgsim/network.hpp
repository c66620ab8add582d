#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dmgsim/kernel.hpp"
#include "dmgsim/kpi.hpp"
#include "dmgsim/phy.hpp"
#include "dmgsim/rng.hpp"
#include "dmgsim/schedule.hpp"
#include "dmgsim/traffic.hpp"
#include "dmgsim/tx_queue.hpp"

namespace dmgsim {

enum class Policy { CbapOnly, SpBased };

/// One of the four channel-access configurations under study.
struct SchedulingConfig {
    std::string name; ///< display name, e.g. "SP#1"
    std::string key;  ///< short form used in file names and on the command line
    Policy policy = Policy::SpBased;
    bool smart_start = false;
    bool cbap_fallback = false; ///< allocated STAs may also contend in CBAP

    static SchedulingConfig cbap_only();
    static SchedulingConfig sp1(); ///< smart start, CBAP fallback
    static SchedulingConfig sp2(); ///< no smart start, SP only
    static SchedulingConfig sp3(); ///< no smart start, CBAP fallback
    static std::vector<SchedulingConfig> all();
    /// Accepts "cbap", "sp1", "sp2", "sp3" (case-insensitive). Throws on others.
    static SchedulingConfig by_name(const std::string& name);
};

struct NetworkConfig {
    BeaconIntervalLayout layout;
    SimTime guard_time;
    McsEntry mcs = dmg_sc_mcs(4);
    MacTimingParams timing;
    SchedulingConfig scheduling = SchedulingConfig::sp2();

    std::uint32_t n_stas = 4;
    TrafficProfile traffic;       ///< shared by every STA; smart_start comes from scheduling
    bool traffic_enabled = true;  ///< false: queues are filled only via Network::inject

    /// Bytes per STA queue; 0 selects queue_periods application periods.
    std::uint64_t queue_capacity_bytes = 0;
    std::uint32_t queue_periods = 4;

    /// The last `late_stas` STAs join at late_join_at and must get their
    /// ADDTS request through the CBAP as a management frame.
    std::uint32_t late_stas = 0;
    SimTime late_join_at;
    std::uint32_t mgmt_frame_bytes = 64;

    SimTime horizon = SimTime::s(10);
    std::uint64_t run_seed = 1;

    bool record_packets = false;
    bool record_transmissions = false;
};

enum class TxKind : std::uint8_t { Sp, Cbap, Collision, Drop };
const char* to_string(TxKind k);

struct TxLogEntry {
    SimTime time;
    StaId sta = 0;
    TxKind kind = TxKind::Sp;
    std::uint64_t bytes = 0;
    SimTime airtime;
};

struct StationReport {
    StaId sta = 0;
    bool admitted = false;
    bool silent = false;
    bool generating = false;
    std::optional<SimTime> t0;
    std::uint64_t bursts_emitted = 0;
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t queued = 0;
    std::uint64_t dropped_queue = 0;
    std::uint64_t dropped_retry = 0;
    std::uint32_t final_cw = 0;
    std::uint64_t max_queue_bytes = 0;
};

struct RunResult {
    RunKpi kpi;
    RunStats stats;
    std::vector<StationReport> stations;
    std::vector<TxLogEntry> tx_log;
    std::vector<PacketRecord> records;
    DtiSchedule schedule;
    SimTime sp_duration;
    std::uint64_t burst_packets = 0;
    std::uint64_t collisions = 0;
};

/// One simulation run: a PCP/AP and n uplink STAs.
///
/// Timeline per BI: [BHI | DTI segments...]. SP blocks are served
/// exclusively by their owner with back-to-back A-MPDU exchanges; CBAP gaps
/// run slotted CSMA/CA with binary exponential backoff, frozen outside the
/// gaps. Collisions are the only loss on the air.
class Network {
public:
    explicit Network(NetworkConfig cfg);
    ~Network();
    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    /// Enqueues `count` packets for `sta` at absolute time `at` (test hook).
    void inject(StaId sta, std::size_t count, std::uint32_t size, SimTime at);

    /// Runs to the horizon and checks per-flow conservation.
    RunResult run();

    Kernel& kernel();
    const Scheduler& scheduler() const;
    const NetworkConfig& config() const;

    /// Current DCF contention window of a STA.
    std::uint32_t contention_window(StaId sta) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience: build and run.
RunResult simulate(const NetworkConfig& cfg);

} // namespace dmgsim
