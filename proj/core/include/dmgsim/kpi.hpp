#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dmgsim/sim_time.hpp"
#include "dmgsim/tx_queue.hpp"

namespace dmgsim {

enum class LossCause : std::uint8_t { None, Queue, Retry };

struct PacketRecord {
    std::uint32_t flow = 0;
    std::uint32_t seq = 0;
    std::uint32_t size = 0;
    SimTime generated_at;
    std::optional<SimTime> delivered_at;
    LossCause loss_cause = LossCause::None;
};

/// Mean one-way delay over delivered packets, all flows pooled. nullopt if
/// nothing was delivered.
std::optional<double> avg_delay(std::span<const PacketRecord> records);

/// RFC 3393-style jitter: mean |d[i+1] - d[i]| over consecutive delivered
/// packets of each flow (sequence order), pooled by pair count.
std::optional<double> jitter(std::span<const PacketRecord> records);

/// Delivered application bits per second over the horizon.
double throughput(std::span<const PacketRecord> records, SimTime horizon);

/// Rate of traffic whose fate is known (delivered or lost) over the horizon.
/// Packets still queued at the horizon are excluded.
double offered_bps(std::span<const PacketRecord> records, SimTime horizon);

/// throughput / offered; nullopt if offered == 0.
std::optional<double> normalized_throughput(std::span<const PacketRecord> records,
                                            double offered, SimTime horizon);

struct FlowKpi {
    std::uint32_t flow = 0;
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t delivered_bytes = 0;
    std::uint64_t lost_queue = 0;
    std::uint64_t lost_retry = 0;
    std::uint64_t lost_bytes = 0;
    std::optional<double> avg_delay_s;
    std::optional<double> jitter_s;
    double thr_bps = 0.0;
};

struct RunKpi {
    std::optional<double> avg_delay_s;
    std::optional<double> jitter_s;
    double aggr_throughput_bps = 0.0;
    std::optional<double> norm_throughput;
    std::uint32_t admitted_stas = 0;
    std::uint64_t generated_pkts = 0;
    std::uint64_t delivered_pkts = 0;
    std::uint64_t lost_pkts = 0;
    std::vector<FlowKpi> flows;
};

/// Streaming equivalent of the batch functions above; the simulator feeds it
/// per-packet events instead of materializing every record. Deliveries of a
/// flow must arrive in sequence order.
class KpiCollector {
public:
    explicit KpiCollector(bool keep_records = false) : keep_records_(keep_records) {}

    void on_generated(const Packet& p);
    void on_delivered(const Packet& p, SimTime delivered_at);
    void on_lost(const Packet& p, LossCause cause);

    /// Folds the accumulated state into a RunKpi.
    RunKpi finish(SimTime horizon, std::uint32_t admitted_stas) const;

    /// Only populated with keep_records. Queued-at-horizon packets appear
    /// with no delivery and LossCause::None.
    std::vector<PacketRecord> records() const;

private:
    struct Flow {
        std::uint64_t generated = 0;
        std::uint64_t delivered = 0;
        std::uint64_t delivered_bytes = 0;
        std::uint64_t lost_queue = 0;
        std::uint64_t lost_retry = 0;
        std::uint64_t lost_bytes = 0;
        long double delay_sum_ns = 0;
        long double abs_diff_sum_ns = 0;
        std::uint64_t pairs = 0;
        SimTime::rep last_delay = 0;
        std::int64_t last_seq = -1;
    };

    Flow& flow(std::uint32_t id);

    bool keep_records_;
    std::vector<Flow> flows_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, PacketRecord> records_;
};

/// Mean over runs plus 95% half-width 1.96 * s / sqrt(n) with the sample
/// standard deviation. ci95 is absent when fewer than two values exist.
struct MetricSummary {
    std::optional<double> mean;
    std::optional<double> ci95;
    std::size_t n = 0;
};

MetricSummary summarize(std::span<const std::optional<double>> values);
MetricSummary summarize(std::span<const double> values);

struct AggregateKpi {
    std::size_t n_runs = 0;
    MetricSummary admitted;
    MetricSummary avg_delay_s;
    MetricSummary jitter_s;
    MetricSummary thr_bps;
    MetricSummary norm_thr;
    MetricSummary lost_pkts;
};

AggregateKpi aggregate(std::span<const RunKpi> runs);

} // namespace dmgsim
