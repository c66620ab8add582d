#include "dmgsim/kpi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dmgsim {

std::optional<double> avg_delay(std::span<const PacketRecord> records)
{
    long double sum = 0;
    std::uint64_t n = 0;
    for (const auto& r : records) {
        if (!r.delivered_at) {
            continue;
        }
        sum += static_cast<long double>((*r.delivered_at - r.generated_at).count());
        ++n;
    }
    if (n == 0) {
        return std::nullopt;
    }
    return static_cast<double>(sum / n * 1e-9L);
}

std::optional<double> jitter(std::span<const PacketRecord> records)
{
    std::map<std::uint32_t, std::vector<std::pair<std::uint32_t, SimTime::rep>>> per_flow;
    for (const auto& r : records) {
        if (r.delivered_at) {
            per_flow[r.flow].emplace_back(r.seq, (*r.delivered_at - r.generated_at).count());
        }
    }
    long double sum = 0;
    std::uint64_t pairs = 0;
    for (auto& [flow, delays] : per_flow) {
        std::sort(delays.begin(), delays.end());
        for (std::size_t i = 1; i < delays.size(); ++i) {
            sum += std::llabs(delays[i].second - delays[i - 1].second);
            ++pairs;
        }
    }
    if (pairs == 0) {
        return std::nullopt;
    }
    return static_cast<double>(sum / pairs * 1e-9L);
}

double throughput(std::span<const PacketRecord> records, SimTime horizon)
{
    if (horizon == SimTime::zero()) {
        throw std::invalid_argument("throughput: horizon must be positive");
    }
    std::uint64_t bytes = 0;
    for (const auto& r : records) {
        if (r.delivered_at) {
            bytes += r.size;
        }
    }
    return static_cast<double>(bytes) * 8.0 / horizon.seconds();
}

double offered_bps(std::span<const PacketRecord> records, SimTime horizon)
{
    if (horizon == SimTime::zero()) {
        throw std::invalid_argument("offered_bps: horizon must be positive");
    }
    std::uint64_t bytes = 0;
    for (const auto& r : records) {
        if (r.delivered_at || r.loss_cause != LossCause::None) {
            bytes += r.size;
        }
    }
    return static_cast<double>(bytes) * 8.0 / horizon.seconds();
}

std::optional<double> normalized_throughput(std::span<const PacketRecord> records, double offered,
                                            SimTime horizon)
{
    if (offered <= 0.0) {
        return std::nullopt;
    }
    return throughput(records, horizon) / offered;
}

KpiCollector::Flow& KpiCollector::flow(std::uint32_t id)
{
    if (id >= flows_.size()) {
        flows_.resize(id + 1);
    }
    return flows_[id];
}

void KpiCollector::on_generated(const Packet& p)
{
    ++flow(p.flow).generated;
    if (keep_records_) {
        records_[{p.flow, p.seq}] = PacketRecord{p.flow, p.seq, p.size, p.generated_at, std::nullopt,
                                                 LossCause::None};
    }
}

void KpiCollector::on_delivered(const Packet& p, SimTime delivered_at)
{
    auto& f = flow(p.flow);
    if (static_cast<std::int64_t>(p.seq) <= f.last_seq) {
        throw std::logic_error("KpiCollector: out-of-order delivery in flow " + std::to_string(p.flow));
    }
    const SimTime::rep d = (delivered_at - p.generated_at).count();
    ++f.delivered;
    f.delivered_bytes += p.size;
    f.delay_sum_ns += d;
    if (f.last_seq >= 0) {
        f.abs_diff_sum_ns += std::llabs(d - f.last_delay);
        ++f.pairs;
    }
    f.last_delay = d;
    f.last_seq = p.seq;
    if (keep_records_) {
        records_.at({p.flow, p.seq}).delivered_at = delivered_at;
    }
}

void KpiCollector::on_lost(const Packet& p, LossCause cause)
{
    auto& f = flow(p.flow);
    if (cause == LossCause::Queue) {
        ++f.lost_queue;
    } else if (cause == LossCause::Retry) {
        ++f.lost_retry;
    } else {
        throw std::invalid_argument("KpiCollector::on_lost needs a loss cause");
    }
    f.lost_bytes += p.size;
    if (keep_records_) {
        records_.at({p.flow, p.seq}).loss_cause = cause;
    }
}

RunKpi KpiCollector::finish(SimTime horizon, std::uint32_t admitted_stas) const
{
    if (horizon == SimTime::zero()) {
        throw std::invalid_argument("KpiCollector::finish: horizon must be positive");
    }
    RunKpi k;
    k.admitted_stas = admitted_stas;
    long double delay_sum = 0;
    long double diff_sum = 0;
    std::uint64_t delivered = 0;
    std::uint64_t pairs = 0;
    std::uint64_t delivered_bytes = 0;
    std::uint64_t lost_bytes = 0;
    for (std::uint32_t id = 0; id < flows_.size(); ++id) {
        const Flow& f = flows_[id];
        if (f.generated == 0) {
            continue;
        }
        FlowKpi fk;
        fk.flow = id;
        fk.generated = f.generated;
        fk.delivered = f.delivered;
        fk.delivered_bytes = f.delivered_bytes;
        fk.lost_queue = f.lost_queue;
        fk.lost_retry = f.lost_retry;
        fk.lost_bytes = f.lost_bytes;
        if (f.delivered > 0) {
            fk.avg_delay_s = static_cast<double>(f.delay_sum_ns / f.delivered * 1e-9L);
        }
        if (f.pairs > 0) {
            fk.jitter_s = static_cast<double>(f.abs_diff_sum_ns / f.pairs * 1e-9L);
        }
        fk.thr_bps = static_cast<double>(f.delivered_bytes) * 8.0 / horizon.seconds();
        k.flows.push_back(fk);

        delay_sum += f.delay_sum_ns;
        diff_sum += f.abs_diff_sum_ns;
        delivered += f.delivered;
        pairs += f.pairs;
        delivered_bytes += f.delivered_bytes;
        lost_bytes += f.lost_bytes;
        k.generated_pkts += f.generated;
        k.delivered_pkts += f.delivered;
        k.lost_pkts += f.lost_queue + f.lost_retry;
    }
    if (delivered > 0) {
        k.avg_delay_s = static_cast<double>(delay_sum / delivered * 1e-9L);
    }
    if (pairs > 0) {
        k.jitter_s = static_cast<double>(diff_sum / pairs * 1e-9L);
    }
    k.aggr_throughput_bps = static_cast<double>(delivered_bytes) * 8.0 / horizon.seconds();
    const std::uint64_t decided = delivered_bytes + lost_bytes;
    if (decided > 0) {
        k.norm_throughput = static_cast<double>(delivered_bytes) / static_cast<double>(decided);
    }
    return k;
}

std::vector<PacketRecord> KpiCollector::records() const
{
    std::vector<PacketRecord> out;
    out.reserve(records_.size());
    for (const auto& [key, r] : records_) {
        out.push_back(r);
    }
    return out;
}

MetricSummary summarize(std::span<const std::optional<double>> values)
{
    std::vector<double> present;
    for (const auto& v : values) {
        if (v) {
            present.push_back(*v);
        }
    }
    return summarize(std::span<const double>(present));
}

MetricSummary summarize(std::span<const double> values)
{
    MetricSummary m;
    m.n = values.size();
    if (values.empty()) {
        return m;
    }
    long double sum = 0;
    for (double v : values) {
        sum += v;
    }
    const long double mean = sum / values.size();
    m.mean = static_cast<double>(mean);
    if (values.size() >= 2) {
        long double ss = 0;
        for (double v : values) {
            ss += (v - mean) * (v - mean);
        }
        const long double sd = std::sqrt(ss / (values.size() - 1));
        m.ci95 = static_cast<double>(1.96L * sd / std::sqrt(static_cast<long double>(values.size())));
    }
    return m;
}

AggregateKpi aggregate(std::span<const RunKpi> runs)
{
    AggregateKpi a;
    a.n_runs = runs.size();
    std::vector<std::optional<double>> admitted, delay, jit, thr, norm, lost;
    for (const auto& r : runs) {
        admitted.emplace_back(static_cast<double>(r.admitted_stas));
        delay.push_back(r.avg_delay_s);
        jit.push_back(r.jitter_s);
        thr.emplace_back(r.aggr_throughput_bps);
        norm.push_back(r.norm_throughput);
        lost.emplace_back(static_cast<double>(r.lost_pkts));
    }
    a.admitted = summarize(admitted);
    a.avg_delay_s = summarize(delay);
    a.jitter_s = summarize(jit);
    a.thr_bps = summarize(thr);
    a.norm_thr = summarize(norm);
    a.lost_pkts = summarize(lost);
    return a;
}

} // namespace dmgsim
