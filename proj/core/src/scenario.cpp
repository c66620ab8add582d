#include "dmgsim/scenario.hpp"

#include <atomic>
#include <cctype>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "dmgsim/config.hpp"
#include "dmgsim/csv.hpp"
#include "dmgsim/plot.hpp"

#ifndef DMGSIM_VERSION
#define DMGSIM_VERSION "unknown"
#endif

namespace dmgsim {

const char* version() { return DMGSIM_VERSION; }

const char* to_string(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::Scenario1: return "scenario1";
    case ScenarioKind::Scenario2: return "scenario2";
    case ScenarioKind::Scenario3: return "scenario3";
    case ScenarioKind::Custom: return "custom";
    }
    return "?";
}

ScenarioKind scenario_from_string(const std::string& s)
{
    std::string k;
    for (char c : s) {
        k.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (k == "scenario1" || k == "1") {
        return ScenarioKind::Scenario1;
    }
    if (k == "scenario2" || k == "2") {
        return ScenarioKind::Scenario2;
    }
    if (k == "scenario3" || k == "3") {
        return ScenarioKind::Scenario3;
    }
    if (k == "custom") {
        return ScenarioKind::Custom;
    }
    throw std::invalid_argument("unknown scenario '" + s + "' (expected scenario1, scenario2, scenario3 or custom)");
}

std::string scenario_file_stem(ScenarioKind kind) { return to_string(kind); }

ScenarioSpec default_spec(ScenarioKind kind)
{
    ScenarioSpec s;
    s.kind = kind;
    switch (kind) {
    case ScenarioKind::Scenario1:
        s.eta_grid = {0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        break;
    case ScenarioKind::Scenario2:
        s.rate_grid_bps = {50'000'000, 100'000'000, 200'000'000};
        s.n_stas_grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        break;
    case ScenarioKind::Scenario3:
        s.eta_grid = {0.75};
        s.rho_grid = {0, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2};
        break;
    case ScenarioKind::Custom:
        break;
    }
    return s;
}

void ScenarioSpec::validate() const
{
    if (!rate_based() && eta_grid.empty()) {
        throw std::invalid_argument("eta_grid is empty");
    }
    for (double e : eta_grid) {
        if (!(e > 0.0 && e <= 1.0)) {
            throw std::invalid_argument("η must lie in (0,1]");
        }
    }
    for (auto r : rate_grid_bps) {
        if (r == 0) {
            throw std::invalid_argument("rate_grid_bps entries must be positive");
        }
    }
    if (n_stas_grid.empty()) {
        throw std::invalid_argument("n_stas_grid is empty");
    }
    for (auto n : n_stas_grid) {
        if (n == 0) {
            throw std::invalid_argument("n_stas must be >= 1");
        }
        if (base.late_stas > n) {
            throw std::invalid_argument("late_stas exceeds n_stas");
        }
    }
    if (rho_grid.empty()) {
        throw std::invalid_argument("rho_grid is empty");
    }
    for (double r : rho_grid) {
        if (!(r >= 0.0)) {
            throw std::invalid_argument("ρ must be >= 0");
        }
    }
    if (configs.empty()) {
        throw std::invalid_argument("configs is empty");
    }
    if (n_runs == 0) {
        throw std::invalid_argument("runs must be >= 1");
    }
    if (jobs == 0) {
        throw std::invalid_argument("jobs must be >= 1");
    }
    if (base.traffic.mean_period == SimTime::zero()) {
        throw std::invalid_argument("period must be positive");
    }
    if (base.horizon == SimTime::zero()) {
        throw std::invalid_argument("horizon must be positive");
    }
    base.layout.validate();
    base.timing.validate(base.traffic.packet_size);
}

std::vector<GridPoint> grid_points(const ScenarioSpec& spec)
{
    std::vector<GridPoint> out;
    std::vector<double> loads;
    if (spec.rate_based()) {
        for (auto r : spec.rate_grid_bps) {
            loads.push_back(static_cast<double>(r));
        }
    } else {
        loads = spec.eta_grid;
    }
    for (double load : loads) {
        for (auto n : spec.n_stas_grid) {
            for (double rho : spec.rho_grid) {
                out.push_back({out.size(), load, n, rho});
            }
        }
    }
    return out;
}

std::vector<RunPlanEntry> plan_runs(const ScenarioSpec& spec)
{
    std::vector<RunPlanEntry> out;
    const auto points = grid_points(spec);
    for (const auto& p : points) {
        for (std::size_t c = 0; c < spec.configs.size(); ++c) {
            for (std::uint32_t r = 0; r < spec.n_runs; ++r) {
                out.push_back({p.index, c, r, spec.base_seed + r});
            }
        }
    }
    return out;
}

NetworkConfig make_network_config(const ScenarioSpec& spec, const GridPoint& point,
                                  const SchedulingConfig& sched, std::uint64_t run_seed)
{
    NetworkConfig c = spec.base;
    c.scheduling = sched;
    c.n_stas = point.n_stas;
    c.run_seed = run_seed;
    c.traffic.deviation_ratio = point.rho;
    if (spec.rate_based()) {
        c.traffic.burst_packets = burst_packets_for_rate(static_cast<std::uint64_t>(point.load),
                                                         c.traffic.mean_period, c.traffic.packet_size);
    } else {
        c.traffic.burst_packets =
            burst_packets_for(point.load, point.n_stas, c.mcs, c.traffic.mean_period, c.traffic.packet_size);
    }
    return c;
}

const PointAggregate& ScenarioResult::at(std::size_t grid, std::size_t config) const
{
    for (const auto& a : aggregates) {
        if (a.grid == grid && a.config == config) {
            return a;
        }
    }
    throw std::out_of_range("no aggregate for grid point " + std::to_string(grid) + ", config " +
                            std::to_string(config));
}

ScenarioResult execute(const ScenarioSpec& spec,
                       const std::function<void(std::size_t done, std::size_t total)>& progress)
{
    spec.validate();
    ScenarioResult res;
    res.points = grid_points(spec);
    const auto plan = plan_runs(spec);
    res.runs.resize(plan.size());

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex mu;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= plan.size() || failed.load()) {
                return;
            }
            try {
                const auto& e = plan[i];
                RunResult r = simulate(make_network_config(spec, res.points[e.grid], spec.configs[e.config], e.run_seed));
                res.runs[i] = RunOutcome{e, std::move(r.kpi), std::move(r.stations)};
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) {
                    error = std::current_exception();
                }
                failed = true;
                return;
            }
            const std::size_t d = ++done;
            if (progress) {
                std::lock_guard lock(mu);
                progress(d, plan.size());
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(spec.jobs, std::max<std::size_t>(plan.size(), 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    for (std::size_t g = 0; g < res.points.size(); ++g) {
        for (std::size_t c = 0; c < spec.configs.size(); ++c) {
            std::vector<RunKpi> kpis;
            for (const auto& r : res.runs) {
                if (r.entry.grid == g && r.entry.config == c) {
                    kpis.push_back(r.kpi);
                }
            }
            res.aggregates.push_back({g, c, aggregate(kpis)});
        }
    }
    return res;
}

namespace {

std::string load_str(const GridPoint& p, bool rate_based)
{
    return rate_based ? std::to_string(static_cast<std::uint64_t>(p.load)) : format_number(p.load);
}

std::string ns_of(const std::optional<double>& seconds)
{
    return seconds ? format_number(*seconds * 1e9) : std::string();
}

class OutputSet {
public:
    explicit OutputSet(std::vector<std::filesystem::path>& files) : files_(files) {}

    std::ofstream open(const std::filesystem::path& p)
    {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write '" + p.string() + "'");
        }
        files_.push_back(p);
        return out;
    }

    void finish(std::ofstream& out, const std::filesystem::path& p)
    {
        out.close();
        if (!out) {
            throw std::runtime_error("write failed for '" + p.string() + "'");
        }
    }

private:
    std::vector<std::filesystem::path>& files_;
};

void write_outputs(const ScenarioSpec& spec, ScenarioResult& res, std::vector<std::filesystem::path>& files)
{
    OutputSet set(files);
    const std::string stem = scenario_file_stem(spec.kind);
    const auto& dir = spec.output_dir;
    const bool rb = spec.rate_based();

    {
        const auto p = dir / (stem + "_banner.txt");
        auto out = set.open(p);
        out << render_banner(spec);
        set.finish(out, p);
    }
    {
        const auto p = dir / (stem + "_runs.csv");
        auto out = set.open(p);
        write_csv_row(out, {"scenario", "config", "run_seed", "eta_or_R", "n_stas", "rho", "admitted",
                            "avg_delay_ns", "jitter_ns", "thr_bps", "norm_thr", "lost_pkts"});
        for (const auto& r : res.runs) {
            const auto& pt = res.points[r.entry.grid];
            write_csv_row(out, {stem, spec.configs[r.entry.config].name, std::to_string(r.entry.run_seed),
                                load_str(pt, rb), std::to_string(pt.n_stas), format_number(pt.rho),
                                std::to_string(r.kpi.admitted_stas), ns_of(r.kpi.avg_delay_s), ns_of(r.kpi.jitter_s),
                                format_number(r.kpi.aggr_throughput_bps), format_optional(r.kpi.norm_throughput),
                                std::to_string(r.kpi.lost_pkts)});
        }
        set.finish(out, p);
    }
    {
        const auto p = dir / (stem + "_flows.csv");
        auto out = set.open(p);
        write_csv_row(out, {"scenario", "config", "run_seed", "eta_or_R", "n_stas", "rho", "sta", "admitted",
                            "generating", "t0_ns", "bursts", "generated", "delivered", "queued", "dropped_queue",
                            "dropped_retry"});
        for (const auto& r : res.runs) {
            const auto& pt = res.points[r.entry.grid];
            for (const auto& s : r.stations) {
                write_csv_row(out, {stem, spec.configs[r.entry.config].name, std::to_string(r.entry.run_seed),
                                    load_str(pt, rb), std::to_string(pt.n_stas), format_number(pt.rho),
                                    std::to_string(s.sta), s.admitted ? "1" : "0", s.generating ? "1" : "0",
                                    s.t0 ? std::to_string(s.t0->count()) : std::string(),
                                    std::to_string(s.bursts_emitted), std::to_string(s.generated),
                                    std::to_string(s.delivered), std::to_string(s.queued),
                                    std::to_string(s.dropped_queue), std::to_string(s.dropped_retry)});
            }
        }
        set.finish(out, p);
    }
    const auto agg_path = dir / (stem + "_aggregate.csv");
    {
        auto out = set.open(agg_path);
        std::vector<std::string> header{"scenario", "config", "eta_or_R", "n_stas", "rho", "n_runs"};
        for (const char* m : {"admitted", "avg_delay_ns", "jitter_ns", "thr_bps", "norm_thr", "lost_pkts"}) {
            header.push_back(std::string(m) + "_mean");
            header.push_back(std::string(m) + "_ci95");
        }
        write_csv_row(out, header);
        for (const auto& a : res.aggregates) {
            const auto& pt = res.points[a.grid];
            const auto scaled = [](const MetricSummary& m, double k) {
                return std::pair{m.mean ? format_number(*m.mean * k) : std::string(),
                                 m.ci95 ? format_number(*m.ci95 * k) : std::string()};
            };
            std::vector<std::string> row{stem, spec.configs[a.config].name, load_str(pt, rb),
                                         std::to_string(pt.n_stas), format_number(pt.rho),
                                         std::to_string(a.kpi.n_runs)};
            for (const auto& [m, k] : {std::pair{&a.kpi.admitted, 1.0}, std::pair{&a.kpi.avg_delay_s, 1e9},
                                       std::pair{&a.kpi.jitter_s, 1e9}, std::pair{&a.kpi.thr_bps, 1.0},
                                       std::pair{&a.kpi.norm_thr, 1.0}, std::pair{&a.kpi.lost_pkts, 1.0}}) {
                auto [mean, ci] = scaled(*m, k);
                row.push_back(mean);
                row.push_back(ci);
            }
            write_csv_row(out, row);
        }
        set.finish(out, agg_path);
    }

    if (spec.dump_schedule || spec.trace) {
        for (const auto& pt : res.points) {
            for (const auto& sched : spec.configs) {
                const std::string tag = sched.key + "_g" + std::to_string(pt.index);
                NetworkConfig cfg = make_network_config(spec, pt, sched, spec.base_seed);
                if (spec.dump_schedule) {
                    // Setup-phase admission is deterministic; late joiners are not reflected.
                    Network net(cfg);
                    const auto p = dir / (stem + "_schedule_" + tag + ".csv");
                    auto out = set.open(p);
                    write_schedule_csv(out, net.scheduler().schedule());
                    set.finish(out, p);
                }
                if (spec.trace) {
                    cfg.record_transmissions = true;
                    const RunResult r = simulate(cfg);
                    const auto p = dir / (stem + "_trace_" + tag + ".csv");
                    auto out = set.open(p);
                    write_csv_row(out, {"time_ns", "sta", "kind", "bytes", "airtime_ns"});
                    for (const auto& e : r.tx_log) {
                        write_csv_row(out, {std::to_string(e.time.count()), std::to_string(e.sta), to_string(e.kind),
                                            std::to_string(e.bytes), std::to_string(e.airtime.count())});
                    }
                    set.finish(out, p);
                }
            }
        }
    }

    const auto svgs = emit_plots(agg_path, dir);
    files.insert(files.end(), svgs.begin(), svgs.end());
}

} // namespace

ScenarioResult run_scenario(const ScenarioSpec& spec,
                            const std::function<void(std::size_t done, std::size_t total)>& progress)
{
    ScenarioResult res = execute(spec, progress);
    std::vector<std::filesystem::path> files;
    try {
        std::filesystem::create_directories(spec.output_dir);
        write_outputs(spec, res, files);
    } catch (...) {
        std::error_code ec;
        for (const auto& f : files) {
            std::filesystem::remove(f, ec);
        }
        throw;
    }
    res.files = std::move(files);
    return res;
}

} // namespace dmgsim
