// simulate: run the channel-access scenarios and write CSV/SVG outputs.
//
//   simulate scenario1|scenario2|scenario3|custom [--config FILE] [--out DIR]
//            [--runs N] [--seed S] [--jobs J] [--dump-schedule] [--trace]
//            [--set key=value ...]
//
// Precedence: scenario defaults < config file < SIM_SEED < flags.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "dmgsim/config.hpp"
#include "dmgsim/csv.hpp"
#include "dmgsim/scenario.hpp"

using namespace dmgsim;

namespace {

std::string ms(const MetricSummary& m)
{
    if (!m.mean) {
        return "-";
    }
    char buf[64];
    if (m.ci95) {
        std::snprintf(buf, sizeof buf, "%.3f ± %.3f", *m.mean * 1e3, *m.ci95 * 1e3);
    } else {
        std::snprintf(buf, sizeof buf, "%.3f", *m.mean * 1e3);
    }
    return buf;
}

void print_summary(const ScenarioSpec& spec, const ScenarioResult& res)
{
    std::printf("%-10s %-14s %4s %6s  %-20s %-18s %-8s %-9s %s\n", "config", spec.rate_based() ? "R [b/s]" : "eta",
                "N", "rho", "delay [ms]", "jitter [ms]", "norm", "thr Mb/s", "admitted");
    for (const auto& a : res.aggregates) {
        const auto& p = res.points[a.grid];
        const std::string load =
            spec.rate_based() ? std::to_string(static_cast<std::uint64_t>(p.load)) : format_number(p.load);
        std::printf("%-10s %-14s %4u %6s  %-20s %-18s %-8.4f %-9.1f %.2f\n", spec.configs[a.config].name.c_str(),
                    load.c_str(), p.n_stas, format_number(p.rho).c_str(), ms(a.kpi.avg_delay_s).c_str(),
                    ms(a.kpi.jitter_s).c_str(), a.kpi.norm_thr.mean.value_or(0.0),
                    a.kpi.thr_bps.mean.value_or(0.0) / 1e6, a.kpi.admitted.mean.value_or(0.0));
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Discrete-event simulator for SP/CBAP channel access in 60 GHz WLANs"};
    app.set_version_flag("--version", std::string(version()));

    std::string scenario;
    std::string config_path;
    std::string out_dir;
    std::uint32_t runs = 0;
    std::uint64_t seed = 0;
    std::uint32_t jobs = 0;
    bool dump_schedule = false;
    bool trace = false;
    bool quiet = false;
    std::vector<std::string> settings;

    app.add_option("scenario", scenario, "scenario1 | scenario2 | scenario3 | custom")
        ->required()
        ->check(CLI::IsMember({"scenario1", "scenario2", "scenario3", "custom"}));
    app.add_option("--config", config_path, "key=value configuration file")->check(CLI::ExistingFile);
    auto* out_opt = app.add_option("--out", out_dir, "output directory (default: out)");
    auto* runs_opt = app.add_option("--runs", runs, "independent runs per grid point")->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed, "base seed; run r uses seed + r (env: SIM_SEED)");
    auto* jobs_opt = app.add_option("--jobs", jobs, "worker threads (0 = hardware concurrency)");
    app.add_flag("--dump-schedule", dump_schedule, "write the DTI schedule of every point and config");
    app.add_flag("--trace", trace, "write the per-transmission log of run 0 of every point and config");
    app.add_option("--set", settings, "override one config key, e.g. --set eta_grid=0.2,0.5");
    app.add_flag("-q,--quiet", quiet, "no progress output");

    CLI11_PARSE(app, argc, argv);

    ScenarioSpec spec;
    try {
        const ScenarioKind kind = scenario_from_string(scenario);
        spec = default_spec(kind);
        if (!config_path.empty()) {
            apply_config_file(spec, config_path);
            spec.kind = kind;
        }
        if (const char* env = std::getenv("SIM_SEED"); env && *env) {
            apply_setting(spec, "seed", env);
        }
        for (const auto& kv : settings) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("--set expects key=value, got '" + kv + "'");
            }
            apply_setting(spec, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (*out_opt) {
            spec.output_dir = out_dir;
        }
        if (*runs_opt) {
            spec.n_runs = runs;
        }
        if (*seed_opt) {
            spec.base_seed = seed;
        }
        if (*jobs_opt) {
            spec.jobs = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
        }
        spec.dump_schedule = spec.dump_schedule || dump_schedule;
        spec.trace = spec.trace || trace;
        spec.validate();
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return 2;
    }

    try {
        const auto total = plan_runs(spec).size();
        if (!quiet) {
            std::cerr << to_string(spec.kind) << ": " << total << " runs on " << spec.jobs << " thread(s)\n";
        }
        std::size_t last_pct = 101;
        const auto progress = [&](std::size_t done, std::size_t all) {
            const std::size_t pct = done * 100 / all;
            if (!quiet && pct != last_pct && (pct % 10 == 0 || done == all)) {
                std::cerr << "  " << pct << "% (" << done << "/" << all << ")\n";
                last_pct = pct;
            }
        };
        const ScenarioResult res = run_scenario(spec, progress);
        print_summary(spec, res);
        if (!quiet) {
            for (const auto& f : res.files) {
                std::cerr << "wrote " << f.string() << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
