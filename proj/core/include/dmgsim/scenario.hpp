#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dmgsim/kpi.hpp"
#include "dmgsim/network.hpp"

namespace dmgsim {

const char* version();

enum class ScenarioKind { Scenario1, Scenario2, Scenario3, Custom };

const char* to_string(ScenarioKind k);
ScenarioKind scenario_from_string(const std::string& s);

/// A sweep: the Cartesian product load x n_stas x rho, each point run for
/// every scheduling configuration n_runs times.
///
/// Load is either a normalized offered traffic eta (aggregate over the
/// STAs, relative to the PHY rate) or, when rate_grid_bps is non-empty, a
/// per-STA application rate R.
struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::Custom;
    std::vector<double> eta_grid{0.5};
    std::vector<std::uint64_t> rate_grid_bps;
    std::vector<std::uint32_t> n_stas_grid{4};
    std::vector<double> rho_grid{0.0};
    std::vector<SchedulingConfig> configs = SchedulingConfig::all();

    std::uint32_t n_runs = 30;
    std::uint64_t base_seed = 1;
    std::uint32_t jobs = 1;
    std::filesystem::path output_dir = "out";
    bool dump_schedule = false;
    bool trace = false; ///< per-transmission log of run 0 of every point

    /// Everything except scheduling, n_stas, burst size, rho and seed.
    NetworkConfig base;

    bool rate_based() const { return !rate_grid_bps.empty(); }

    /// Throws std::invalid_argument describing the first bad field.
    void validate() const;
};

/// Defaults for each scenario (custom starts from scenario-1 style
/// single-point values).
ScenarioSpec default_spec(ScenarioKind kind);

struct GridPoint {
    std::size_t index = 0;
    double load = 0.0; ///< eta, or R in bit/s for rate-based sweeps
    std::uint32_t n_stas = 0;
    double rho = 0.0;
};

std::vector<GridPoint> grid_points(const ScenarioSpec& spec);

struct RunPlanEntry {
    std::size_t grid = 0;
    std::size_t config = 0;
    std::uint32_t run = 0;
    std::uint64_t run_seed = 0;
};

/// Every (grid point, config, run) in output order.
std::vector<RunPlanEntry> plan_runs(const ScenarioSpec& spec);

/// Full network configuration for one plan entry.
NetworkConfig make_network_config(const ScenarioSpec& spec, const GridPoint& point,
                                  const SchedulingConfig& sched, std::uint64_t run_seed);

struct RunOutcome {
    RunPlanEntry entry;
    RunKpi kpi;
    std::vector<StationReport> stations;
};

struct PointAggregate {
    std::size_t grid = 0;
    std::size_t config = 0;
    AggregateKpi kpi;
};

struct ScenarioResult {
    std::vector<GridPoint> points;
    std::vector<RunOutcome> runs;           ///< plan order
    std::vector<PointAggregate> aggregates; ///< (grid, config) order
    std::vector<std::filesystem::path> files;

    const PointAggregate& at(std::size_t grid, std::size_t config) const;
};

/// Executes every planned run on spec.jobs threads. Results are merged in
/// plan order, so outputs do not depend on the thread count.
ScenarioResult execute(const ScenarioSpec& spec,
                       const std::function<void(std::size_t done, std::size_t total)>& progress = {});

/// execute() plus all output files (CSVs, SVGs, banner, optional schedule
/// dumps and traces) under spec.output_dir. On any failure the files written
/// so far are removed and the exception is rethrown.
ScenarioResult run_scenario(const ScenarioSpec& spec,
                            const std::function<void(std::size_t done, std::size_t total)>& progress = {});

std::string scenario_file_stem(ScenarioKind kind);

} // namespace dmgsim
