#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dmgsim {

struct PlotSeries {
    std::string label;
    std::vector<std::optional<double>> y;   ///< one per category; nullopt leaves a gap
    std::vector<std::optional<double>> err; ///< CI half-width drawn as a whisker
};

/// Line chart over a categorical x axis.
struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> categories;
    std::vector<PlotSeries> series;
};

/// Standalone SVG document. Output depends only on the chart contents.
std::string render_svg(const LineChart& chart);

/// Several charts tiled row-major, `cols` per row, in one SVG document.
std::string render_panel_grid(const std::vector<LineChart>& charts, std::size_t cols);

/// Reads an aggregate CSV written by run_scenario and writes the figure set
/// for its scenario into out_dir. Returns the paths written. Throws
/// std::runtime_error naming any missing column.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& aggregate_csv,
                                              const std::filesystem::path& out_dir);

} // namespace dmgsim
