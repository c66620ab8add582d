#include "dmgsim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dmgsim/csv.hpp"

namespace dmgsim {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 72;
constexpr double kRight = 130;
constexpr double kTop = 40;
constexpr double kBottom = 58;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

double nice_step(double raw)
{
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    if (f <= 1.0) {
        return mag;
    }
    if (f <= 2.0) {
        return 2 * mag;
    }
    if (f <= 5.0) {
        return 5 * mag;
    }
    return 10 * mag;
}

void draw_chart(std::ostream& o, const LineChart& c)
{
    double lo = 0.0;
    double hi = 0.0;
    bool any = false;
    for (const auto& s : c.series) {
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            if (!s.y[i]) {
                continue;
            }
            const double e = i < s.err.size() && s.err[i] ? *s.err[i] : 0.0;
            if (!any) {
                lo = std::min(0.0, *s.y[i] - e);
                hi = *s.y[i] + e;
                any = true;
            }
            lo = std::min(lo, *s.y[i] - e);
            hi = std::max(hi, *s.y[i] + e);
        }
    }
    if (!any || hi <= lo) {
        hi = lo + 1.0;
    }
    const double step = nice_step((hi - lo) / 5.0);
    lo = std::floor(lo / step) * step;
    hi = std::ceil(hi / step) * step;

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const auto ys = [&](double v) { return kTop + ph * (1.0 - (v - lo) / (hi - lo)); };
    const std::size_t n = c.categories.size();
    const auto xs = [&](std::size_t i) { return kLeft + pw * (n <= 1 ? 0.5 : (i + 0.5) / n); };

    o << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
      << "\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(c.title) << "</text>\n";

    for (double t = lo; t <= hi + step * 1e-9; t += step) {
        const double y = ys(t);
        o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
          << num(y) << "\" stroke=\"#e0e0e0\"/>\n";
        o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
          << tick_label(t) << "</text>\n";
    }
    for (std::size_t i = 0; i < n; ++i) {
        o << "<text x=\"" << num(xs(i)) << "\" y=\"" << num(kTop + ph + 16)
          << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(c.categories[i]) << "</text>\n";
    }
    o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\""
      << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 14)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(c.x_label) << "</text>\n";
    o << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << num(kTop + ph / 2) << ")\">" << escape(c.y_label) << "</text>\n";

    for (std::size_t si = 0; si < c.series.size(); ++si) {
        const auto& s = c.series[si];
        const char* color = kPalette[si % std::size(kPalette)];
        std::string path;
        bool pen_down = false;
        for (std::size_t i = 0; i < n && i < s.y.size(); ++i) {
            if (!s.y[i]) {
                pen_down = false;
                continue;
            }
            path += (pen_down ? " L " : " M ") + num(xs(i)) + " " + num(ys(*s.y[i]));
            pen_down = true;
        }
        if (!path.empty()) {
            o << "<path d=\"" << path.substr(1) << "\" fill=\"none\" stroke=\"" << color
              << "\" stroke-width=\"1.8\"/>\n";
        }
        for (std::size_t i = 0; i < n && i < s.y.size(); ++i) {
            if (!s.y[i]) {
                continue;
            }
            const double x = xs(i);
            const double y = ys(*s.y[i]);
            if (i < s.err.size() && s.err[i] && *s.err[i] > 0) {
                const double y0 = ys(*s.y[i] - *s.err[i]);
                const double y1 = ys(*s.y[i] + *s.err[i]);
                o << "<path d=\"M " << num(x) << " " << num(y0) << " L " << num(x) << " " << num(y1) << " M "
                  << num(x - 4) << " " << num(y0) << " L " << num(x + 4) << " " << num(y0) << " M " << num(x - 4)
                  << " " << num(y1) << " L " << num(x + 4) << " " << num(y1) << "\" stroke=\"" << color
                  << "\" fill=\"none\"/>\n";
            }
            o << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = kTop + 14 + 20.0 * static_cast<double>(si);
        const double lx = kLeft + pw + 12;
        o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 22) << "\" y2=\"" << num(ly)
          << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"/>\n";
        o << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly + 4) << "\" font-size=\"12\">" << escape(s.label)
          << "</text>\n";
    }
}

std::string svg_open(double w, double h)
{
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) +
           "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) +
           "\" font-family=\"sans-serif\">\n";
}

double parse_cell(const std::string& s, const std::string& column)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("column '" + column + "': not a number: '" + s + "'");
    }
}

std::optional<double> optional_cell(const std::string& s, const std::string& column)
{
    if (s.empty()) {
        return std::nullopt;
    }
    return parse_cell(s, column);
}

/// One chart: categories from `category(row)`, one series per config.
LineChart build_chart(const CsvTable& t, const std::vector<std::size_t>& rows,
                      const std::function<std::string(const std::vector<std::string>&)>& category,
                      const std::string& metric, double scale, std::string title, std::string x_label,
                      std::string y_label)
{
    const std::size_t cfg = t.column("config");
    const std::size_t mean = t.column(metric + "_mean");
    const std::size_t ci = t.column(metric + "_ci95");
    LineChart c{std::move(title), std::move(x_label), std::move(y_label), {}, {}};
    std::map<std::string, std::size_t> cat_index;
    std::map<std::string, std::size_t> series_index;
    for (std::size_t r : rows) {
        const auto& row = t.rows[r];
        const std::string cat = category(row);
        if (cat_index.emplace(cat, c.categories.size()).second) {
            c.categories.push_back(cat);
        }
        if (series_index.emplace(row[cfg], c.series.size()).second) {
            c.series.push_back({row[cfg], {}, {}});
        }
    }
    for (auto& s : c.series) {
        s.y.assign(c.categories.size(), std::nullopt);
        s.err.assign(c.categories.size(), std::nullopt);
    }
    for (std::size_t r : rows) {
        const auto& row = t.rows[r];
        auto& s = c.series[series_index.at(row[cfg])];
        const std::size_t i = cat_index.at(category(row));
        if (auto v = optional_cell(row[mean], metric + "_mean")) {
            s.y[i] = *v * scale;
        }
        if (auto e = optional_cell(row[ci], metric + "_ci95")) {
            s.err[i] = *e * scale;
        }
    }
    return c;
}

void write_file(const std::filesystem::path& p, const std::string& content, std::vector<std::filesystem::path>& written)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write '" + p.string() + "'");
    }
    out << content;
    out.close();
    if (!out) {
        throw std::runtime_error("write failed for '" + p.string() + "'");
    }
    written.push_back(p);
}

} // namespace

std::string render_svg(const LineChart& chart)
{
    std::ostringstream o;
    o << svg_open(kWidth, kHeight);
    draw_chart(o, chart);
    o << "</svg>\n";
    return o.str();
}

std::string render_panel_grid(const std::vector<LineChart>& charts, std::size_t cols)
{
    if (cols == 0) {
        throw std::invalid_argument("render_panel_grid: cols must be >= 1");
    }
    const std::size_t rows = (charts.size() + cols - 1) / cols;
    std::ostringstream o;
    o << svg_open(kWidth * static_cast<double>(std::min(cols, std::max<std::size_t>(charts.size(), 1))),
                  kHeight * static_cast<double>(std::max<std::size_t>(rows, 1)));
    for (std::size_t i = 0; i < charts.size(); ++i) {
        o << "<g transform=\"translate(" << num(kWidth * static_cast<double>(i % cols)) << " "
          << num(kHeight * static_cast<double>(i / cols)) << ")\">\n";
        draw_chart(o, charts[i]);
        o << "</g>\n";
    }
    o << "</svg>\n";
    return o.str();
}

namespace {

void emit_plots_into(const std::filesystem::path& aggregate_csv, const std::filesystem::path& out_dir,
                     std::vector<std::filesystem::path>& written)
{
    const CsvTable t = read_csv(aggregate_csv);
    const std::size_t sc = t.column("scenario");
    const std::size_t load = t.column("eta_or_R");
    const std::size_t nst = t.column("n_stas");
    const std::size_t rho = t.column("rho");
    if (t.rows.empty()) {
        throw std::runtime_error("'" + aggregate_csv.string() + "' has no data rows");
    }
    const std::string scenario = t.rows.front()[sc];
    std::vector<std::size_t> all(t.rows.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    const auto out = [&](const std::string& name) { return out_dir / (scenario + "_" + name + ".svg"); };

    const auto by_load = [&](const std::vector<std::string>& r) { return r[load]; };
    const auto by_rho = [&](const std::vector<std::string>& r) { return r[rho]; };
    const auto by_n = [&](const std::vector<std::string>& r) { return r[nst]; };

    if (scenario == "scenario1" || scenario == "scenario3") {
        const bool s1 = scenario == "scenario1";
        const std::string x = s1 ? "normalized offered traffic η" : "period deviation ratio ρ";
        const auto cat = s1 ? std::function<std::string(const std::vector<std::string>&)>(by_load)
                            : std::function<std::string(const std::vector<std::string>&)>(by_rho);
        write_file(out("delay"), render_svg(build_chart(t, all, cat, "avg_delay_ns", 1e-6, "Average delay", x, "delay [ms]")),
                   written);
        write_file(out("jitter"),
                   render_svg(build_chart(t, all, cat, "jitter_ns", 1e-6, "Average delay variation (jitter)", x,
                                          "jitter [ms]")),
                   written);
        write_file(out("norm_thr"),
                   render_svg(build_chart(t, all, cat, "norm_thr", 1.0, "Normalized throughput", x,
                                          "delivered / offered")),
                   written);
    } else if (scenario == "scenario2") {
        std::vector<std::string> rates;
        for (const auto& r : t.rows) {
            if (std::find(rates.begin(), rates.end(), r[load]) == rates.end()) {
                rates.push_back(r[load]);
            }
        }
        std::vector<LineChart> thr_panels;
        std::vector<LineChart> delay_panels;
        for (const auto& rate : rates) {
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < t.rows.size(); ++i) {
                if (t.rows[i][load] == rate) {
                    rows.push_back(i);
                }
            }
            const std::string mbps = format_number(parse_cell(rate, "eta_or_R") / 1e6);
            const std::string tag = "R=" + mbps + " Mb/s";
            thr_panels.push_back(build_chart(t, rows, by_n, "thr_bps", 1e-6, "Aggregated throughput (" + tag + ")",
                                             "number of STAs", "throughput [Mb/s]"));
            delay_panels.push_back(build_chart(t, rows, by_n, "avg_delay_ns", 1e-6, "Average delay (" + tag + ")",
                                               "number of STAs", "delay [ms]"));
            write_file(out("thr_R" + mbps), render_svg(thr_panels.back()), written);
            write_file(out("delay_R" + mbps), render_svg(delay_panels.back()), written);
        }
        std::vector<LineChart> grid = thr_panels;
        grid.insert(grid.end(), delay_panels.begin(), delay_panels.end());
        write_file(out("panels"), render_panel_grid(grid, std::max<std::size_t>(rates.size(), 1)), written);
    } else {
        const auto cat = [&](const std::vector<std::string>& r) {
            return "x=" + r[load] + " N=" + r[nst] + " ρ=" + r[rho];
        };
        const std::string x = "grid point";
        write_file(out("delay"), render_svg(build_chart(t, all, cat, "avg_delay_ns", 1e-6, "Average delay", x, "delay [ms]")),
                   written);
        write_file(out("jitter"),
                   render_svg(build_chart(t, all, cat, "jitter_ns", 1e-6, "Average delay variation (jitter)", x,
                                          "jitter [ms]")),
                   written);
        write_file(out("norm_thr"),
                   render_svg(build_chart(t, all, cat, "norm_thr", 1.0, "Normalized throughput", x,
                                          "delivered / offered")),
                   written);
        write_file(out("thr"),
                   render_svg(build_chart(t, all, cat, "thr_bps", 1e-6, "Aggregated throughput", x,
                                          "throughput [Mb/s]")),
                   written);
    }
}

} // namespace

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& aggregate_csv,
                                              const std::filesystem::path& out_dir)
{
    std::vector<std::filesystem::path> written;
    try {
        emit_plots_into(aggregate_csv, out_dir, written);
    } catch (...) {
        std::error_code ec;
        for (const auto& f : written) {
            std::filesystem::remove(f, ec);
        }
        throw;
    }
    return written;
}

} // namespace dmgsim
