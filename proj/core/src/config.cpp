#include "dmgsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "dmgsim/csv.hpp"

namespace dmgsim {

namespace {

std::string trim(std::string_view s)
{
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <typename T>
T parse_int(const std::string& key, const std::string& v)
{
    T out{};
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v)
{
    double out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "1" || v == "true" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "0" || v == "false" || v == "no" || v == "off") {
        return false;
    }
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

double parse_eta(const std::string& key, const std::string& v)
{
    const double eta = parse_double(key, v);
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw ConfigError(key + "=" + v + ": η must lie in (0,1]");
    }
    return eta;
}

double parse_rho(const std::string& key, const std::string& v)
{
    const double rho = parse_double(key, v);
    if (rho < 0.0) {
        throw ConfigError(key + "=" + v + ": ρ must be >= 0");
    }
    return rho;
}

std::uint32_t parse_positive(const std::string& key, const std::string& v)
{
    const auto n = parse_int<std::uint32_t>(key, v);
    if (n == 0) {
        throw ConfigError(key + " must be >= 1");
    }
    return n;
}

SimTime parse_duration(const std::string& key, const std::string& v, bool allow_zero = false)
{
    const auto ns = parse_int<std::int64_t>(key, v);
    if (ns < 0 || (!allow_zero && ns == 0)) {
        throw ConfigError(key + ": duration must be " + (allow_zero ? "non-negative" : "positive") +
                          ", got " + v);
    }
    return SimTime::ns(ns);
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F fmt)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += fmt(xs[i]);
    }
    return out;
}

std::string ns_str(SimTime t) { return std::to_string(t.count()); }

struct Key {
    std::string name;
    std::function<void(ScenarioSpec&, const std::string&)> set;
    std::function<std::string(const ScenarioSpec&)> get;
};

const std::vector<Key>& key_table()
{
    using S = ScenarioSpec;
    using V = const std::string&;
    static const std::vector<Key> keys = {
        {"scenario", [](S& s, V v) { s.kind = scenario_from_string(v); },
         [](const S& s) { return std::string(to_string(s.kind)); }},
        {"configs",
         [](S& s, V v) {
             s.configs.clear();
             for (const auto& c : split_list(v)) {
                 s.configs.push_back(SchedulingConfig::by_name(c));
             }
         },
         [](const S& s) { return join(s.configs, [](const SchedulingConfig& c) { return c.key; }); }},
        {"eta", [](S& s, V v) { s.eta_grid = {parse_eta("eta", v)}; }, nullptr},
        {"eta_grid",
         [](S& s, V v) {
             s.eta_grid.clear();
             for (const auto& x : split_list(v)) {
                 s.eta_grid.push_back(parse_eta("eta_grid", x));
             }
         },
         [](const S& s) { return join(s.eta_grid, format_number); }},
        {"rate_bps", [](S& s, V v) { s.rate_grid_bps = {parse_int<std::uint64_t>("rate_bps", v)}; }, nullptr},
        {"rate_grid_bps",
         [](S& s, V v) {
             s.rate_grid_bps.clear();
             for (const auto& x : split_list(v)) {
                 s.rate_grid_bps.push_back(parse_int<std::uint64_t>("rate_grid_bps", x));
             }
         },
         [](const S& s) { return join(s.rate_grid_bps, [](std::uint64_t r) { return std::to_string(r); }); }},
        {"n_stas", [](S& s, V v) { s.n_stas_grid = {parse_positive("n_stas", v)}; }, nullptr},
        {"n_stas_grid",
         [](S& s, V v) {
             s.n_stas_grid.clear();
             for (const auto& x : split_list(v)) {
                 s.n_stas_grid.push_back(parse_positive("n_stas_grid", x));
             }
         },
         [](const S& s) { return join(s.n_stas_grid, [](std::uint32_t n) { return std::to_string(n); }); }},
        {"rho", [](S& s, V v) { s.rho_grid = {parse_rho("rho", v)}; }, nullptr},
        {"rho_grid",
         [](S& s, V v) {
             s.rho_grid.clear();
             for (const auto& x : split_list(v)) {
                 s.rho_grid.push_back(parse_rho("rho_grid", x));
             }
         },
         [](const S& s) { return join(s.rho_grid, format_number); }},
        {"runs", [](S& s, V v) { s.n_runs = parse_positive("runs", v); },
         [](const S& s) { return std::to_string(s.n_runs); }},
        {"seed", [](S& s, V v) { s.base_seed = parse_int<std::uint64_t>("seed", v); },
         [](const S& s) { return std::to_string(s.base_seed); }},
        {"jobs", [](S& s, V v) { s.jobs = parse_positive("jobs", v); },
         [](const S& s) { return std::to_string(s.jobs); }},
        {"out", [](S& s, V v) { s.output_dir = v; }, [](const S& s) { return s.output_dir.string(); }},
        {"dump_schedule", [](S& s, V v) { s.dump_schedule = parse_bool("dump_schedule", v); },
         [](const S& s) { return std::string(s.dump_schedule ? "true" : "false"); }},
        {"trace", [](S& s, V v) { s.trace = parse_bool("trace", v); },
         [](const S& s) { return std::string(s.trace ? "true" : "false"); }},
        {"period_ns", [](S& s, V v) { s.base.traffic.mean_period = parse_duration("period_ns", v); },
         [](const S& s) { return ns_str(s.base.traffic.mean_period); }},
        {"bi_duration_ns", [](S& s, V v) { s.base.layout.bi_duration = parse_duration("bi_duration_ns", v); },
         [](const S& s) { return ns_str(s.base.layout.bi_duration); }},
        {"bhi_duration_ns",
         [](S& s, V v) { s.base.layout.bhi_duration = parse_duration("bhi_duration_ns", v, true); },
         [](const S& s) { return ns_str(s.base.layout.bhi_duration); }},
        {"guard_ns", [](S& s, V v) { s.base.guard_time = parse_duration("guard_ns", v, true); },
         [](const S& s) { return ns_str(s.base.guard_time); }},
        {"horizon_ns", [](S& s, V v) { s.base.horizon = parse_duration("horizon_ns", v); },
         [](const S& s) { return ns_str(s.base.horizon); }},
        {"mcs",
         [](S& s, V v) {
             try {
                 s.base.mcs = dmg_sc_mcs(parse_int<int>("mcs", v));
             } catch (const std::invalid_argument& e) {
                 throw ConfigError(std::string("mcs: ") + e.what());
             }
         },
         [](const S& s) { return std::to_string(s.base.mcs.index); }},
        {"packet_size", [](S& s, V v) { s.base.traffic.packet_size = parse_positive("packet_size", v); },
         [](const S& s) { return std::to_string(s.base.traffic.packet_size); }},
        {"slot_ns", [](S& s, V v) { s.base.timing.slot = parse_duration("slot_ns", v); },
         [](const S& s) { return ns_str(s.base.timing.slot); }},
        {"sifs_ns", [](S& s, V v) { s.base.timing.sifs = parse_duration("sifs_ns", v, true); },
         [](const S& s) { return ns_str(s.base.timing.sifs); }},
        {"aifs_ns", [](S& s, V v) { s.base.timing.aifs = parse_duration("aifs_ns", v); },
         [](const S& s) { return ns_str(s.base.timing.aifs); }},
        {"preamble_ns", [](S& s, V v) { s.base.timing.preamble_header = parse_duration("preamble_ns", v, true); },
         [](const S& s) { return ns_str(s.base.timing.preamble_header); }},
        {"block_ack_ns",
         [](S& s, V v) { s.base.timing.block_ack_duration = parse_duration("block_ack_ns", v, true); },
         [](const S& s) { return ns_str(s.base.timing.block_ack_duration); }},
        {"per_mpdu_overhead",
         [](S& s, V v) { s.base.timing.per_mpdu_overhead = parse_int<std::uint32_t>("per_mpdu_overhead", v); },
         [](const S& s) { return std::to_string(s.base.timing.per_mpdu_overhead); }},
        {"per_msdu_overhead",
         [](S& s, V v) { s.base.timing.per_msdu_overhead = parse_int<std::uint32_t>("per_msdu_overhead", v); },
         [](const S& s) { return std::to_string(s.base.timing.per_msdu_overhead); }},
        {"max_amsdu", [](S& s, V v) { s.base.timing.max_amsdu = parse_positive("max_amsdu", v); },
         [](const S& s) { return std::to_string(s.base.timing.max_amsdu); }},
        {"max_ampdu", [](S& s, V v) { s.base.timing.max_ampdu = parse_positive("max_ampdu", v); },
         [](const S& s) { return std::to_string(s.base.timing.max_ampdu); }},
        {"cw_min", [](S& s, V v) { s.base.timing.cw_min = parse_int<std::uint32_t>("cw_min", v); },
         [](const S& s) { return std::to_string(s.base.timing.cw_min); }},
        {"cw_max", [](S& s, V v) { s.base.timing.cw_max = parse_int<std::uint32_t>("cw_max", v); },
         [](const S& s) { return std::to_string(s.base.timing.cw_max); }},
        {"retry_limit", [](S& s, V v) { s.base.timing.retry_limit = parse_positive("retry_limit", v); },
         [](const S& s) { return std::to_string(s.base.timing.retry_limit); }},
        {"queue_periods", [](S& s, V v) { s.base.queue_periods = parse_positive("queue_periods", v); },
         [](const S& s) { return std::to_string(s.base.queue_periods); }},
        {"queue_capacity_bytes",
         [](S& s, V v) { s.base.queue_capacity_bytes = parse_int<std::uint64_t>("queue_capacity_bytes", v); },
         [](const S& s) { return std::to_string(s.base.queue_capacity_bytes); }},
        {"late_stas", [](S& s, V v) { s.base.late_stas = parse_int<std::uint32_t>("late_stas", v); },
         [](const S& s) { return std::to_string(s.base.late_stas); }},
        {"late_join_at_ns", [](S& s, V v) { s.base.late_join_at = parse_duration("late_join_at_ns", v, true); },
         [](const S& s) { return ns_str(s.base.late_join_at); }},
        {"mgmt_frame_bytes", [](S& s, V v) { s.base.mgmt_frame_bytes = parse_positive("mgmt_frame_bytes", v); },
         [](const S& s) { return std::to_string(s.base.mgmt_frame_bytes); }},
    };
    return keys;
}

} // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& k : key_table()) {
            out.push_back(k.name);
        }
        return out;
    }();
    return names;
}

void apply_setting(ScenarioSpec& spec, const std::string& key, const std::string& value)
{
    const auto& keys = key_table();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) { return k.name == key; });
    if (it == keys.end()) {
        throw ConfigError("unknown key '" + key + "'");
    }
    try {
        it->set(spec, value);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

void apply_config_text(ScenarioSpec& spec, std::string_view text, const std::string& origin)
{
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value, got '" + t + "'");
        }
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": missing key before '='");
        }
        try {
            apply_setting(spec, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void apply_config_file(ScenarioSpec& spec, const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_config_text(spec, buf.str(), path.string());
}

std::string render_banner(const ScenarioSpec& spec)
{
    std::string out = "# dmgsim ";
    out += version();
    out += "\n# effective parameters; this file is a valid --config input\n";
    for (const auto& k : key_table()) {
        if (k.get) {
            out += k.name + "=" + k.get(spec) + "\n";
        }
    }
    return out;
}

} // namespace dmgsim
