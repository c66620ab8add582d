#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "dmgsim/config.hpp"

using namespace dmgsim;

namespace {

std::string error_of(ScenarioSpec& s, const std::string& text)
{
    try {
        apply_config_text(s, text, "test.cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

} // namespace

TEST_SUITE("config")
{
    TEST_CASE("an empty file keeps the defaults")
    {
        auto s = default_spec(ScenarioKind::Scenario1);
        const auto before = render_banner(s);
        apply_config_text(s, "");
        apply_config_text(s, "# only a comment\n\n   \n");
        CHECK(render_banner(s) == before);
        CHECK(s.n_runs == 30);
        CHECK(s.base.layout.bhi_duration == SimTime::ms(2));
        CHECK(s.base.horizon == SimTime::s(10));
    }

    TEST_CASE("overrides are applied and echoed in the banner")
    {
        auto s = default_spec(ScenarioKind::Custom);
        apply_config_text(s, "bhi_duration_ns = 3000000\nruns=5\nconfigs=sp1,cbap\neta_grid=0.2, 0.4\nmcs=6\n");
        CHECK(s.base.layout.bhi_duration == SimTime::ms(3));
        CHECK(s.n_runs == 5);
        REQUIRE(s.configs.size() == 2);
        CHECK(s.configs[0].key == "sp1");
        CHECK(s.configs[1].key == "cbap");
        CHECK(s.eta_grid == std::vector<double>{0.2, 0.4});
        CHECK(s.base.mcs.index == 6);
        const auto banner = render_banner(s);
        CHECK(contains(banner, "\nbhi_duration_ns=3000000\n"));
        CHECK(contains(banner, "\nruns=5\n"));
        CHECK(contains(banner, "\neta_grid=0.2,0.4\n"));
        CHECK(banner.rfind("# dmgsim ", 0) == 0);
    }

    TEST_CASE("single-value keys set a one-point grid")
    {
        auto s = default_spec(ScenarioKind::Scenario1);
        apply_setting(s, "eta", "0.3");
        apply_setting(s, "n_stas", "6");
        apply_setting(s, "rho", "0.05");
        CHECK(s.eta_grid == std::vector<double>{0.3});
        CHECK(s.n_stas_grid == std::vector<std::uint32_t>{6});
        CHECK(s.rho_grid == std::vector<double>{0.05});
    }

    TEST_CASE("out-of-range eta names the bound")
    {
        auto s = default_spec(ScenarioKind::Custom);
        const auto msg = error_of(s, "runs=3\neta=1.5\n");
        CHECK(contains(msg, "test.cfg:2:"));
        CHECK(contains(msg, "η must lie in (0,1]"));
        CHECK(contains(error_of(s, "eta_grid=0.1,0"), "η must lie in (0,1]"));
        CHECK(contains(error_of(s, "rho=-1"), "ρ must be >= 0"));
    }

    TEST_CASE("unknown keys and malformed lines are rejected")
    {
        auto s = default_spec(ScenarioKind::Custom);
        CHECK(contains(error_of(s, "bogus=1"), "unknown key 'bogus'"));
        CHECK(contains(error_of(s, "\n\nno equals sign"), "test.cfg:3: expected key=value"));
        CHECK(contains(error_of(s, "=5"), "missing key"));
        CHECK(contains(error_of(s, "runs=abc"), "expected an integer"));
        CHECK(contains(error_of(s, "runs=0"), "runs must be >= 1"));
        CHECK(contains(error_of(s, "dump_schedule=maybe"), "expected true or false"));
        CHECK(contains(error_of(s, "mcs=13"), "mcs"));
        CHECK(contains(error_of(s, "configs=sp9"), "sp9"));
        CHECK_THROWS_AS(apply_setting(s, "nope", "1"), ConfigError);
    }

    TEST_CASE("a banner is itself a valid config and round-trips")
    {
        auto s = default_spec(ScenarioKind::Scenario2);
        apply_config_text(s, "rate_grid_bps=50000000,200000000\nguard_ns=1000\nlate_stas=1\nlate_join_at_ns=5000000000\n"
                             "seed=17\ntrace=true\nqueue_capacity_bytes=123456\n");
        const auto banner = render_banner(s);
        auto t = default_spec(ScenarioKind::Custom);
        apply_config_text(t, banner, "banner");
        CHECK(render_banner(t) == banner);
        CHECK(t.kind == ScenarioKind::Scenario2);
        CHECK(t.base_seed == 17);
        CHECK(t.trace);
        CHECK(t.base.guard_time == SimTime::us(1));
        CHECK(t.rate_grid_bps == std::vector<std::uint64_t>{50'000'000, 200'000'000});
    }

    TEST_CASE("every listed key appears in the banner")
    {
        const auto banner = render_banner(default_spec(ScenarioKind::Custom));
        for (const auto& k : config_keys()) {
            if (k == "eta" || k == "rate_bps" || k == "n_stas" || k == "rho") {
                continue; // shorthands for the grid keys
            }
            CAPTURE(k);
            CHECK(contains(banner, "\n" + k + "="));
        }
    }

    TEST_CASE("config files are read from disk")
    {
        const std::filesystem::path dir = DMGSIM_TEST_TMP;
        std::filesystem::create_directories(dir);
        const auto p = dir / "cfg_read.cfg";
        {
            std::ofstream out(p);
            out << "runs=4\nseed=99\n";
        }
        auto s = default_spec(ScenarioKind::Custom);
        apply_config_file(s, p);
        CHECK(s.n_runs == 4);
        CHECK(s.base_seed == 99);
        CHECK_THROWS_AS(apply_config_file(s, dir / "does_not_exist.cfg"), ConfigError);
    }
}
