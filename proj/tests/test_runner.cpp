#include "dispersive/errors.hpp"
#include "dispersive/runner.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace dispersive;
namespace fs = std::filesystem;

namespace {

const char* toy_periodicity = R"({
  "name": "toy",
  "experiment": "periodicity",
  "interval": [-1, 1],
  "nodes": 30,
  "stencil": 7,
  "shape": 0.1,
  "model": {"family": "bbm", "alpha": 1, "beta": 0.05, "mu": 1e-4},
  "forcing": {"kind": "sin-tanh"},
  "dt": 0.001,
  "t_max": 0.3,
  "probes": [-0.5, 0.0, 1.0],
  "snapshot_stride": 50
})";

std::string read_file(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::size_t line_count(const fs::path& p)
{
    const std::string s = read_file(p);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        std::random_device rd;
        path = fs::temp_directory_path() / ("dispersive-test-" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string replace(std::string s, const std::string& from, const std::string& to)
{
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}

} // namespace

TEST_CASE("bundled presets")
{
    const auto names = preset_names();
    std::vector<std::string> want{"table1", "fig1"};
    for (int i = 2; i <= 10; ++i)
        want.push_back("fig" + std::to_string(i));
    for (const auto& w : want)
        CHECK(std::find(names.begin(), names.end(), w) != names.end());
    CHECK(names.size() == want.size());

    for (const auto& n : names) {
        INFO(n);
        const RunConfig cfg = load_config(n);
        CHECK(cfg.name == n);
        CHECK(cfg.source_text == *preset_text(n));
    }

    const RunConfig t1 = load_config("table1");
    CHECK(t1.experiment == Experiment::validate_soliton);
    CHECK(t1.soliton->speed_c == 0.5);
    CHECK(t1.soliton->beta == 6.0);
    CHECK(t1.soliton->gamma_disp == 1.0);
    CHECK(t1.linearization == Linearization::initial);

    const RunConfig f10 = load_config("fig10");
    CHECK(f10.model.family == Family::kdv_damped);
    CHECK(f10.model.gamma_damp == 4.5);
    CHECK(f10.periodicity_tol == 0.05);
    CHECK(f10.probes.size() == 6);

    CHECK_THROWS_AS(load_config("fig11"), ConfigError);
}

TEST_CASE("config parsing rejects bad documents")
{
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config("[]"), ConfigError);
    const std::string base = toy_periodicity;
    CHECK_NOTHROW(parse_config(base));
    CHECK_THROWS_AS(parse_config(replace(base, "\"t_max\"", "\"tmax\"")), ConfigError);
    CHECK_THROWS_AS(parse_config(replace(base, "\"dt\": 0.001,", "")), ConfigError);
    CHECK_THROWS_AS(parse_config(replace(base, "\"stencil\": 7", "\"stencil\": 3")), ConfigError);
    CHECK_THROWS_AS(parse_config(replace(base, "\"stencil\": 7", "\"stencil\": 31")), ConfigError);
    CHECK_THROWS_AS(parse_config(replace(base, "\"shape\": 0.1", "\"shape\": -0.1")), ConfigError);
    CHECK_THROWS_AS(parse_config(replace(base, "\"bbm\"", "\"kdv-classic\"")), ConfigError);
    CHECK_THROWS_AS(parse_config(replace(base, "\"mu\": 1e-4", "\"mu\": 1e-4, \"delta\": 1")),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(replace(base, "[-0.5, 0.0, 1.0]", "[-0.5, 2.0]")), ConfigError);
    CHECK_THROWS_AS(parse_config(replace(base, "\"sin-tanh\"", "\"square\"")), ConfigError);
    CHECK_THROWS_AS(parse_config(replace(base, "\"periodicity\"", "\"spectrum\", \"extra\": 1")),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(replace(base, "[-1, 1]", "[1, -1]")), ConfigError);

    const auto prop = parse_config(replace(base, "\"shape\": 0.1", "\"shape\": 2, \"shape_mode\": \"proportional\""));
    CHECK(discretize(prop).kernel.shape() == doctest::Approx(2.0 * 2.0 / 29.0));
}

TEST_CASE("tabulated forcing from a config")
{
    const std::string text = replace(toy_periodicity, R"({"kind": "sin-tanh"})",
                                     R"({"kind": "custom-table", "period": 0.1,
                                         "samples": [[0, 0], [0.1, 1], [0.3, 0]]})");
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.forcing.kind() == ForcingSpec::Kind::custom_table);
    const auto res = run_periodicity(cfg);
    const auto& left = res.record.probe_series;
    CHECK(left.size() == 3);
}

TEST_CASE("soliton validation with t_max = 0 reports no rows")
{
    std::string text(*preset_text("table1"));
    text = replace(text, "\"t_max\": 5", "\"t_max\": 0");
    const auto res = run_validate_soliton(parse_config(text));
    CHECK(res.errors.empty());
}

TEST_CASE("short soliton run is accurate and skips report times beyond t_max")
{
    std::string text(*preset_text("table1"));
    text = replace(text, "\"t_max\": 5", "\"t_max\": 0.2");
    text = replace(text, "\"report_times\": [1, 2, 3, 4, 5]", "\"report_times\": [0.1, 0.2, 3]");
    const auto res = run_validate_soliton(parse_config(text));
    REQUIRE(res.errors.size() == 2);
    CHECK(res.errors[0].t == 0.1);
    CHECK(res.errors[1].linf < 1e-4);
    CHECK(res.errors[1].l2 < res.errors[1].linf * std::sqrt(40.0));
}

TEST_CASE("toy advection spectrum")
{
    const std::string text = R"({
      "experiment": "spectrum", "interval": [0, 1], "nodes": 8, "stencil": 5, "shape": 0.5,
      "model": {"family": "kdv", "alpha": 1}, "forcing": {"kind": "zero", "period": 0.1},
      "dt": 0.01, "t_max": 0.1
    })";
    const auto rep = run_spectrum(parse_config(text));
    CHECK(rep.scaled_eigenvalues.size() == 8);
}

TEST_CASE("zero forcing produces zero probes")
{
    const std::string text =
        replace(toy_periodicity, R"({"kind": "sin-tanh"})", R"({"kind": "zero", "period": 0.1})");
    const auto res = run_periodicity(parse_config(text));
    for (const auto& s : res.record.probe_series)
        for (double v : s)
            CHECK(v == 0.0);
    for (const auto& p : res.report.probes)
        CHECK(*p.onset_time == 0.0);
}

TEST_CASE("periodicity run writes its outputs and can be replayed from meta.json")
{
    TempDir tmp;
    const RunConfig cfg = parse_config(toy_periodicity);
    const auto first = run_periodicity(cfg, {tmp.path / "a", true});

    for (const char* f : {"meta.json", "probes.csv", "snapshots.csv", "periodicity.json", "D1.txt", "D2.txt"})
        CHECK(fs::exists(tmp.path / "a" / f));
    CHECK_FALSE(fs::exists(tmp.path / "a" / "D3.txt"));
    CHECK(line_count(tmp.path / "a" / "probes.csv") == 302);
    CHECK(line_count(tmp.path / "a" / "snapshots.csv") == 8);
    CHECK(line_count(tmp.path / "a" / "D1.txt") == 30 * 7);

    const auto meta = nlohmann::json::parse(read_file(tmp.path / "a" / "meta.json"));
    CHECK(meta["config_source"].get<std::string>() == std::string(toy_periodicity));
    CHECK(meta["resolved"]["steps"] == 300);
    CHECK(meta["resolved"]["neumann_row"] == false);
    CHECK(meta["resolved"]["probes"][2]["node"] == 29);

    const auto probes_header = read_file(tmp.path / "a" / "probes.csv").substr(0, 2);
    CHECK(probes_header == "t,");

    const RunConfig again = parse_config(meta["config_source"].get<std::string>());
    const auto second = run_periodicity(again, {tmp.path / "b", false});
    CHECK(first.record.probe_series == second.record.probe_series);
    CHECK(read_file(tmp.path / "a" / "probes.csv") == read_file(tmp.path / "b" / "probes.csv"));
}

TEST_CASE("run_experiment dispatches and writes spectrum files")
{
    TempDir tmp;
    const std::string text = R"({
      "name": "spec", "experiment": "spectrum", "interval": [0, 1], "nodes": 10, "stencil": 5,
      "shape": 0.3, "model": {"family": "kdv", "alpha": 1, "mu": 1e-4},
      "dt": 0.001, "t_max": 0.01
    })";
    run_experiment(parse_config(text), {tmp.path, false});
    CHECK(line_count(tmp.path / "spectrum.csv") == 11);
    const auto j = nlohmann::json::parse(read_file(tmp.path / "spectrum.json"));
    CHECK(j["eigenvalue_count"] == 10);
}

TEST_CASE("soliton spectrum leaves the stability region as dt grows")
{
    RunConfig cfg = load_config("fig1");
    double prev = 0.0;
    bool last_stable = true;
    for (double dt : {0.001, 0.01, 0.1, 1.0}) {
        cfg.dt = dt;
        const auto rep = run_spectrum(cfg);
        CHECK(rep.max_stability_modulus >= prev);
        prev = rep.max_stability_modulus;
        last_stable = rep.all_stable;
    }
    CHECK_FALSE(last_stable);
}
