#include <catch2/catch_amalgamated.hpp>

#include <regex>
#include <sstream>

#include "consensus/analysis.hpp"
#include "consensus/errors.hpp"
#include "consensus/io.hpp"

using namespace consensus;

TEST_CASE("read_sample handles headers, comments and blanks", "[io]") {
    std::istringstream in("income\n# comment\n1.5\n\n  2.25  # trailing\n3e2\n");
    CHECK(read_sample(in) == std::vector<double>{1.5, 2.25, 300.0});
}

TEST_CASE("read_sample errors name the line", "[io]") {
    std::istringstream bad("1.0\n2.0\nabc\n");
    try {
        read_sample(bad, "x.txt");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("x.txt:3") != std::string::npos);
    }
    std::istringstream inf("1.0\ninf\n");
    CHECK_THROWS_AS(read_sample(inf), ConfigError);
    CHECK_THROWS_AS(read_sample_file("/nonexistent/sample.txt"), ConfigError);
}

TEST_CASE("format_double round-trips", "[io]") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-3.0) == "-3");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    for (double x : {1.0 / 3.0, 2.0e-300, -123456.789, 0.30000000000000004})
        CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("results CSV round trip", "[io]") {
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<ResultRow> rows{
        {0.0, -0.1, 0.125, 0.9, 1.2, -0.05, 0.3, false, true, -1},
        {0.1, -0.1, 1.0 / 3.0, 1e-12, 4.5, 0.01, inf, true, true, 2},
    };
    std::ostringstream out;
    write_results_csv(out, rows);
    CHECK(out.str().rfind(std::string(kResultsHeader) + "\n", 0) == 0);
    std::istringstream in(out.str());
    CHECK(read_results_csv(in) == rows);

    std::istringstream wrong("theta,s\n1,2\n");
    CHECK_THROWS_AS(read_results_csv(wrong), ConfigError);
}

TEST_CASE("region SVG has one rect per grid point with matching classes", "[io]") {
    const auto grid = build_grid(0.0, 1.0, 0.5, 0.0, 0.5, 0.5);
    ConsensusSets sets;
    sets.inner = {true, false, false, false, true, false};
    sets.outer = {true, true, false, true, true, false};
    std::ostringstream out;
    write_region_svg(out, grid, sets);
    const std::string svg = out.str();
    const std::regex cell(
        R"re(<rect class="cell (\w+)" data-theta-index="(\d+)" data-s-index="(\d+)".*fill="(#[0-9a-f]{6})")re");
    std::size_t count = 0;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), cell); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        const auto g = grid.index(std::stoul(m[2]), std::stoul(m[3]));
        const std::string expected = sets.inner[g] ? "inner" : sets.outer[g] ? "outer" : "excluded";
        CHECK(m[1] == expected);
        const std::string fill = sets.inner[g] ? "#303030" : sets.outer[g] ? "#b8b8b8" : "#ffffff";
        CHECK(m[4] == fill);
        ++count;
    }
    CHECK(count == grid.size());
    sets.inner.pop_back();
    CHECK_THROWS_AS(write_region_svg(out, grid, sets), ShapeError);
}

TEST_CASE("draws CSV layout", "[io]") {
    const BootstrapDraws draws(2, 2, 0, {0.5, -1.0, 2.0, 0.25});
    std::ostringstream out;
    write_draws_csv(out, draws);
    CHECK(out.str() == "replicate,point_index,value\n0,0,0.5\n0,1,-1\n1,0,2\n1,1,0.25\n");
}

TEST_CASE("coverage CSV layout", "[io]") {
    CoverageReport report;
    report.sims = 4;
    report.reps = 99;
    report.alpha = 0.1;
    report.seed = 3;
    CoverageRow row;
    row.cell = {40, 40, 1.0, -0.3};
    row.truth_label = "[0.0, 3.0]";
    row.sims = 4;
    row.band_count = 3;
    row.both_count = 4;
    row.inner_count = 4;
    row.outer_count = 4;
    report.rows.push_back(row);
    std::ostringstream out;
    write_coverage_csv(out, report);
    CHECK(out.str() == "# seed=3 sims=4 reps=99 alpha=0.1\n" + std::string(kCoverageHeader) +
                           "\n40,40,1,-0.3,\"[0.0, 3.0]\",0.750,1.000,1.000,1.000,4\n");
}

TEST_CASE("experiment config parsing", "[io]") {
    std::istringstream in(R"({"sims": 10, "reps": 199, "seed": 5, "scheme": "bayesian",
                              "theta": {"min": 0, "max": 1, "step": 0.5},
                              "cells": [{"n_a": 30, "n_b": 40, "sigma_b": 1.2, "mu_b": 0.1}]})");
    const auto cfg = parse_experiment_config(in);
    CHECK(cfg.sims == 10);
    CHECK(cfg.reps == 199);
    CHECK(cfg.seed == 5);
    CHECK(cfg.scheme.kind == WeightKind::bayesian);
    CHECK(cfg.theta_axis == std::vector<double>{0.0, 0.5, 1.0});
    REQUIRE(cfg.cells.size() == 1);
    CHECK(cfg.cells[0].n_b == 40);

    std::istringstream defaults("{}");
    CHECK(parse_experiment_config(defaults).cells.size() == 18);

    std::istringstream broken("{\"sims\": ");
    CHECK_THROWS_AS(parse_experiment_config(broken), ConfigError);
    std::istringstream bad_cell(R"({"cells": [{"n_a": 1, "n_b": 40, "sigma_b": 1, "mu_b": 0}]})");
    CHECK_THROWS_AS(parse_experiment_config(bad_cell), ConfigError);
    std::istringstream bad_alpha(R"({"alpha": 1.5})");
    CHECK_THROWS_AS(parse_experiment_config(bad_alpha), ConfigError);
}

TEST_CASE("analysis config parsing and validation", "[io]") {
    std::istringstream in(R"({"sample_a": "a.txt", "sample_b": "b.txt", "alpha": 0.05,
                              "s": {"min": -0.5, "max": 0.5, "step": 0.25}, "mode": "one-sided",
                              "dump_draws": true})");
    const auto cfg = parse_analysis_config(in);
    CHECK(cfg.sample_a_path == "a.txt");
    CHECK(cfg.alpha == 0.05);
    CHECK(cfg.s.step == 0.25);
    CHECK(cfg.mode == SetMode::mtp_one_sided);
    CHECK(cfg.dump_draws);
    CHECK_NOTHROW(cfg.validate());

    auto bad = cfg;
    bad.alpha = 0.6;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.reps = 50;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.sample_b_path.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("find_domain_violation reports the first offending observation", "[io]") {
    const auto grid = build_grid(0.0, 1.0, 0.5, 0.0, 1.0, 0.5);
    const std::vector<double> sample{3.0, 2.0, 0.8, 0.1};
    const auto v = find_domain_violation(sample, 'b', grid);
    REQUIRE(v);
    CHECK(v->sample == 'b');
    CHECK(v->observation == 2);
    CHECK(v->y == 0.8);
    CHECK(v->point.s == 1.0);
    CHECK_FALSE(find_domain_violation({3.0, 4.0}, 'a', grid));
}
