#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "consensus/analysis.hpp"
#include "consensus/bootstrap.hpp"
#include "consensus/errors.hpp"
#include "consensus/simulation.hpp"
#include "consensus/utility.hpp"

namespace py = pybind11;
using namespace consensus;

namespace {

using Axis = std::tuple<double, double, double>;

AxisSpec to_axis(const Axis& a) { return {std::get<0>(a), std::get<1>(a), std::get<2>(a)}; }

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<bool> to_array(const std::vector<bool>& v) {
    py::array_t<bool> out(static_cast<py::ssize_t>(v.size()));
    auto* p = out.mutable_data();
    for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i];
    return out;
}

py::dict test_dict(const DominanceTest& t) {
    py::dict d;
    d["reject"] = t.reject;
    d["statistic"] = t.statistic;
    d["critical_value"] = t.critical_value;
    d["argmax"] = t.argmax;
    return d;
}

py::dict run_analyze(const std::vector<double>& a, const std::vector<double>& b, const Axis& theta,
                     const Axis& s, double alpha, std::size_t reps, std::uint64_t seed,
                     const std::string& scheme, const std::string& mode, std::size_t workers) {
    AnalysisConfig cfg;
    cfg.theta = to_axis(theta);
    cfg.s = to_axis(s);
    cfg.alpha = alpha;
    cfg.reps = reps;
    cfg.seed = seed;
    cfg.scheme = parse_weight_scheme(scheme);
    cfg.mode = parse_set_mode(mode);
    cfg.workers = workers;

    AnalysisResult r = [&] {
        py::gil_scoped_release release;
        return analyze(a, b, cfg);
    }();

    std::vector<double> th(r.grid.size()), sh(r.grid.size());
    for (std::size_t g = 0; g < r.grid.size(); ++g) {
        th[g] = r.grid.point(g).theta;
        sh[g] = r.grid.point(g).s;
    }
    py::dict cv;
    cv["sup"] = r.cv.sup_q;
    cv["inf"] = r.cv.inf_q;
    cv["abs"] = r.cv.abs_q;
    cv["sup_half"] = r.cv.sup_q_half;
    cv["inf_half"] = r.cv.inf_q_half;

    py::dict out;
    out["theta"] = to_array(th);
    out["s"] = to_array(sh);
    out["diff"] = to_array(r.field.diff);
    out["sigma_hat"] = to_array(r.field.sigma_hat);
    out["t0"] = to_array(r.field.t0);
    out["b1"] = to_array(r.band.b1);
    out["b2"] = to_array(r.band.b2);
    out["inner"] = to_array(r.sets.inner);
    out["outer"] = to_array(r.sets.outer);
    out["rejected_iteration"] = r.stepdown.iteration;
    out["stepdown_critical_values"] = r.stepdown.critical_values;
    out["critical_values"] = cv;
    out["dominance"] = test_dict(r.dominance);
    out["nondominance"] = test_dict(r.nondominance);
    out["heavy_tail"] = py::make_tuple(r.envelope_a.heavy_tail, r.envelope_b.heavy_tail);
    return out;
}

py::array_t<double> run_bootstrap(const std::vector<double>& a, const std::vector<double>& b,
                                  const Axis& theta, const Axis& s, std::size_t reps, std::uint64_t seed,
                                  const std::string& scheme, std::size_t workers) {
    const auto grid = build_grid(to_axis(theta), to_axis(s));
    BootstrapOptions opts;
    opts.reps = reps;
    opts.seed = seed;
    opts.scheme = parse_weight_scheme(scheme);
    opts.workers = workers;
    std::optional<BootstrapDraws> draws;
    {
        py::gil_scoped_release release;
        draws.emplace(bootstrap_difference_process(SamplePair(a, b), grid, opts));
    }
    py::array_t<double> out({static_cast<py::ssize_t>(draws->reps()), static_cast<py::ssize_t>(draws->points())});
    std::copy(draws->values().begin(), draws->values().end(), out.mutable_data());
    return out;
}

py::list run_simulate(std::size_t sims, std::size_t reps, std::uint64_t seed, double alpha,
                      std::optional<std::vector<std::tuple<std::size_t, std::size_t, double, double>>> cells,
                      const std::string& scheme, std::size_t workers) {
    auto cfg = ExperimentConfig::coverage_design();
    cfg.sims = sims;
    cfg.reps = reps;
    cfg.seed = seed;
    cfg.alpha = alpha;
    cfg.scheme = parse_weight_scheme(scheme);
    if (cells) {
        cfg.cells.clear();
        for (const auto& [na, nb, sb, mb] : *cells) cfg.cells.push_back({na, nb, sb, mb});
    }
    CoverageReport report;
    {
        py::gil_scoped_release release;
        report = run_coverage_experiment(cfg, {workers, nullptr, {}});
    }
    py::list rows;
    for (const auto& row : report.rows) {
        py::dict d;
        d["n_a"] = row.cell.n_a;
        d["n_b"] = row.cell.n_b;
        d["sigma_b"] = row.cell.sigma_b;
        d["mu_b"] = row.cell.mu_b;
        d["true_theta_set"] = row.truth_label;
        d["band_cp"] = row.band_cp();
        d["both_sets_cp"] = row.both_sets_cp();
        d["inner_cp"] = row.inner_cp();
        d["outer_cp"] = row.outer_cp();
        d["sims"] = row.sims;
        rows.append(d);
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Inner/outer confidence sets for expected-utility rankings over CRRA grids";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);

    m.def("eval_utility", [](double theta, double s, double y) { return eval_utility({theta, s}, y); },
          py::arg("theta"), py::arg("s"), py::arg("y"));

    m.def("build_axis", [](double lo, double hi, double step) { return build_axis({lo, hi, step}); },
          py::arg("min"), py::arg("max"), py::arg("step"));

    m.def("analyze", &run_analyze, py::arg("a"), py::arg("b"), py::arg("theta") = Axis{0.0, 3.0, 0.1},
          py::arg("s") = Axis{-0.1, -0.1, 1.0}, py::arg("alpha") = 0.10, py::arg("reps") = 999,
          py::arg("seed") = 0, py::arg("scheme") = "multinomial", py::arg("mode") = "band-joint",
          py::arg("workers") = 1,
          "Full pipeline on two samples; returns per-point arrays, critical values and test results.");

    m.def("bootstrap_draws", &run_bootstrap, py::arg("a"), py::arg("b"),
          py::arg("theta") = Axis{0.0, 3.0, 0.1}, py::arg("s") = Axis{-0.1, -0.1, 1.0},
          py::arg("reps") = 999, py::arg("seed") = 0, py::arg("scheme") = "multinomial",
          py::arg("workers") = 1, "Bootstrap difference process, shape (reps, grid points).");

    m.def("true_eu", [](double mu, double sigma, double theta) { return true_eu_oracle({mu, sigma}, theta); },
          py::arg("mu"), py::arg("sigma"), py::arg("theta"),
          "E[((Y + 0.1)^(1-theta) - 1)/(1-theta)] for Y lognormal(mu, sigma).");

    m.def(
        "true_theta_set",
        [](double mu_b, double sigma_b, double mu_a, double sigma_a) {
            const auto axis = build_axis({0.0, 3.0, 0.1});
            return format_intervals(mask_intervals(true_consensus_set({mu_a, sigma_a}, {mu_b, sigma_b}, axis), axis));
        },
        py::arg("mu_b"), py::arg("sigma_b"), py::arg("mu_a") = 0.0, py::arg("sigma_a") = 1.0);

    m.def("simulate", &run_simulate, py::arg("sims") = 1000, py::arg("reps") = 999, py::arg("seed") = 0,
          py::arg("alpha") = 0.10, py::arg("cells") = py::none(), py::arg("scheme") = "multinomial",
          py::arg("workers") = 1, "Coverage experiment; cells are (n_a, n_b, sigma_b, mu_b) tuples.");
}
