#include "consensus/simulation.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "consensus/empirical.hpp"
#include "consensus/errors.hpp"
#include "consensus/inference.hpp"
#include "consensus/parallel.hpp"
#include "consensus/utility.hpp"

namespace consensus {

std::vector<double> draw_dgp_sample(const LognormalDGP& dgp, std::size_t n, Rng& rng) {
    if (!(dgp.sigma > 0.0)) throw ConfigError("lognormal sigma must be positive");
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& y : out) y = std::exp(dgp.mu + dgp.sigma * z(rng));
    return out;
}

double true_eu_oracle(const LognormalDGP& dgp, double theta, double shift) {
    using boost::math::quadrature::gauss_kronrod;
    const UtilityParams p{theta, -shift};
    const double inv_root_2pi = boost::math::constants::one_div_root_two_pi<double>();
    auto integrand = [&](double z) {
        return eval_utility(p, std::exp(dgp.mu + dgp.sigma * z)) * inv_root_2pi * std::exp(-0.5 * z * z);
    };
    double err = 0.0;
    double l1 = 0.0;
    const double value = gauss_kronrod<double, 61>::integrate(integrand, -10.0, 10.0, 20, 1e-12, &err, &l1);
    if (!std::isfinite(value) || err > 1e-8 * std::max(1.0, l1)) {
        std::ostringstream os;
        os << "expected-utility quadrature did not converge: mu=" << dgp.mu << " sigma=" << dgp.sigma
           << " theta=" << theta << " error estimate=" << err;
        throw QuadratureError(os.str());
    }
    return value;
}

std::vector<bool> true_consensus_set(const LognormalDGP& a, const LognormalDGP& b,
                                     const std::vector<double>& theta_axis, double shift) {
    std::vector<bool> mask(theta_axis.size());
    for (std::size_t i = 0; i < theta_axis.size(); ++i)
        mask[i] = true_eu_oracle(a, theta_axis[i], shift) - true_eu_oracle(b, theta_axis[i], shift) > 0.0;
    return mask;
}

std::vector<std::pair<double, double>> mask_intervals(const std::vector<bool>& mask,
                                                      const std::vector<double>& axis) {
    if (mask.size() != axis.size()) throw ShapeError("mask and axis lengths differ");
    std::vector<std::pair<double, double>> runs;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        if (i > 0 && mask[i - 1])
            runs.back().second = axis[i];
        else
            runs.emplace_back(axis[i], axis[i]);
    }
    return runs;
}

std::string format_intervals(const std::vector<std::pair<double, double>>& runs) {
    if (runs.empty()) return "{ }";
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    for (std::size_t k = 0; k < runs.size(); ++k) {
        if (k) os << " U ";
        os << '[' << runs[k].first << ", " << runs[k].second << ']';
    }
    return os.str();
}

ExperimentConfig ExperimentConfig::coverage_design() {
    ExperimentConfig cfg;
    for (std::size_t n : {40u, 100u})
        for (double sb : {0.7, 1.0, 1.3})
            for (double mb : {-0.3, 0.0, 0.3}) cfg.cells.push_back({n, n, sb, mb});
    cfg.theta_axis = build_axis({0.0, 3.0, 0.1});
    return cfg;
}

SimulationOutcome simulate_once(const ExperimentConfig& config, std::size_t cell_index,
                                const std::vector<double>& true_diff,
                                const std::vector<bool>& truth, std::size_t sim_index) {
    const auto& cell = config.cells.at(cell_index);
    auto rng_a = substream(config.seed, {stream_tag::data, cell_index, sim_index, stream_tag::sample_a});
    auto rng_b = substream(config.seed, {stream_tag::data, cell_index, sim_index, stream_tag::sample_b});
    const auto a = draw_dgp_sample(config.dgp_a, cell.n_a, rng_a);
    const auto b = draw_dgp_sample({cell.mu_b, cell.sigma_b}, cell.n_b, rng_b);

    const UtilityGrid grid(config.theta_axis, {-kExperimentShift});
    const UtilityMatrix ua(a, grid);
    const UtilityMatrix ub(b, grid);
    const auto ma = ua.means();
    const auto mb = ub.means();

    BootstrapOptions opts;
    opts.scheme = config.scheme;
    opts.reps = config.reps;
    opts.seed = substream(config.seed, {stream_tag::bootstrap, cell_index, sim_index})();
    const auto draws = bootstrap_difference_process(ua, ub, ma, mb, opts);
    const auto scales = scale_estimates(draws);

    std::vector<double> diff(grid.size());
    for (std::size_t g = 0; g < diff.size(); ++g) diff[g] = ma[g] - mb[g];
    const auto field = make_field(std::move(diff), scales.sigma, cell.n_a, cell.n_b);
    const auto cv = critical_values(draws, field.sigma_hat, config.alpha);
    const auto band = uniform_band(field, cv, BandVariant::symmetric);
    const auto sets = sets_from_band(band);

    SimulationOutcome out{true, true, true};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (!(band.b1[g] <= true_diff[g] && true_diff[g] <= band.b2[g])) out.band_covers = false;
        if (sets.inner[g] && !truth[g]) out.inner_covers = false;
        if (truth[g] && !sets.outer[g]) out.outer_covers = false;
    }
    return out;
}

CoverageReport run_coverage_experiment(const ExperimentConfig& config, const ExperimentHooks& hooks) {
    if (config.sims < 1) throw ConfigError("experiment needs sims >= 1");
    if (config.reps < 4) throw ConfigError("experiment needs reps >= 4");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (config.theta_axis.empty()) throw ConfigError("experiment theta axis is empty");

    CoverageReport report;
    report.sims = config.sims;
    report.reps = config.reps;
    report.alpha = config.alpha;
    report.seed = config.seed;

    const auto stopped = [&] { return hooks.stop && hooks.stop->load(std::memory_order_relaxed); };

    for (std::size_t c = 0; c < config.cells.size(); ++c) {
        if (stopped()) {
            report.interrupted = true;
            break;
        }
        const auto& cell = config.cells[c];
        const LognormalDGP dgp_b{cell.mu_b, cell.sigma_b};
        std::vector<double> true_diff(config.theta_axis.size());
        std::vector<bool> truth(config.theta_axis.size());
        for (std::size_t i = 0; i < true_diff.size(); ++i) {
            true_diff[i] = true_eu_oracle(config.dgp_a, config.theta_axis[i]) -
                           true_eu_oracle(dgp_b, config.theta_axis[i]);
            truth[i] = true_diff[i] > 0.0;
        }

        std::vector<std::optional<SimulationOutcome>> outcomes(config.sims);
        std::atomic<std::size_t> done{0};
        parallel_for(config.sims, std::max<std::size_t>(1, hooks.workers), [&](std::size_t s) {
            if (stopped()) return;
            outcomes[s] = simulate_once(config, c, true_diff, truth, s);
            const auto k = done.fetch_add(1) + 1;
            if (hooks.progress) hooks.progress(c, k, config.sims);
        });

        CoverageRow row;
        row.cell = cell;
        row.truth = truth;
        row.truth_label = format_intervals(mask_intervals(truth, config.theta_axis));
        for (const auto& o : outcomes) {
            if (!o) continue;
            ++row.sims;
            row.band_count += o->band_covers ? 1 : 0;
            row.both_count += (o->inner_covers && o->outer_covers) ? 1 : 0;
            row.inner_count += o->inner_covers ? 1 : 0;
            row.outer_count += o->outer_covers ? 1 : 0;
        }
        report.rows.push_back(std::move(row));
        if (report.rows.back().sims < config.sims) {
            report.interrupted = true;
            break;
        }
    }
    return report;
}

}  // namespace consensus
