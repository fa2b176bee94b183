#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "consensus/bootstrap.hpp"
#include "consensus/rng.hpp"

namespace consensus {

/// Y = exp(mu + sigma Z), Z standard normal.
struct LognormalDGP {
    double mu = 0.0;
    double sigma = 1.0;
};

std::vector<double> draw_dgp_sample(const LognormalDGP& dgp, std::size_t n, Rng& rng);

/// Shift used by the coverage experiment: f_theta(y) = u_{theta, -0.1}(y).
inline constexpr double kExperimentShift = 0.1;

/// E[f_theta(Y)] with f_theta(y) = (((y + shift)^(1-theta)) - 1) / (1-theta)
/// (log at theta = 1), by adaptive Gauss-Kronrod in z over [-10, 10].
double true_eu_oracle(const LognormalDGP& dgp, double theta, double shift = kExperimentShift);

/// Mask over theta_axis of points where E_a f - E_b f > 0.
std::vector<bool> true_consensus_set(const LognormalDGP& a, const LognormalDGP& b,
                                     const std::vector<double>& theta_axis,
                                     double shift = kExperimentShift);

/// Contiguous runs of the mask as closed [lo, hi] intervals of axis values.
std::vector<std::pair<double, double>> mask_intervals(const std::vector<bool>& mask,
                                                      const std::vector<double>& axis);

/// "[0.0, 1.1]", "{ }" for empty, runs joined by " U ".
std::string format_intervals(const std::vector<std::pair<double, double>>& runs);

struct CoverageCell {
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    double sigma_b = 1.0;
    double mu_b = 0.0;
};

struct ExperimentConfig {
    std::vector<CoverageCell> cells;
    LognormalDGP dgp_a{0.0, 1.0};
    std::vector<double> theta_axis;  // defaults to 0, 0.1, ..., 3
    std::size_t sims = 1000;
    std::size_t reps = 999;
    double alpha = 0.10;
    std::uint64_t seed = 0;
    WeightScheme scheme = WeightScheme::multinomial();

    /// The eighteen-cell coverage design.
    static ExperimentConfig coverage_design();
};

struct CoverageRow {
    CoverageCell cell;
    std::vector<bool> truth;
    std::string truth_label;
    std::size_t sims = 0;  // completed simulations
    std::size_t band_count = 0;
    std::size_t both_count = 0;
    std::size_t inner_count = 0;
    std::size_t outer_count = 0;

    double band_cp() const noexcept { return fraction(band_count); }
    double both_sets_cp() const noexcept { return fraction(both_count); }
    double inner_cp() const noexcept { return fraction(inner_count); }
    double outer_cp() const noexcept { return fraction(outer_count); }

private:
    double fraction(std::size_t k) const noexcept {
        return sims == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(sims);
    }
};

struct CoverageReport {
    std::vector<CoverageRow> rows;
    std::size_t sims = 0;
    std::size_t reps = 0;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    bool interrupted = false;
};

/// Per-simulation outcome, exposed for tests.
struct SimulationOutcome {
    bool band_covers = false;
    bool inner_covers = false;
    bool outer_covers = false;
};

SimulationOutcome simulate_once(const ExperimentConfig& config, std::size_t cell_index,
                                const std::vector<double>& true_diff,
                                const std::vector<bool>& truth, std::size_t sim_index);

struct ExperimentHooks {
    std::size_t workers = 1;
    const std::atomic<bool>* stop = nullptr;  // checked between simulations
    std::function<void(std::size_t cell, std::size_t done, std::size_t total)> progress;
};

CoverageReport run_coverage_experiment(const ExperimentConfig& config,
                                       const ExperimentHooks& hooks = {});

}  // namespace consensus
