#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "consensus/empirical.hpp"
#include "consensus/rng.hpp"
#include "consensus/utility.hpp"

namespace consensus {

enum class WeightKind { multinomial, bayesian };

/// Exchangeable nonnegative bootstrap weights. Both supported kinds have c = 1.
struct WeightScheme {
    WeightKind kind = WeightKind::multinomial;
    double c = 1.0;

    static WeightScheme multinomial() { return {WeightKind::multinomial, 1.0}; }
    static WeightScheme bayesian() { return {WeightKind::bayesian, 1.0}; }
};

WeightScheme parse_weight_scheme(std::string_view name);
std::string_view to_string(WeightKind kind) noexcept;

/// Multinomial: counts of n uniform draws over n cells (sum is exactly n).
/// Bayesian: iid standard exponential.
std::vector<double> draw_weights(const WeightScheme& scheme, std::size_t n, Rng& rng);
void draw_weights(const WeightScheme& scheme, Rng& rng, std::span<double> out);

/// Which sample is hypothesised to be preferred. b_over_a works with the
/// negated process.
enum class Direction { a_over_b, b_over_a };

/// R x points matrix of centered bootstrap process values, row per replicate.
class BootstrapDraws {
public:
    BootstrapDraws(std::size_t reps, std::size_t points, std::uint64_t seed);
    BootstrapDraws(std::size_t reps, std::size_t points, std::uint64_t seed,
                   std::vector<double> values);

    std::size_t reps() const noexcept { return reps_; }
    std::size_t points() const noexcept { return points_; }
    std::uint64_t seed() const noexcept { return seed_; }

    double at(std::size_t r, std::size_t g) const noexcept { return values_[r * points_ + g]; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {values_.data() + r * points_, points_};
    }
    std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * points_, points_}; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Values of point g across all replicates.
    std::vector<double> column(std::size_t g) const;

private:
    std::size_t reps_;
    std::size_t points_;
    std::uint64_t seed_;
    std::vector<double> values_;
};

struct BootstrapOptions {
    WeightScheme scheme = WeightScheme::multinomial();
    std::size_t reps = 999;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    bool unit_weights = false;  // test hook: every weight is 1
};

BootstrapDraws bootstrap_difference_process(const SamplePair& pair, const UtilityGrid& grid,
                                            const BootstrapOptions& options);

/// Same computation from precomputed utility matrices and plug-in means.
BootstrapDraws bootstrap_difference_process(const UtilityMatrix& ua, const UtilityMatrix& ub,
                                            std::span<const double> mean_a,
                                            std::span<const double> mean_b,
                                            const BootstrapOptions& options);

/// One replicate of sqrt(n_a)[(P~a - P~b) - (Wa P_na - Wb P_nb)] f / c for
/// explicitly supplied weights.
std::vector<double> difference_process_row(const UtilityMatrix& ua, const UtilityMatrix& ub,
                                           std::span<const double> mean_a,
                                           std::span<const double> mean_b,
                                           std::span<const double> weights_a,
                                           std::span<const double> weights_b, double c);

/// 1-based rank ceil(q * n), clamped to [1, n].
std::size_t quantile_rank(double q, std::size_t n);

/// Order-statistic q-quantile: the quantile_rank(q, n)-th smallest value.
double order_statistic_quantile(std::vector<double> values, double q);

/// z_0.75 - z_0.25 for the standard normal.
double normal_iqr();

struct ScaleEstimates {
    std::vector<double> sigma;       // raw IQR / normal_iqr(), may be zero
    std::vector<bool> degenerate;    // raw IQR was zero
    bool any_degenerate() const noexcept;
};

ScaleEstimates scale_estimates(const BootstrapDraws& draws);

struct CriticalValues {
    double alpha = 0.0;
    Direction direction = Direction::a_over_b;
    double sup_q = 0.0;       // (1-alpha)-quantile of per-replicate sup
    double inf_q = 0.0;       // alpha-quantile of per-replicate inf
    double abs_q = 0.0;       // (1-alpha)-quantile of per-replicate sup |T|
    double sup_q_half = 0.0;  // (1-alpha/2)-quantile of sup
    double inf_q_half = 0.0;  // (alpha/2)-quantile of inf
    std::vector<bool> subset;
};

/// Per-replicate statistics of T~ = G~ / sigma over a subset.
struct ReplicateExtremes {
    std::vector<double> sup;
    std::vector<double> inf;
    std::vector<double> abs_sup;
};

ReplicateExtremes replicate_extremes(const BootstrapDraws& draws, std::span<const double> sigma,
                                     const std::vector<bool>& subset,
                                     Direction direction = Direction::a_over_b);

CriticalValues critical_values(const BootstrapDraws& draws, std::span<const double> sigma,
                               double alpha, const std::vector<bool>& subset,
                               Direction direction = Direction::a_over_b);

/// Full-grid convenience overload.
CriticalValues critical_values(const BootstrapDraws& draws, std::span<const double> sigma,
                               double alpha, Direction direction = Direction::a_over_b);

}  // namespace consensus
