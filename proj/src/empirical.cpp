#include "consensus/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "consensus/errors.hpp"

namespace consensus {

SamplePair::SamplePair(std::vector<double> sample_a, std::vector<double> sample_b)
    : a_(std::move(sample_a)), b_(std::move(sample_b)) {
    if (a_.size() < 2 || b_.size() < 2) throw ConfigError("each sample needs at least 2 observations");
}

UtilityMatrix::UtilityMatrix(std::span<const double> sample, const UtilityGrid& grid)
    : n_(sample.size()), points_(grid.size()), values_(sample.size() * grid.size()) {
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t g = 0; g < points_; ++g)
            values_[i * points_ + g] = eval_utility(grid.point(g), sample[i]);
}

void UtilityMatrix::weighted_sums(std::span<const double> weights, std::span<double> out) const {
    if (weights.size() != n_ || out.size() != points_)
        throw ShapeError("weighted_sums: weight or output length mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    const double* v = values_.data();
    double* acc = out.data();
    for (std::size_t i = 0; i < n_; ++i) {
        const double w = weights[i];
        if (w == 0.0) continue;  // multinomial weights are mostly zero
        const double* row = v + i * points_;
        for (std::size_t g = 0; g < points_; ++g) acc[g] += w * row[g];
    }
}

std::vector<double> UtilityMatrix::means() const {
    std::vector<double> sums(points_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = values_.data() + i * points_;
        for (std::size_t g = 0; g < points_; ++g) sums[g] += row[g];
    }
    for (double& s : sums) s /= static_cast<double>(n_);
    return sums;
}

double fixed_order_mean(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double expected_utility_mean(std::span<const double> sample, UtilityParams p) {
    if (sample.empty()) throw ConfigError("expected utility of an empty sample");
    double sum = 0.0;
    for (double y : sample) sum += eval_utility(p, y);
    return sum / static_cast<double>(sample.size());
}

double sigma_floor(double diff, std::size_t n_a) noexcept {
    return 1e-12 * (1.0 + std::abs(diff) * std::sqrt(static_cast<double>(n_a)));
}

std::vector<double> eu_differences(const SamplePair& pair, const UtilityGrid& grid) {
    const auto ma = UtilityMatrix(pair.a(), grid).means();
    const auto mb = UtilityMatrix(pair.b(), grid).means();
    std::vector<double> diff(ma.size());
    for (std::size_t g = 0; g < diff.size(); ++g) diff[g] = ma[g] - mb[g];
    return diff;
}

EUDiffField make_field(std::vector<double> diff, std::span<const double> sigma, std::size_t n_a,
                       std::size_t n_b) {
    if (sigma.size() != diff.size()) throw ShapeError("sigma length does not match the grid");
    EUDiffField field;
    field.n_a = n_a;
    field.n_b = n_b;
    field.sigma_hat.resize(diff.size());
    field.t0.resize(diff.size());
    const double root_n = std::sqrt(static_cast<double>(n_a));
    for (std::size_t g = 0; g < diff.size(); ++g) {
        if (!(sigma[g] >= 0.0)) throw ConfigError("scale estimates must be nonnegative");
        field.sigma_hat[g] = std::max(sigma[g], sigma_floor(diff[g], n_a));
        field.t0[g] = root_n * diff[g] / field.sigma_hat[g];
    }
    field.diff = std::move(diff);
    return field;
}

EUDiffField eu_diff_field(const SamplePair& pair, const UtilityGrid& grid,
                          std::span<const double> sigma) {
    if (sigma.size() != grid.size()) throw ShapeError("sigma length does not match the grid");
    return make_field(eu_differences(pair, grid), sigma, pair.n_a(), pair.n_b());
}

}  // namespace consensus
