#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "consensus/utility.hpp"

namespace consensus {

/// Two independent samples; sample_a is the one whose size scales the process.
class SamplePair {
public:
    SamplePair(std::vector<double> sample_a, std::vector<double> sample_b);

    const std::vector<double>& a() const noexcept { return a_; }
    const std::vector<double>& b() const noexcept { return b_; }
    std::size_t n_a() const noexcept { return a_.size(); }
    std::size_t n_b() const noexcept { return b_.size(); }
    double lambda() const noexcept {
        return static_cast<double>(a_.size()) / static_cast<double>(b_.size());
    }
    SamplePair swapped() const { return SamplePair(b_, a_); }

private:
    std::vector<double> a_;
    std::vector<double> b_;
};

/// Utility values for one sample at every grid point, laid out [obs][point]
/// so that per-point weighted sums run as independent accumulators.
class UtilityMatrix {
public:
    UtilityMatrix(std::span<const double> sample, const UtilityGrid& grid);

    std::size_t observations() const noexcept { return n_; }
    std::size_t points() const noexcept { return points_; }
    std::span<const double> row(std::size_t obs) const noexcept {
        return {values_.data() + obs * points_, points_};
    }

    /// out[g] = sum_i weights[i] * u_g(y_i), summed in observation order.
    void weighted_sums(std::span<const double> weights, std::span<double> out) const;

    /// Plug-in means per point; equals weighted_sums with unit weights over n.
    std::vector<double> means() const;

private:
    std::size_t n_ = 0;
    std::size_t points_ = 0;
    std::vector<double> values_;
};

/// Sum of values in index order divided by the count.
double fixed_order_mean(std::span<const double> values);

double expected_utility_mean(std::span<const double> sample, UtilityParams p);

/// Lower clamp for a scale estimate: 1e-12 * (1 + |diff| * sqrt(n_a)).
double sigma_floor(double diff, std::size_t n_a) noexcept;

struct EUDiffField {
    std::vector<double> diff;       // (P_na - P_nb) f
    std::vector<double> sigma_hat;  // floored scale estimate
    std::vector<double> t0;         // sqrt(n_a) * diff / sigma_hat
    std::size_t n_a = 0;
    std::size_t n_b = 0;

    std::size_t size() const noexcept { return diff.size(); }
};

/// Per-point plug-in differences (mean_a - mean_b) over the grid.
std::vector<double> eu_differences(const SamplePair& pair, const UtilityGrid& grid);

EUDiffField eu_diff_field(const SamplePair& pair, const UtilityGrid& grid,
                          std::span<const double> sigma);

/// Assemble a field from precomputed differences; applies the sigma floor.
EUDiffField make_field(std::vector<double> diff, std::span<const double> sigma, std::size_t n_a,
                       std::size_t n_b);

}  // namespace consensus
