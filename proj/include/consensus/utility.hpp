#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace consensus {

/// Shifted-CRRA parameters: relative risk aversion theta >= 0 and shift s.
struct UtilityParams {
    double theta = 0.0;
    double s = 0.0;
};

/// Below this distance from 1 the log branch is used.
inline constexpr double kLogBranchTolerance = 1e-8;

/// u(y) = ((y-s)^(1-theta) - 1) / (1-theta), or ln(y-s) when theta is 1.
/// Throws DomainError when y - s <= 0.
double eval_utility(UtilityParams p, double y);

struct AxisSpec {
    double min = 0.0;
    double max = 0.0;
    double step = 1.0;
};

/// Finite (theta, s) grid. Points are the row-major cross product with theta
/// as the outer index.
class UtilityGrid {
public:
    UtilityGrid(std::vector<double> theta_axis, std::vector<double> s_axis);

    std::size_t size() const noexcept { return theta_axis_.size() * s_axis_.size(); }
    std::size_t theta_count() const noexcept { return theta_axis_.size(); }
    std::size_t s_count() const noexcept { return s_axis_.size(); }

    const std::vector<double>& theta_axis() const noexcept { return theta_axis_; }
    const std::vector<double>& s_axis() const noexcept { return s_axis_; }

    std::size_t index(std::size_t theta_idx, std::size_t s_idx) const noexcept {
        return theta_idx * s_axis_.size() + s_idx;
    }
    UtilityParams point(std::size_t i) const noexcept {
        return {theta_axis_[i / s_axis_.size()], s_axis_[i % s_axis_.size()]};
    }
    double max_shift() const noexcept { return s_axis_.back(); }

private:
    std::vector<double> theta_axis_;
    std::vector<double> s_axis_;
};

/// Inclusive arithmetic progression min, min+step, ... up to max (within 1e-9).
std::vector<double> build_axis(const AxisSpec& spec);

UtilityGrid build_grid(const AxisSpec& theta, const AxisSpec& s);
UtilityGrid build_grid(double theta_min, double theta_max, double theta_step,
                       double s_min, double s_max, double s_step);

struct EnvelopeReport {
    double moment = 0.0;      // mean of envelope^(2+delta)
    double top_share = 0.0;   // share of that sum from the top 1% of observations
    bool heavy_tail = false;  // top_share > 0.5
    std::size_t n = 0;
};

/// Pointwise envelope max_g |u_g(y)| over the grid.
double envelope(const UtilityGrid& grid, double y);

/// Empirical (2+delta)-moment of the envelope with a tail-concentration flag.
/// Advisory only.
EnvelopeReport envelope_diagnostic(const UtilityGrid& grid, std::span<const double> sample,
                                   double delta);

/// Population E[envelope(Y)^(2+delta)] for Y with density `pdf` supported on
/// (support_lower, inf). Integrates in log(y - support_lower) and closes the
/// far tail with a fitted power law, so slowly decaying tails converge.
double envelope_moment_quadrature(const UtilityGrid& grid, const std::function<double(double)>& pdf,
                                  double support_lower, double delta);

}  // namespace consensus
