#include "consensus/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "consensus/errors.hpp"

namespace consensus {

namespace {

std::string domain_message(double theta, double s, double y) {
    std::ostringstream os;
    os.precision(17);
    os << "utility undefined: y - s <= 0 at theta=" << theta << ", s=" << s << ", y=" << y;
    return os.str();
}

}  // namespace

DomainError::DomainError(double theta, double s, double y)
    : std::domain_error(domain_message(theta, s, y)), theta_(theta), s_(s), y_(y) {}

double eval_utility(UtilityParams p, double y) {
    const double x = y - p.s;
    if (!(x > 0.0)) throw DomainError(p.theta, p.s, y);
    const double e = 1.0 - p.theta;
    if (std::abs(e) <= kLogBranchTolerance) return std::log(x);
    return std::expm1(e * std::log(x)) / e;
}

UtilityGrid::UtilityGrid(std::vector<double> theta_axis, std::vector<double> s_axis)
    : theta_axis_(std::move(theta_axis)), s_axis_(std::move(s_axis)) {
    if (theta_axis_.empty() || s_axis_.empty()) throw ConfigError("utility grid is empty");
    for (std::size_t i = 1; i < theta_axis_.size(); ++i)
        if (!(theta_axis_[i] > theta_axis_[i - 1]))
            throw ConfigError("theta axis must be strictly increasing");
    for (std::size_t i = 1; i < s_axis_.size(); ++i)
        if (!(s_axis_[i] > s_axis_[i - 1])) throw ConfigError("s axis must be strictly increasing");
    if (theta_axis_.front() < 0.0) throw ConfigError("theta must be nonnegative");
    for (double v : theta_axis_)
        if (!std::isfinite(v)) throw ConfigError("theta axis contains a non-finite value");
    for (double v : s_axis_)
        if (!std::isfinite(v)) throw ConfigError("s axis contains a non-finite value");
}

std::vector<double> build_axis(const AxisSpec& spec) {
    constexpr double tol = 1e-9;
    if (!(spec.step > 0.0) || !std::isfinite(spec.step))
        throw ConfigError("grid step must be positive");
    if (!(spec.min <= spec.max)) throw ConfigError("grid min exceeds max");
    const double span = (spec.max - spec.min) / spec.step;
    const auto whole = static_cast<std::size_t>(std::floor(span + tol));
    std::vector<double> axis;
    axis.reserve(whole + 1);
    for (std::size_t k = 0; k <= whole; ++k) axis.push_back(spec.min + static_cast<double>(k) * spec.step);
    // Land exactly on max when it is a multiple of step.
    if (std::abs(span - std::round(span)) <= tol) axis.back() = spec.max;
    return axis;
}

UtilityGrid build_grid(const AxisSpec& theta, const AxisSpec& s) {
    return UtilityGrid(build_axis(theta), build_axis(s));
}

UtilityGrid build_grid(double theta_min, double theta_max, double theta_step, double s_min,
                       double s_max, double s_step) {
    return build_grid(AxisSpec{theta_min, theta_max, theta_step}, AxisSpec{s_min, s_max, s_step});
}

double envelope(const UtilityGrid& grid, double y) {
    double env = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g)
        env = std::max(env, std::abs(eval_utility(grid.point(g), y)));
    return env;
}

EnvelopeReport envelope_diagnostic(const UtilityGrid& grid, std::span<const double> sample,
                                   double delta) {
    if (sample.empty()) throw ConfigError("envelope diagnostic needs a nonempty sample");
    if (!(delta >= 0.0)) throw ConfigError("envelope delta must be nonnegative");
    const double power = 2.0 + delta;
    std::vector<double> terms;
    terms.reserve(sample.size());
    for (double y : sample) terms.push_back(std::pow(envelope(grid, y), power));

    EnvelopeReport report;
    report.n = sample.size();
    double total = 0.0;
    for (double t : terms) total += t;
    report.moment = total / static_cast<double>(terms.size());

    const auto top = std::max<std::size_t>(1, (terms.size() + 99) / 100);
    std::partial_sort(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(top), terms.end(),
                      std::greater<>());
    double top_sum = 0.0;
    for (std::size_t i = 0; i < top; ++i) top_sum += terms[i];
    report.top_share = total > 0.0 ? top_sum / total : 0.0;
    report.heavy_tail = report.top_share > 0.5;
    return report;
}

double envelope_moment_quadrature(const UtilityGrid& grid, const std::function<double(double)>& pdf,
                                  double support_lower, double delta) {
    using boost::math::quadrature::gauss_kronrod;
    const double power = 2.0 + delta;
    // Far in the tail envelope^power overflows while pdf underflows, so the
    // product is formed in logs.
    auto log_integrand = [&](double y) {
        const double f = pdf(y);
        const double e = envelope(grid, y);
        if (!(f > 0.0) || !(e > 0.0)) return -std::numeric_limits<double>::infinity();
        return power * std::log(e) + std::log(f);
    };
    auto integrand = [&](double y) { return std::exp(log_integrand(y)); };

    // Body: y in (lower, lower + 1].
    double body_err = 0.0;
    const double body = gauss_kronrod<double, 61>::integrate(integrand, support_lower,
                                                             support_lower + 1.0, 15, 1e-10,
                                                             &body_err);
    // Middle: y = lower + e^u, u in [0, kCut].
    constexpr double kCut = 60.0;
    constexpr double kProbe = 10.0;
    auto log_tail = [&](double u) { return log_integrand(support_lower + std::exp(u)) + u; };
    auto tail_integrand = [&](double u) { return std::exp(log_tail(u)); };
    double mid_err = 0.0;
    const double mid = gauss_kronrod<double, 61>::integrate(tail_integrand, 0.0, kCut, 20, 1e-12, &mid_err);

    // Beyond e^kCut the density may underflow before the integrand has decayed,
    // so the remainder is taken from the power law fitted over [kCut - kProbe, kCut].
    const double l_hi = log_tail(kCut);
    const double slope = (l_hi - log_tail(kCut - kProbe)) / kProbe;
    double rest = 0.0;
    if (std::isfinite(l_hi)) {
        if (!(slope < 0.0))
            throw QuadratureError("envelope moment diverges: tail does not decay (log slope " +
                                  std::to_string(slope) + ")");
        rest = std::exp(l_hi) / -slope;
    }

    const double total = body + mid + rest;
    const double err = body_err + mid_err;
    if (!std::isfinite(total) || err > 1e-8 * std::abs(total) + 1e-12)
        throw QuadratureError("envelope moment quadrature did not converge (error estimate " +
                              std::to_string(err) + ")");
    return total;
}

}  // namespace consensus
