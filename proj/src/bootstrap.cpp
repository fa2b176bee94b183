#include "consensus/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <boost/math/distributions/normal.hpp>

#include "consensus/errors.hpp"
#include "consensus/parallel.hpp"

namespace consensus {

WeightScheme parse_weight_scheme(std::string_view name) {
    if (name == "multinomial") return WeightScheme::multinomial();
    if (name == "bayesian") return WeightScheme::bayesian();
    throw ConfigError("unknown bootstrap scheme '" + std::string(name) +
                      "' (expected multinomial or bayesian)");
}

std::string_view to_string(WeightKind kind) noexcept {
    return kind == WeightKind::multinomial ? "multinomial" : "bayesian";
}

void draw_weights(const WeightScheme& scheme, Rng& rng, std::span<double> out) {
    const std::size_t n = out.size();
    if (scheme.kind == WeightKind::multinomial) {
        std::fill(out.begin(), out.end(), 0.0);
        std::uniform_int_distribution<std::size_t> cell(0, n - 1);
        for (std::size_t k = 0; k < n; ++k) out[cell(rng)] += 1.0;
    } else {
        std::exponential_distribution<double> exp1(1.0);
        for (auto& w : out) {
            do {
                w = exp1(rng);
            } while (w == 0.0);
        }
    }
}

std::vector<double> draw_weights(const WeightScheme& scheme, std::size_t n, Rng& rng) {
    if (n == 0) throw ConfigError("draw_weights needs n >= 1");
    std::vector<double> w(n);
    draw_weights(scheme, rng, w);
    return w;
}

BootstrapDraws::BootstrapDraws(std::size_t reps, std::size_t points, std::uint64_t seed)
    : reps_(reps), points_(points), seed_(seed), values_(reps * points, 0.0) {}

BootstrapDraws::BootstrapDraws(std::size_t reps, std::size_t points, std::uint64_t seed,
                               std::vector<double> values)
    : reps_(reps), points_(points), seed_(seed), values_(std::move(values)) {
    if (values_.size() != reps * points) throw ShapeError("draw matrix has the wrong size");
}

std::vector<double> BootstrapDraws::column(std::size_t g) const {
    std::vector<double> col(reps_);
    for (std::size_t r = 0; r < reps_; ++r) col[r] = at(r, g);
    return col;
}

namespace {

double weight_mean(std::span<const double> w) { return fixed_order_mean(w); }

void fill_process_row(const UtilityMatrix& ua, const UtilityMatrix& ub,
                      std::span<const double> mean_a, std::span<const double> mean_b,
                      std::span<const double> wa, std::span<const double> wb, double c,
                      std::span<double> sum_a, std::span<double> sum_b, std::span<double> out) {
    ua.weighted_sums(wa, sum_a);
    ub.weighted_sums(wb, sum_b);
    const double na = static_cast<double>(ua.observations());
    const double nb = static_cast<double>(ub.observations());
    const double bar_a = weight_mean(wa);
    const double bar_b = weight_mean(wb);
    const double root_na = std::sqrt(na);
    for (std::size_t g = 0; g < out.size(); ++g) {
        const double boot = sum_a[g] / na - sum_b[g] / nb;
        const double centre = bar_a * mean_a[g] - bar_b * mean_b[g];
        out[g] = root_na * (boot - centre) / c;
    }
}

void check_inputs(const UtilityMatrix& ua, const UtilityMatrix& ub, std::span<const double> mean_a,
                  std::span<const double> mean_b) {
    if (ua.points() != ub.points() || mean_a.size() != ua.points() || mean_b.size() != ua.points())
        throw ShapeError("bootstrap inputs disagree on the number of grid points");
}

}  // namespace

std::vector<double> difference_process_row(const UtilityMatrix& ua, const UtilityMatrix& ub,
                                           std::span<const double> mean_a,
                                           std::span<const double> mean_b,
                                           std::span<const double> weights_a,
                                           std::span<const double> weights_b, double c) {
    check_inputs(ua, ub, mean_a, mean_b);
    std::vector<double> sum_a(ua.points()), sum_b(ua.points()), out(ua.points());
    fill_process_row(ua, ub, mean_a, mean_b, weights_a, weights_b, c, sum_a, sum_b, out);
    return out;
}

BootstrapDraws bootstrap_difference_process(const UtilityMatrix& ua, const UtilityMatrix& ub,
                                            std::span<const double> mean_a,
                                            std::span<const double> mean_b,
                                            const BootstrapOptions& options) {
    check_inputs(ua, ub, mean_a, mean_b);
    if (options.reps < 1) throw ConfigError("bootstrap needs at least one replicate");
    if (!(options.scheme.c > 0.0)) throw ConfigError("weight normalisation c must be positive");
    const std::size_t points = ua.points();
    BootstrapDraws draws(options.reps, points, options.seed);

    const std::size_t workers = std::max<std::size_t>(1, options.workers);
    const std::size_t chunks = std::min(workers, options.reps);
    parallel_for(chunks, workers, [&](std::size_t chunk) {
        const std::size_t begin = options.reps * chunk / chunks;
        const std::size_t end = options.reps * (chunk + 1) / chunks;
        std::vector<double> wa(ua.observations(), 1.0), wb(ub.observations(), 1.0);
        std::vector<double> sum_a(points), sum_b(points);
        for (std::size_t r = begin; r < end; ++r) {
            if (!options.unit_weights) {
                auto rng_a = substream(options.seed, {stream_tag::bootstrap, r, stream_tag::sample_a});
                auto rng_b = substream(options.seed, {stream_tag::bootstrap, r, stream_tag::sample_b});
                draw_weights(options.scheme, rng_a, wa);
                draw_weights(options.scheme, rng_b, wb);
            }
            fill_process_row(ua, ub, mean_a, mean_b, wa, wb, options.scheme.c, sum_a, sum_b,
                             draws.row(r));
        }
    });
    return draws;
}

BootstrapDraws bootstrap_difference_process(const SamplePair& pair, const UtilityGrid& grid,
                                            const BootstrapOptions& options) {
    const UtilityMatrix ua(pair.a(), grid);
    const UtilityMatrix ub(pair.b(), grid);
    const auto ma = ua.means();
    const auto mb = ub.means();
    return bootstrap_difference_process(ua, ub, ma, mb, options);
}

std::size_t quantile_rank(double q, std::size_t n) {
    if (n == 0) throw ConfigError("quantile of an empty set");
    const double raw = std::ceil(q * static_cast<double>(n) - 1e-9);
    if (raw < 1.0) return 1;
    if (raw > static_cast<double>(n)) return n;
    return static_cast<std::size_t>(raw);
}

double order_statistic_quantile(std::vector<double> values, double q) {
    const std::size_t k = quantile_rank(q, values.size()) - 1;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
    return values[k];
}

double normal_iqr() {
    static const double iqr = [] {
        const boost::math::normal standard;
        return boost::math::quantile(standard, 0.75) - boost::math::quantile(standard, 0.25);
    }();
    return iqr;
}

bool ScaleEstimates::any_degenerate() const noexcept {
    return std::find(degenerate.begin(), degenerate.end(), true) != degenerate.end();
}

ScaleEstimates scale_estimates(const BootstrapDraws& draws) {
    if (draws.reps() < 4) throw ConfigError("scale estimates need at least 4 replicates");
    ScaleEstimates out;
    out.sigma.resize(draws.points());
    out.degenerate.resize(draws.points());
    const double divisor = normal_iqr();
    for (std::size_t g = 0; g < draws.points(); ++g) {
        auto col = draws.column(g);
        const double q75 = order_statistic_quantile(col, 0.75);
        const double q25 = order_statistic_quantile(std::move(col), 0.25);
        const double iqr = q75 - q25;
        out.degenerate[g] = !(iqr > 0.0);
        out.sigma[g] = std::max(iqr, 0.0) / divisor;
    }
    return out;
}

ReplicateExtremes replicate_extremes(const BootstrapDraws& draws, std::span<const double> sigma,
                                     const std::vector<bool>& subset, Direction direction) {
    if (sigma.size() != draws.points() || subset.size() != draws.points())
        throw ShapeError("sigma or subset length does not match the draw matrix");
    std::vector<std::size_t> members;
    for (std::size_t g = 0; g < subset.size(); ++g)
        if (subset[g]) members.push_back(g);
    if (members.empty()) throw ConfigError("critical values need a nonempty subset");
    for (auto g : members)
        if (!(sigma[g] > 0.0)) throw ConfigError("scale estimates must be positive");

    const double sign = direction == Direction::a_over_b ? 1.0 : -1.0;
    ReplicateExtremes ex;
    ex.sup.resize(draws.reps());
    ex.inf.resize(draws.reps());
    ex.abs_sup.resize(draws.reps());
    for (std::size_t r = 0; r < draws.reps(); ++r) {
        const auto row = draws.row(r);
        double hi = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity();
        double ab = 0.0;
        for (auto g : members) {
            const double t = sign * row[g] / sigma[g];
            hi = std::max(hi, t);
            lo = std::min(lo, t);
            ab = std::max(ab, std::abs(t));
        }
        ex.sup[r] = hi;
        ex.inf[r] = lo;
        ex.abs_sup[r] = ab;
    }
    return ex;
}

CriticalValues critical_values(const BootstrapDraws& draws, std::span<const double> sigma,
                               double alpha, const std::vector<bool>& subset, Direction direction) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    auto ex = replicate_extremes(draws, sigma, subset, direction);
    CriticalValues cv;
    cv.alpha = alpha;
    cv.direction = direction;
    cv.subset = subset;
    cv.sup_q = order_statistic_quantile(ex.sup, 1.0 - alpha);
    cv.sup_q_half = order_statistic_quantile(std::move(ex.sup), 1.0 - alpha / 2.0);
    cv.inf_q = order_statistic_quantile(ex.inf, alpha);
    cv.inf_q_half = order_statistic_quantile(std::move(ex.inf), alpha / 2.0);
    cv.abs_q = order_statistic_quantile(std::move(ex.abs_sup), 1.0 - alpha);
    return cv;
}

CriticalValues critical_values(const BootstrapDraws& draws, std::span<const double> sigma,
                               double alpha, Direction direction) {
    return critical_values(draws, sigma, alpha, std::vector<bool>(draws.points(), true), direction);
}

}  // namespace consensus
