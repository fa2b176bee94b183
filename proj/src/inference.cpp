#include "consensus/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "consensus/errors.hpp"

namespace consensus {

std::size_t RejectionField::rejected_count() const noexcept {
    return static_cast<std::size_t>(std::count(rejected.begin(), rejected.end(), true));
}

namespace {

double directed(double t, Direction direction) {
    return direction == Direction::a_over_b ? t : -t;
}

void check_cv(const EUDiffField& field, const CriticalValues& cv) {
    if (cv.subset.size() != field.size())
        throw ShapeError("critical values were computed for a different grid");
}

}  // namespace

RejectionField mtp_basic(const EUDiffField& field, const CriticalValues& cv, Direction direction) {
    check_cv(field, cv);
    if (cv.direction != direction)
        throw ConfigError("critical values were computed for the opposite direction");
    const std::size_t n = field.size();
    RejectionField out;
    out.rejected.assign(n, false);
    out.iteration.assign(n, -1);
    out.final_critical_value.assign(n, cv.sup_q);
    out.critical_values = {cv.sup_q};
    for (std::size_t g = 0; g < n; ++g) {
        if (directed(field.t0[g], direction) > cv.sup_q) {
            out.rejected[g] = true;
            out.iteration[g] = 0;
        }
    }
    return out;
}

RejectionField mtp_stepdown(const EUDiffField& field, const BootstrapDraws& draws, double alpha,
                            Direction direction) {
    if (draws.points() != field.size()) throw ShapeError("draw matrix does not match the field");
    const std::size_t n = field.size();
    auto out = mtp_basic(field, critical_values(draws, field.sigma_hat, alpha, direction), direction);

    // A round that rejects nothing leaves the surviving set unchanged, which
    // ends the procedure; so there are at most n rounds.
    bool changed = out.rejected_count() > 0;
    for (int round = 1; changed && static_cast<std::size_t>(round) <= n; ++round) {
        std::vector<bool> remaining(n);
        std::size_t left = 0;
        for (std::size_t g = 0; g < n; ++g) {
            remaining[g] = !out.rejected[g];
            left += remaining[g] ? 1 : 0;
        }
        if (left == 0) break;
        const auto cv = critical_values(draws, field.sigma_hat, alpha, remaining, direction);
        out.critical_values.push_back(cv.sup_q);
        changed = false;
        for (std::size_t g = 0; g < n; ++g) {
            if (!remaining[g]) continue;
            out.final_critical_value[g] = cv.sup_q;
            if (directed(field.t0[g], direction) > cv.sup_q) {
                out.rejected[g] = true;
                out.iteration[g] = round;
                changed = true;
            }
        }
    }
    return out;
}

SetMode parse_set_mode(std::string_view name) {
    if (name == "one-sided" || name == "mtp-one-sided") return SetMode::mtp_one_sided;
    if (name == "band-joint") return SetMode::band_joint;
    throw ConfigError("unknown mode '" + std::string(name) + "' (expected one-sided or band-joint)");
}

std::string_view to_string(SetMode mode) noexcept {
    return mode == SetMode::band_joint ? "band-joint" : "one-sided";
}

ConfidenceBand uniform_band(const EUDiffField& field, const CriticalValues& cv, BandVariant variant) {
    check_cv(field, cv);
    if (cv.direction != Direction::a_over_b)
        throw ConfigError("bands use critical values of the a-over-b process");
    const auto finite = [](double v) { return std::isfinite(v); };
    const bool have = variant == BandVariant::symmetric      ? finite(cv.abs_q)
                      : variant == BandVariant::lower        ? finite(cv.sup_q)
                      : variant == BandVariant::upper        ? finite(cv.inf_q)
                                                             : finite(cv.sup_q_half) && finite(cv.inf_q_half);
    if (!have) throw ConfigError("critical values lack the quantile this band variant needs");

    constexpr double inf = std::numeric_limits<double>::infinity();
    const double root_n = std::sqrt(static_cast<double>(field.n_a));
    ConfidenceBand band;
    band.variant = variant;
    band.alpha = cv.alpha;
    band.b1.resize(field.size());
    band.b2.resize(field.size());
    for (std::size_t g = 0; g < field.size(); ++g) {
        const double d = field.diff[g];
        const double scale = field.sigma_hat[g] / root_n;
        switch (variant) {
            case BandVariant::symmetric:
                band.b1[g] = d - cv.abs_q * scale;
                band.b2[g] = d + cv.abs_q * scale;
                break;
            case BandVariant::lower:
                band.b1[g] = d - cv.sup_q * scale;
                band.b2[g] = inf;
                break;
            case BandVariant::upper:
                band.b1[g] = -inf;
                band.b2[g] = d - cv.inf_q * scale;
                break;
            case BandVariant::equal_tailed:
                band.b1[g] = d - cv.sup_q_half * scale;
                band.b2[g] = d - cv.inf_q_half * scale;
                break;
        }
    }
    return band;
}

ConsensusSets sets_from_band(const ConfidenceBand& band) {
    ConsensusSets sets;
    sets.alpha = band.alpha;
    sets.mode = SetMode::band_joint;
    sets.inner.resize(band.b1.size());
    sets.outer.resize(band.b2.size());
    for (std::size_t g = 0; g < band.b1.size(); ++g) {
        sets.inner[g] = band.b1[g] > 0.0;
        sets.outer[g] = band.b2[g] > 0.0;
    }
    return sets;
}

ConsensusSets confidence_sets(const EUDiffField& field, const BootstrapDraws& draws, double alpha,
                              SetMode mode) {
    if (draws.points() != field.size()) throw ShapeError("draw matrix does not match the field");
    if (mode == SetMode::band_joint) {
        const auto cv = critical_values(draws, field.sigma_hat, alpha);
        return sets_from_band(uniform_band(field, cv, BandVariant::symmetric));
    }
    const auto cv_ab = critical_values(draws, field.sigma_hat, alpha, Direction::a_over_b);
    const auto cv_ba = critical_values(draws, field.sigma_hat, alpha, Direction::b_over_a);
    const auto inner = mtp_basic(field, cv_ab, Direction::a_over_b);
    const auto against = mtp_basic(field, cv_ba, Direction::b_over_a);
    ConsensusSets sets;
    sets.alpha = alpha;
    sets.mode = SetMode::mtp_one_sided;
    sets.inner = inner.rejected;
    sets.outer.resize(field.size());
    for (std::size_t g = 0; g < field.size(); ++g) sets.outer[g] = !against.rejected[g];
    return sets;
}

DominanceTest test_dominance_null(const EUDiffField& field, const CriticalValues& cv) {
    check_cv(field, cv);
    if (field.size() == 0) throw ShapeError("empty field");
    const auto it = std::max_element(field.t0.begin(), field.t0.end());
    DominanceTest test;
    test.statistic = *it;
    test.argmax = static_cast<std::size_t>(it - field.t0.begin());
    test.critical_value = cv.sup_q;
    test.reject = test.statistic > test.critical_value;
    return test;
}

double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal(), p);
}

DominanceTest test_nondominance_null(const EUDiffField& field, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (field.size() == 0) throw ShapeError("empty field");
    const auto it = std::min_element(field.t0.begin(), field.t0.end());
    DominanceTest test;
    test.statistic = *it;
    test.argmax = static_cast<std::size_t>(it - field.t0.begin());
    test.critical_value = normal_quantile(1.0 - alpha);
    test.reject = test.statistic > test.critical_value;
    return test;
}

}  // namespace consensus
