#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "consensus/bootstrap.hpp"
#include "consensus/empirical.hpp"

namespace consensus {

/// Outcome of a multiple testing procedure over the grid.
struct RejectionField {
    std::vector<bool> rejected;
    std::vector<int> iteration;                // round of rejection, -1 if never
    std::vector<double> final_critical_value;  // value active when rejected, else last used
    std::vector<double> critical_values;       // one per round, nonincreasing for stepdown

    std::size_t size() const noexcept { return rejected.size(); }
    std::size_t rejected_count() const noexcept;
};

/// Reject H0f (no preference for the hypothesised winner) when the directed
/// t0 exceeds cv.sup_q. Ties do not reject.
RejectionField mtp_basic(const EUDiffField& field, const CriticalValues& cv, Direction direction);

/// Holm-style stepdown: recompute the sup critical value over the surviving
/// hypotheses with the same draws until nothing new is rejected.
RejectionField mtp_stepdown(const EUDiffField& field, const BootstrapDraws& draws, double alpha,
                            Direction direction);

enum class SetMode { mtp_one_sided, band_joint };

SetMode parse_set_mode(std::string_view name);
std::string_view to_string(SetMode mode) noexcept;

struct ConsensusSets {
    std::vector<bool> inner;
    std::vector<bool> outer;
    double alpha = 0.0;
    SetMode mode = SetMode::band_joint;
};

enum class BandVariant { symmetric, lower, upper, equal_tailed };

struct ConfidenceBand {
    std::vector<double> b1;  // -inf for the upper one-sided variant
    std::vector<double> b2;  // +inf for the lower one-sided variant
    BandVariant variant = BandVariant::symmetric;
    double alpha = 0.0;
};

/// Uniform band around diff with half-widths scaled by sigma_hat / sqrt(n_a).
ConfidenceBand uniform_band(const EUDiffField& field, const CriticalValues& cv, BandVariant variant);

/// Inner/outer sets for the consensus set where sample a is preferred.
/// mtp_one_sided: inner = basic MTP rejections of the a-over-b family, outer =
/// non-rejections of the b-over-a family, each at level alpha.
/// band_joint: inner = {b1 > 0}, outer = {b2 > 0} from the symmetric band.
ConsensusSets confidence_sets(const EUDiffField& field, const BootstrapDraws& draws, double alpha,
                              SetMode mode);

ConsensusSets sets_from_band(const ConfidenceBand& band);

struct DominanceTest {
    bool reject = false;
    double statistic = 0.0;        // sup t0 (dominance null) or inf t0 (non-dominance null)
    double critical_value = 0.0;
    std::size_t argmax = 0;        // point attaining the statistic
    double margin() const noexcept { return statistic - critical_value; }
};

/// H0: b weakly dominates a over the grid. Rejects when sup t0 > sup_q.
DominanceTest test_dominance_null(const EUDiffField& field, const CriticalValues& cv);

/// H0: a does not dominate b. Rejects when inf t0 > z_{1-alpha}.
DominanceTest test_nondominance_null(const EUDiffField& field, double alpha);

double normal_quantile(double p);

}  // namespace consensus
