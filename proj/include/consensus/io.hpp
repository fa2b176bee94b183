#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "consensus/bootstrap.hpp"
#include "consensus/empirical.hpp"
#include "consensus/inference.hpp"
#include "consensus/simulation.hpp"
#include "consensus/utility.hpp"

namespace consensus {

/// Shortest round-trip decimal form; "inf"/"-inf" for infinities.
std::string format_double(double x);

/// One numeric value per line. Blank lines and '#' comments are skipped; a
/// non-numeric first data line is treated as a header. Errors name the line.
std::vector<double> read_sample(std::istream& in, const std::string& source = "<stream>");
std::vector<double> read_sample_file(const std::string& path);

/// Per-point analysis results, one CSV row per grid point.
struct ResultRow {
    double theta = 0.0;
    double s = 0.0;
    double diff = 0.0;
    double sigma_hat = 0.0;
    double t0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    bool in_inner = false;
    bool in_outer = false;
    int rejected_iteration = -1;

    bool operator==(const ResultRow&) const = default;
};

inline constexpr const char* kResultsHeader =
    "theta,s,diff,sigma_hat,t0,b1,b2,in_inner,in_outer,rejected_iteration";

std::vector<ResultRow> make_result_rows(const UtilityGrid& grid, const EUDiffField& field,
                                        const ConfidenceBand& band, const ConsensusSets& sets,
                                        const RejectionField& rejections);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);

/// Columns: replicate, point_index, value.
void write_draws_csv(std::ostream& out, const BootstrapDraws& draws);

/// Region plot over the (theta, s) rectangle: inner dark, outer-only light,
/// excluded white. Each grid point is one <rect class="cell ..."> element.
void write_region_svg(std::ostream& out, const UtilityGrid& grid, const ConsensusSets& sets);

inline constexpr const char* kCoverageHeader =
    "n_a,n_b,sigma_b,mu_b,true_theta_set,band_cp,both_sets_cp,inner_cp,outer_cp,sims";

void write_coverage_csv(std::ostream& out, const CoverageReport& report);

/// JSON experiment config. Keys: sims, reps, alpha, seed, scheme,
/// theta {min,max,step}, mu_a, sigma_a, cells [{n_a, n_b, sigma_b, mu_b}].
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig read_experiment_config(const std::string& path);

}  // namespace consensus
