#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "consensus/bootstrap.hpp"
#include "consensus/inference.hpp"
#include "consensus/io.hpp"
#include "consensus/utility.hpp"

namespace consensus {

struct AnalysisConfig {
    std::string sample_a_path;
    std::string sample_b_path;
    AxisSpec theta{0.0, 3.0, 0.1};
    AxisSpec s{-0.1, -0.1, 1.0};
    double alpha = 0.10;
    WeightScheme scheme = WeightScheme::multinomial();
    std::size_t reps = 999;
    std::uint64_t seed = 0;
    SetMode mode = SetMode::band_joint;
    std::string out_dir = ".";
    bool dump_draws = false;
    std::size_t workers = 1;

    /// alpha in (0, 0.5], reps >= 99, paths set. Throws ConfigError.
    void validate() const;
};

/// JSON keys mirror the CLI flags: sample_a, sample_b, theta {min,max,step},
/// s {min,max,step}, alpha, reps, seed, scheme, mode, out, dump_draws, workers.
AnalysisConfig parse_analysis_config(std::istream& in);

/// A sample value outside the domain of some grid point.
struct DomainViolation {
    char sample = 'a';
    std::size_t observation = 0;  // 0-based index into the sample
    double y = 0.0;
    UtilityParams point;
};

std::optional<DomainViolation> find_domain_violation(const std::vector<double>& sample, char tag,
                                                     const UtilityGrid& grid);

struct AnalysisResult {
    UtilityGrid grid;
    EUDiffField field;
    ScaleEstimates scales;
    CriticalValues cv;
    ConfidenceBand band;
    ConsensusSets sets;
    RejectionField stepdown;
    DominanceTest dominance;
    DominanceTest nondominance;
    EnvelopeReport envelope_a;
    EnvelopeReport envelope_b;
    BootstrapDraws draws;
};

/// Full pipeline on in-memory samples. Throws DomainError/ConfigError.
AnalysisResult analyze(const std::vector<double>& sample_a, const std::vector<double>& sample_b,
                       const AnalysisConfig& config);

void write_summary(std::ostream& out, const AnalysisResult& result, const AnalysisConfig& config);

/// Reads the sample files, runs the pipeline and writes results.csv,
/// summary.txt, regions.svg (and draws.csv when requested) under out_dir.
AnalysisResult run_analysis(const AnalysisConfig& config);

}  // namespace consensus
