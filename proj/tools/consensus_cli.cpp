// consensus: inference on the set of utility functions under which sample A
// has higher expected utility than sample B.
//
//   consensus analyze --sample-a a.txt --sample-b b.txt [options]
//   consensus simulate --config coverage_design.json [--sims N] [--reps R] [--out report.csv]

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>

#include <CLI11.hpp>

#include "consensus/analysis.hpp"
#include "consensus/errors.hpp"
#include "consensus/io.hpp"
#include "consensus/parallel.hpp"
#include "consensus/simulation.hpp"

namespace {

constexpr int kUsageError = 2;

std::atomic<bool> g_stop{false};

extern "C" void on_interrupt(int) { g_stop.store(true); }

std::optional<std::uint64_t> seed_from_env() {
    const char* raw = std::getenv("CONSENSUS_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(raw, &used, 0);
        if (used != std::string(raw).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw consensus::ConfigError(std::string("CONSENSUS_SEED is not an unsigned integer: ") + raw);
    }
}

int run_analyze(const consensus::AnalysisConfig& cfg) {
    using namespace consensus;
    cfg.validate();
    const auto a = read_sample_file(cfg.sample_a_path);
    const auto b = read_sample_file(cfg.sample_b_path);
    const auto grid = build_grid(cfg.theta, cfg.s);
    for (const auto& [sample, tag, path] :
         {std::tuple{&a, 'a', cfg.sample_a_path}, std::tuple{&b, 'b', cfg.sample_b_path}}) {
        if (auto bad = find_domain_violation(*sample, tag, grid)) {
            std::cerr << "error: sample " << tag << " (" << path << ") observation "
                      << bad->observation + 1 << " has y=" << format_double(bad->y)
                      << ", outside the domain of grid point (theta=" << format_double(bad->point.theta)
                      << ", s=" << format_double(bad->point.s) << "): y - s must be positive\n";
            return kUsageError;
        }
    }
    const auto result = run_analysis(cfg);
    std::cout << "wrote " << cfg.out_dir << "/results.csv, summary.txt, regions.svg"
              << (cfg.dump_draws ? ", draws.csv" : "") << '\n';
    std::cout << "dominance null: " << (result.dominance.reject ? "rejected" : "not rejected")
              << "; non-dominance null: " << (result.nondominance.reject ? "rejected" : "not rejected")
              << '\n';
    return 0;
}

int run_simulate(consensus::ExperimentConfig cfg, const std::string& out_path, std::size_t workers,
                 bool quiet) {
    using namespace consensus;
    std::signal(SIGINT, on_interrupt);
    std::mutex print_mutex;
    ExperimentHooks hooks;
    hooks.workers = workers;
    hooks.stop = &g_stop;
    if (!quiet) {
        hooks.progress = [&](std::size_t cell, std::size_t done, std::size_t total) {
            if (done != total && done % 100 != 0) return;
            std::lock_guard lock(print_mutex);
            std::cerr << "cell " << cell + 1 << '/' << cfg.cells.size() << ": " << done << '/' << total
                      << " simulations\n";
        };
    }
    const auto report = run_coverage_experiment(cfg, hooks);
    if (out_path.empty() || out_path == "-") {
        write_coverage_csv(std::cout, report);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + out_path);
        write_coverage_csv(out, report);
    }
    if (report.interrupted) {
        std::cerr << "interrupted: partial results written\n";
        return 130;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace consensus;
    CLI::App app{"Confidence sets for expected-utility rankings over CRRA utility grids"};
    app.require_subcommand(1);
    // A repeated flag takes its last value, so scripted calls can append overrides.
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    AnalysisConfig acfg;
    std::string analysis_config_path;
    std::string scheme = "multinomial";
    std::string mode = "band-joint";
    auto* analyze = app.add_subcommand("analyze", "Compare two samples over a utility grid");
    analyze->add_option("--config", analysis_config_path, "JSON analysis config (flags override)");
    analyze->add_option("--sample-a", acfg.sample_a_path, "Sample A, one value per line");
    analyze->add_option("--sample-b", acfg.sample_b_path, "Sample B, one value per line");
    analyze->add_option("--theta-min", acfg.theta.min);
    analyze->add_option("--theta-max", acfg.theta.max);
    analyze->add_option("--theta-step", acfg.theta.step);
    analyze->add_option("--s-min", acfg.s.min);
    analyze->add_option("--s-max", acfg.s.max);
    analyze->add_option("--s-step", acfg.s.step);
    analyze->add_option("--alpha", acfg.alpha, "Level, in (0, 0.5]");
    analyze->add_option("--reps", acfg.reps, "Bootstrap replicates (>= 99)");
    analyze->add_option("--seed", acfg.seed, "Master seed (CONSENSUS_SEED overrides)");
    analyze->add_option("--scheme", scheme, "multinomial or bayesian");
    analyze->add_option("--mode", mode, "one-sided or band-joint");
    analyze->add_option("--out", acfg.out_dir, "Output directory");
    analyze->add_flag("--dump-draws", acfg.dump_draws, "Also write draws.csv");
    analyze->add_option("--workers", acfg.workers, "Threads for bootstrap replicates");

    std::string experiment_path;
    std::string report_path;
    std::optional<std::size_t> sims;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> sim_seed;
    std::size_t sim_workers = default_workers();
    bool quiet = false;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage experiment");
    simulate->add_option("--config", experiment_path, "JSON experiment config (default: built-in table)");
    simulate->add_option("--sims", sims, "Override simulation count");
    simulate->add_option("--reps", reps, "Override bootstrap replicates");
    simulate->add_option("--seed", sim_seed, "Override seed (CONSENSUS_SEED overrides)");
    simulate->add_option("--out", report_path, "Report CSV path (default stdout)");
    simulate->add_option("--workers", sim_workers, "Threads across simulations");
    simulate->add_flag("--quiet", quiet, "No progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        const auto env_seed = seed_from_env();
        if (analyze->parsed()) {
            if (!analysis_config_path.empty()) {
                std::ifstream in(analysis_config_path);
                if (!in) throw ConfigError("cannot open config '" + analysis_config_path + "'");
                auto file_cfg = parse_analysis_config(in);
                // Re-parse so that explicit flags win over the file.
                app.clear();
                acfg = file_cfg;
                scheme = std::string(to_string(file_cfg.scheme.kind));
                mode = std::string(to_string(file_cfg.mode));
                app.parse(argc, argv);
            }
            acfg.scheme = parse_weight_scheme(scheme);
            acfg.mode = parse_set_mode(mode);
            if (env_seed) acfg.seed = *env_seed;
            return run_analyze(acfg);
        }
        auto cfg = experiment_path.empty() ? ExperimentConfig::coverage_design()
                                           : read_experiment_config(experiment_path);
        if (sims) cfg.sims = *sims;
        if (reps) cfg.reps = *reps;
        if (sim_seed) cfg.seed = *sim_seed;
        if (env_seed) cfg.seed = *env_seed;
        return run_simulate(cfg, report_path, sim_workers, quiet);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kUsageError;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
