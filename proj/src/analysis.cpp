#include "consensus/analysis.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "consensus/errors.hpp"
#include "consensus/simulation.hpp"

namespace consensus {

void AnalysisConfig::validate() const {
    if (!(alpha > 0.0 && alpha <= 0.5)) throw ConfigError("alpha must lie in (0, 0.5]");
    if (reps < 99) throw ConfigError("reps must be at least 99");
    if (sample_a_path.empty() || sample_b_path.empty())
        throw ConfigError("both --sample-a and --sample-b are required");
}

AnalysisConfig parse_analysis_config(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("analysis config is not valid JSON: ") + e.what());
    }
    AnalysisConfig cfg;
    try {
        cfg.sample_a_path = j.value("sample_a", cfg.sample_a_path);
        cfg.sample_b_path = j.value("sample_b", cfg.sample_b_path);
        auto axis = [&](const char* key, AxisSpec& spec) {
            if (!j.contains(key)) return;
            const auto& a = j.at(key);
            spec.min = a.value("min", spec.min);
            spec.max = a.value("max", spec.max);
            spec.step = a.value("step", spec.step);
        };
        axis("theta", cfg.theta);
        axis("s", cfg.s);
        cfg.alpha = j.value("alpha", cfg.alpha);
        cfg.reps = j.value("reps", cfg.reps);
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("scheme")) cfg.scheme = parse_weight_scheme(j.at("scheme").get<std::string>());
        if (j.contains("mode")) cfg.mode = parse_set_mode(j.at("mode").get<std::string>());
        cfg.out_dir = j.value("out", cfg.out_dir);
        cfg.dump_draws = j.value("dump_draws", cfg.dump_draws);
        cfg.workers = j.value("workers", cfg.workers);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("analysis config: ") + e.what());
    }
    return cfg;
}

std::optional<DomainViolation> find_domain_violation(const std::vector<double>& sample, char tag,
                                                     const UtilityGrid& grid) {
    // y - s must be positive for every s on the axis; the largest s binds.
    const double s_max = grid.max_shift();
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (!(sample[i] - s_max > 0.0)) {
            std::size_t si = 0;
            while (!(sample[i] - grid.s_axis()[si] <= 0.0)) ++si;
            return DomainViolation{tag, i, sample[i], grid.point(grid.index(0, si))};
        }
    }
    return std::nullopt;
}

AnalysisResult analyze(const std::vector<double>& sample_a, const std::vector<double>& sample_b,
                       const AnalysisConfig& config) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    auto grid = build_grid(config.theta, config.s);
    for (const auto& [sample, tag] : {std::pair{&sample_a, 'a'}, std::pair{&sample_b, 'b'}}) {
        if (auto bad = find_domain_violation(*sample, tag, grid))
            throw DomainError(bad->point.theta, bad->point.s, bad->y);
    }
    const SamplePair pair(sample_a, sample_b);

    BootstrapOptions opts;
    opts.scheme = config.scheme;
    opts.reps = config.reps;
    opts.seed = config.seed;
    opts.workers = config.workers;
    auto draws = bootstrap_difference_process(pair, grid, opts);
    auto scales = scale_estimates(draws);
    auto field = eu_diff_field(pair, grid, scales.sigma);
    auto cv = critical_values(draws, field.sigma_hat, config.alpha);
    auto band = uniform_band(field, cv, BandVariant::symmetric);
    auto sets = confidence_sets(field, draws, config.alpha, config.mode);
    auto stepdown = mtp_stepdown(field, draws, config.alpha, Direction::a_over_b);
    auto dominance = test_dominance_null(field, cv);
    auto nondominance = test_nondominance_null(field, config.alpha);
    auto env_a = envelope_diagnostic(grid, sample_a, 0.0);
    auto env_b = envelope_diagnostic(grid, sample_b, 0.0);
    return AnalysisResult{std::move(grid),  std::move(field), std::move(scales), std::move(cv),
                          std::move(band),  std::move(sets),  std::move(stepdown), dominance,
                          nondominance,     env_a,            env_b,            std::move(draws)};
}

namespace {

void write_set_line(std::ostream& out, const char* name, const std::vector<bool>& mask,
                    const UtilityGrid& grid) {
    std::size_t count = 0;
    for (bool b : mask) count += b ? 1 : 0;
    out << name << ": " << count << " of " << mask.size() << " grid points";
    if (grid.s_count() == 1) out << ", theta " << format_intervals(mask_intervals(mask, grid.theta_axis()));
    out << '\n';
    if (grid.s_count() > 1) {
        for (std::size_t si = 0; si < grid.s_count(); ++si) {
            std::vector<bool> slice(grid.theta_count());
            for (std::size_t ti = 0; ti < grid.theta_count(); ++ti) slice[ti] = mask[grid.index(ti, si)];
            out << "  s=" << format_double(grid.s_axis()[si]) << ": theta "
                << format_intervals(mask_intervals(slice, grid.theta_axis())) << '\n';
        }
    }
}

}  // namespace

void write_summary(std::ostream& out, const AnalysisResult& r, const AnalysisConfig& config) {
    const auto& field = r.field;
    out << "n_a: " << field.n_a << "\nn_b: " << field.n_b << '\n';
    out << "grid: " << r.grid.theta_count() << " theta x " << r.grid.s_count() << " s = " << r.grid.size()
        << " points\n";
    out << "alpha: " << format_double(config.alpha) << "\nreps: " << config.reps
        << "\nseed: " << config.seed << "\nscheme: " << to_string(config.scheme.kind)
        << "\nmode: " << to_string(config.mode) << "\n\n";

    out << "critical values\n";
    out << "  sup (1-alpha): " << format_double(r.cv.sup_q) << '\n';
    out << "  inf (alpha): " << format_double(r.cv.inf_q) << '\n';
    out << "  abs sup (1-alpha): " << format_double(r.cv.abs_q) << '\n';
    out << "  sup (1-alpha/2): " << format_double(r.cv.sup_q_half) << '\n';
    out << "  inf (alpha/2): " << format_double(r.cv.inf_q_half) << "\n\n";

    out << "confidence sets (A preferred)\n";
    write_set_line(out, "  inner", r.sets.inner, r.grid);
    write_set_line(out, "  outer", r.sets.outer, r.grid);
    out << "  stepdown rejections: " << r.stepdown.rejected_count() << " in "
        << r.stepdown.critical_values.size() << " round(s)\n\n";

    const auto at = [&](std::size_t g) {
        const auto p = r.grid.point(g);
        return "(theta=" + format_double(p.theta) + ", s=" + format_double(p.s) + ")";
    };
    out << "test H0: B dominates A over the grid\n";
    out << "  decision: " << (r.dominance.reject ? "reject" : "do not reject") << '\n';
    out << "  sup t0: " << format_double(r.dominance.statistic) << " at " << at(r.dominance.argmax)
        << "\n  critical value: " << format_double(r.dominance.critical_value)
        << "\n  margin: " << format_double(r.dominance.margin()) << "\n\n";
    out << "test H0: A does not dominate B over the grid\n";
    out << "  decision: " << (r.nondominance.reject ? "reject" : "do not reject") << '\n';
    out << "  inf t0: " << format_double(r.nondominance.statistic) << " at "
        << at(r.nondominance.argmax) << "\n  z(1-alpha): " << format_double(r.nondominance.critical_value)
        << "\n  margin: " << format_double(r.nondominance.margin()) << "\n\n";

    out << "scale estimates: " << (r.scales.any_degenerate() ? "degenerate IQR at some points (floored)" : "ok")
        << '\n';
    for (const auto& [name, env] : {std::pair{"A", &r.envelope_a}, std::pair{"B", &r.envelope_b}}) {
        out << "envelope second moment (" << name << "): " << format_double(env->moment)
            << ", top 1% share " << format_double(env->top_share)
            << (env->heavy_tail ? "  WARNING: heavy tail, inference may be unreliable" : "") << '\n';
    }
}

AnalysisResult run_analysis(const AnalysisConfig& config) {
    config.validate();
    const auto a = read_sample_file(config.sample_a_path);
    const auto b = read_sample_file(config.sample_b_path);
    auto result = analyze(a, b, config);

    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    const fs::path dir(config.out_dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("results.csv");
        write_results_csv(f, make_result_rows(result.grid, result.field, result.band, result.sets,
                                              result.stepdown));
    }
    {
        auto f = open("summary.txt");
        write_summary(f, result, config);
    }
    {
        auto f = open("regions.svg");
        write_region_svg(f, result.grid, result.sets);
    }
    if (config.dump_draws) {
        auto f = open("draws.csv");
        write_draws_csv(f, result.draws);
    }
    return result;
}

}  // namespace consensus
