#include "consensus/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "consensus/errors.hpp"

namespace consensus {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                          : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::vector<double> read_sample(std::istream& in, const std::string& source) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto value = parse_double(view);
        if (!value) {
            if (!seen_data && values.empty()) {
                seen_data = true;  // header
                continue;
            }
            throw ConfigError(source + ":" + std::to_string(line_no) + ": not a number: '" +
                              std::string(view) + "'");
        }
        if (!std::isfinite(*value))
            throw ConfigError(source + ":" + std::to_string(line_no) + ": non-finite value");
        seen_data = true;
        values.push_back(*value);
    }
    return values;
}

std::vector<double> read_sample_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sample file '" + path + "'");
    return read_sample(in, path);
}

std::vector<ResultRow> make_result_rows(const UtilityGrid& grid, const EUDiffField& field,
                                        const ConfidenceBand& band, const ConsensusSets& sets,
                                        const RejectionField& rejections) {
    const std::size_t n = grid.size();
    if (field.size() != n || band.b1.size() != n || sets.inner.size() != n || rejections.size() != n)
        throw ShapeError("result components disagree on the grid size");
    std::vector<ResultRow> rows(n);
    for (std::size_t g = 0; g < n; ++g) {
        const auto p = grid.point(g);
        rows[g] = {p.theta,     p.s,        field.diff[g],  field.sigma_hat[g], field.t0[g],
                   band.b1[g],  band.b2[g], sets.inner[g],  sets.outer[g],      rejections.iteration[g]};
    }
    return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << kResultsHeader << '\n';
    for (const auto& r : rows) {
        out << format_double(r.theta) << ',' << format_double(r.s) << ',' << format_double(r.diff)
            << ',' << format_double(r.sigma_hat) << ',' << format_double(r.t0) << ','
            << format_double(r.b1) << ',' << format_double(r.b2) << ',' << (r.in_inner ? 1 : 0)
            << ',' << (r.in_outer ? 1 : 0) << ',' << r.rejected_iteration << '\n';
    }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kResultsHeader)
        throw ConfigError("results CSV: missing or unexpected header");
    std::vector<ResultRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_commas(line);
        if (fields.size() != 10)
            throw ConfigError("results CSV line " + std::to_string(line_no) + ": expected 10 fields");
        std::array<double, 10> v{};
        for (std::size_t k = 0; k < 10; ++k) {
            const auto parsed = parse_double(fields[k]);
            if (!parsed)
                throw ConfigError("results CSV line " + std::to_string(line_no) + ": bad field " +
                                  std::to_string(k + 1));
            v[k] = *parsed;
        }
        rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7] != 0.0, v[8] != 0.0,
                        static_cast<int>(v[9])});
    }
    return rows;
}

void write_draws_csv(std::ostream& out, const BootstrapDraws& draws) {
    out << "replicate,point_index,value\n";
    for (std::size_t r = 0; r < draws.reps(); ++r)
        for (std::size_t g = 0; g < draws.points(); ++g)
            out << r << ',' << g << ',' << format_double(draws.at(r, g)) << '\n';
}

void write_region_svg(std::ostream& out, const UtilityGrid& grid, const ConsensusSets& sets) {
    if (sets.inner.size() != grid.size() || sets.outer.size() != grid.size())
        throw ShapeError("sets do not match the grid");
    constexpr int cell_w = 16;
    constexpr int cell_h = 16;
    constexpr int margin = 48;
    const int cols = static_cast<int>(grid.theta_count());
    const int rows = static_cast<int>(grid.s_count());
    const int width = cols * cell_w + 2 * margin;
    const int height = rows * cell_h + 2 * margin;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    for (int ti = 0; ti < cols; ++ti) {
        for (int si = 0; si < rows; ++si) {
            const auto g = grid.index(static_cast<std::size_t>(ti), static_cast<std::size_t>(si));
            const bool inner = sets.inner[g];
            const bool outer = sets.outer[g];
            const char* cls = inner ? "inner" : outer ? "outer" : "excluded";
            const char* fill = inner ? "#303030" : outer ? "#b8b8b8" : "#ffffff";
            // s increases upward
            const int x = margin + ti * cell_w;
            const int y = margin + (rows - 1 - si) * cell_h;
            out << "<rect class=\"cell " << cls << "\" data-theta-index=\"" << ti
                << "\" data-s-index=\"" << si << "\" x=\"" << x << "\" y=\"" << y << "\" width=\""
                << cell_w << "\" height=\"" << cell_h << "\" fill=\"" << fill
                << "\" stroke=\"#e0e0e0\" stroke-width=\"0.5\"/>\n";
        }
    }
    const int axis_y = margin + rows * cell_h;
    out << "<text x=\"" << margin << "\" y=\"" << axis_y + 20 << "\" font-size=\"11\">theta "
        << format_double(grid.theta_axis().front()) << "</text>\n";
    out << "<text x=\"" << margin + cols * cell_w << "\" y=\"" << axis_y + 20
        << "\" font-size=\"11\" text-anchor=\"end\">theta " << format_double(grid.theta_axis().back())
        << "</text>\n";
    out << "<text x=\"" << margin - 4 << "\" y=\"" << axis_y << "\" font-size=\"11\" text-anchor=\"end\">s "
        << format_double(grid.s_axis().front()) << "</text>\n";
    out << "<text x=\"" << margin - 4 << "\" y=\"" << margin + 10
        << "\" font-size=\"11\" text-anchor=\"end\">s " << format_double(grid.s_axis().back())
        << "</text>\n";
    out << "<text x=\"" << margin << "\" y=\"" << margin - 16
        << "\" font-size=\"12\">inner (dark), outer only (light), excluded (white)</text>\n";
    out << "</svg>\n";
}

void write_coverage_csv(std::ostream& out, const CoverageReport& report) {
    out << "# seed=" << report.seed << " sims=" << report.sims << " reps=" << report.reps
        << " alpha=" << format_double(report.alpha);
    if (report.interrupted) out << " interrupted=1";
    out << '\n' << kCoverageHeader << '\n';
    auto fixed3 = [](double v) {
        std::ostringstream os;
        os.setf(std::ios::fixed);
        os.precision(3);
        os << v;
        return os.str();
    };
    for (const auto& row : report.rows) {
        out << row.cell.n_a << ',' << row.cell.n_b << ',' << format_double(row.cell.sigma_b) << ','
            << format_double(row.cell.mu_b) << ",\"" << row.truth_label << "\","
            << fixed3(row.band_cp()) << ',' << fixed3(row.both_sets_cp()) << ','
            << fixed3(row.inner_cp()) << ',' << fixed3(row.outer_cp()) << ',' << row.sims << '\n';
    }
}

namespace {

AxisSpec read_axis(const nlohmann::json& j, AxisSpec fallback) {
    fallback.min = j.value("min", fallback.min);
    fallback.max = j.value("max", fallback.max);
    fallback.step = j.value("step", fallback.step);
    return fallback;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("experiment config is not valid JSON: ") + e.what());
    }
    try {
        auto cfg = ExperimentConfig::coverage_design();
        cfg.sims = j.value("sims", cfg.sims);
        cfg.reps = j.value("reps", cfg.reps);
        cfg.alpha = j.value("alpha", cfg.alpha);
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("scheme")) cfg.scheme = parse_weight_scheme(j.at("scheme").get<std::string>());
        cfg.dgp_a.mu = j.value("mu_a", cfg.dgp_a.mu);
        cfg.dgp_a.sigma = j.value("sigma_a", cfg.dgp_a.sigma);
        if (j.contains("theta")) cfg.theta_axis = build_axis(read_axis(j.at("theta"), {0.0, 3.0, 0.1}));
        if (j.contains("cells")) {
            cfg.cells.clear();
            for (const auto& c : j.at("cells")) {
                CoverageCell cell;
                cell.n_a = c.at("n_a").get<std::size_t>();
                cell.n_b = c.at("n_b").get<std::size_t>();
                cell.sigma_b = c.at("sigma_b").get<double>();
                cell.mu_b = c.at("mu_b").get<double>();
                if (cell.n_a < 2 || cell.n_b < 2) throw ConfigError("cell sample sizes must be >= 2");
                if (!(cell.sigma_b > 0.0)) throw ConfigError("cell sigma_b must be positive");
                cfg.cells.push_back(cell);
            }
        }
        if (cfg.cells.empty()) throw ConfigError("experiment config has no cells");
        if (cfg.sims < 1) throw ConfigError("sims must be >= 1");
        if (cfg.reps < 4) throw ConfigError("reps must be >= 4");
        if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
        if (!(cfg.dgp_a.sigma > 0.0)) throw ConfigError("sigma_a must be positive");
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("experiment config: ") + e.what());
    }
}

ExperimentConfig read_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open experiment config '" + path + "'");
    return parse_experiment_config(in);
}

}  // namespace consensus
