#include "qnet/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "qnet/errors.hpp"

namespace qnet {

namespace {

using nlohmann::json;

// Shortest round-trip decimal form of a double.
std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double_field(const std::string& field, std::size_t line) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError(line, "cannot parse quality value '" + field + "'");
    }
    return v;
}

long parse_int_field(const std::string& field, std::size_t line) {
    long v = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError(line, "cannot parse machine index '" + field + "'");
    }
    return v;
}

std::vector<std::string> split_csv_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

NodeDistribution dist_from_json(const json& spec) {
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string()) {
        throw ModelSpecError("distribution spec needs a string 'kind'");
    }
    const std::string kind = spec["kind"].get<std::string>();
    try {
        if (kind == "gaussian") {
            return NodeDistribution(
                GaussianDist{spec.at("mean").get<double>(), spec.at("var").get<double>()});
        }
        if (kind == "bernoulli") {
            return NodeDistribution(BernoulliDist{spec.at("p").get<double>()});
        }
        if (kind == "constant") {
            return NodeDistribution(ConstantDist{spec.at("value").get<double>()});
        }
        if (kind == "discrete") {
            return NodeDistribution(DiscreteDist{spec.at("values").get<std::vector<double>>(),
                                                 spec.at("probs").get<std::vector<double>>()});
        }
    } catch (const json::exception& e) {
        throw ModelSpecError("distribution spec '" + kind + "': " + e.what());
    }
    throw ModelSpecError("unsupported distribution kind '" + kind + "'");
}

json dist_to_json(const NodeDistribution& dist) {
    return std::visit(
        [](const auto& d) -> json {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GaussianDist>) {
                return {{"kind", "gaussian"}, {"mean", d.mean}, {"var", d.variance}};
            } else if constexpr (std::is_same_v<T, BernoulliDist>) {
                return {{"kind", "bernoulli"}, {"p", d.success_prob}};
            } else if constexpr (std::is_same_v<T, ConstantDist>) {
                return {{"kind", "constant"}, {"value", d.value}};
            } else if constexpr (std::is_same_v<T, DiscreteDist>) {
                return {{"kind", "discrete"}, {"values", d.values}, {"probs", d.probabilities}};
            } else {
                throw ModelSpecError("custom distributions are not representable in the file format");
            }
        },
        dist.value());
}

json moments_to_json(const MomentMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const auto& v = m(i, j);
            row.push_back(v ? json(*v) : json(nullptr));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

const char* kind_name(ComparisonKind k) {
    return k == ComparisonKind::mean ? "mean" : "variance";
}

json comparison_report_to_json(const ColumnComparisonReport& report) {
    json comparisons = json::array();
    for (const Comparison& cmp : report.comparisons) {
        comparisons.push_back({{"row", cmp.node.row},
                               {"ref_row", cmp.reference.row},
                               {"difference", cmp.difference},
                               {"statistic", cmp.statistic},
                               {"p_raw", cmp.p_raw},
                               {"p_adjusted", cmp.p_adjusted},
                               {"degenerate", cmp.degenerate},
                               {"low_count", cmp.low_count}});
    }
    json flagged = json::array();
    for (const NodeRef& n : report.flagged) flagged.push_back(n.row);
    return {{"column", report.column},
            {"kind", kind_name(report.kind)},
            {"reference_row", report.all_pairs ? json(nullptr) : json(report.reference_row)},
            {"all_pairs", report.all_pairs},
            {"comparisons", std::move(comparisons)},
            {"flagged_rows", std::move(flagged)}};
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string sci3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

void render_matrix(std::ostream& os, const std::string& title, const Estimates& est,
                   const Matrix<double>& m) {
    os << title << "\n";
    const int rows = est.topology.max_rows();
    const int cols = est.topology.columns();
    os << "  row";
    for (int j = 1; j <= cols; ++j) {
        const std::string label = "col" + std::to_string(j);
        char head[24];
        std::snprintf(head, sizeof(head), "%10s", label.c_str());
        os << head;
    }
    os << "\n";
    for (int i = 1; i <= rows; ++i) {
        char rowhead[16];
        std::snprintf(rowhead, sizeof(rowhead), "%5d", i);
        os << rowhead;
        for (int j = 1; j <= cols; ++j) {
            std::string cell = est.exists(i, j)
                                   ? fixed2(m(static_cast<std::size_t>(i) - 1,
                                              static_cast<std::size_t>(j) - 1))
                                   : std::string("*");
            char fmt[24];
            std::snprintf(fmt, sizeof(fmt), "%10s", cell.c_str());
            os << fmt;
        }
        os << "\n";
    }
}

}  // namespace

QualityModel model_from_json(const json& spec) {
    if (!spec.is_object()) throw ModelSpecError("model spec must be a JSON object");
    if (!spec.contains("columns")) throw ModelSpecError("model spec needs 'columns'");

    std::vector<int> columns;
    try {
        columns = spec["columns"].get<std::vector<int>>();
    } catch (const json::exception& e) {
        throw ModelSpecError(std::string("model 'columns': ") + e.what());
    }
    const NetworkTopology topology = validate_topology(columns);

    std::optional<NodeDistribution> default_dist;
    if (spec.contains("default")) default_dist = dist_from_json(spec["default"]);

    // Without a default every machine must be listed explicitly.
    Matrix<std::uint8_t> covered(static_cast<std::size_t>(topology.max_rows()),
                                 static_cast<std::size_t>(topology.columns()));
    QualityModel model(topology,
                       default_dist ? *default_dist : NodeDistribution(ConstantDist{0.0}));

    if (spec.contains("nodes")) {
        if (!spec["nodes"].is_array()) throw ModelSpecError("model 'nodes' must be an array");
        for (const json& node : spec["nodes"]) {
            int row = 0, col = 0;
            try {
                row = node.at("row").get<int>();
                col = node.at("col").get<int>();
            } catch (const json::exception& e) {
                throw ModelSpecError(std::string("model node entry: ") + e.what());
            }
            if (!topology.node_exists(row, col)) {
                throw ModelSpecError("model node (" + std::to_string(row) + "," +
                                     std::to_string(col) + ") does not exist in the topology");
            }
            if (!node.contains("dist")) throw ModelSpecError("model node entry needs 'dist'");
            model.set_node(row, col, dist_from_json(node["dist"]));
            covered(static_cast<std::size_t>(row) - 1, static_cast<std::size_t>(col) - 1) = 1;
        }
    }

    if (!default_dist) {
        for (int j = 1; j <= topology.columns(); ++j) {
            for (int i = 1; i <= topology.column_size(j); ++i) {
                if (!covered(static_cast<std::size_t>(i) - 1, static_cast<std::size_t>(j) - 1)) {
                    throw ModelSpecError("machine (" + std::to_string(i) + "," + std::to_string(j) +
                                         ") has no distribution and the model has no 'default'");
                }
            }
        }
    }
    return model;
}

QualityModel load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file " + path.string());
    json spec;
    try {
        in >> spec;
    } catch (const json::exception& e) {
        throw ModelSpecError("model file " + path.string() + ": " + e.what());
    }
    return model_from_json(spec);
}

json model_to_json(const QualityModel& model) {
    const auto& topo = model.topology();
    json nodes = json::array();
    for (int j = 1; j <= topo.columns(); ++j) {
        for (int i = 1; i <= topo.column_size(j); ++i) {
            nodes.push_back({{"col", j}, {"row", i}, {"dist", dist_to_json(model.node(i, j))}});
        }
    }
    return {{"columns", topo.column_sizes()}, {"nodes", std::move(nodes)}};
}

Dataset parse_observations(std::istream& in, const std::optional<NetworkTopology>& configured) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2 || header.back() != "quality") {
        throw ParseError(1, "header must be col_1,...,col_c,quality");
    }
    const std::size_t c = header.size() - 1;
    for (std::size_t j = 0; j < c; ++j) {
        if (header[j] != "col_" + std::to_string(j + 1)) {
            throw ParseError(1, "unexpected header field '" + header[j] + "'");
        }
    }
    if (configured && static_cast<std::size_t>(configured->columns()) != c) {
        throw TopologyMismatch("file has " + std::to_string(c) + " columns, configured topology has " +
                               std::to_string(configured->columns()));
    }

    std::vector<Observation> observations;
    std::vector<int> max_index(c, 1);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != c + 1) {
            throw ParseError(line_no, "expected " + std::to_string(c + 1) + " fields, got " +
                                          std::to_string(fields.size()));
        }
        PathRecord path;
        path.machines.reserve(c);
        for (std::size_t j = 0; j < c; ++j) {
            const long idx = parse_int_field(fields[j], line_no);
            if (idx < 1) {
                throw IndexOutOfRange("line " + std::to_string(line_no) + ": machine index " +
                                      std::to_string(idx) + " in column " + std::to_string(j + 1) +
                                      " (indices are 1-based)");
            }
            if (configured && idx > configured->column_size(static_cast<int>(j) + 1)) {
                throw IndexOutOfRange("line " + std::to_string(line_no) + ": machine index " +
                                      std::to_string(idx) + " exceeds configured size " +
                                      std::to_string(configured->column_size(static_cast<int>(j) + 1)) +
                                      " of column " + std::to_string(j + 1));
            }
            max_index[j] = std::max(max_index[j], static_cast<int>(idx));
            path.machines.push_back(static_cast<int>(idx));
        }
        const double quality = parse_double_field(fields[c], line_no);
        if (!std::isfinite(quality)) {
            throw NonFiniteQuality("line " + std::to_string(line_no) + ": quality '" + fields[c] +
                                   "' is not finite");
        }
        observations.push_back(Observation{std::move(path), quality});
    }
    if (observations.empty()) throw EmptyDataset();

    Dataset dataset;
    dataset.topology = configured ? *configured : validate_topology(max_index);
    dataset.observations = std::move(observations);
    return dataset;
}

Dataset parse_observations_file(const std::filesystem::path& path,
                                const std::optional<NetworkTopology>& configured) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open data file " + path.string());
    return parse_observations(in, configured);
}

void write_observations_csv(std::ostream& out, const Dataset& dataset) {
    const int c = dataset.topology.columns();
    for (int j = 1; j <= c; ++j) out << "col_" << j << ",";
    out << "quality\n";
    for (const Observation& obs : dataset.observations) {
        for (int j = 1; j <= c; ++j) out << obs.path[j] << ",";
        out << format_double(obs.quality) << "\n";
    }
}

void write_observations_csv_file(const std::filesystem::path& path, const Dataset& dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_observations_csv(out, dataset);
}

json estimates_to_json(const Estimates& est) {
    const auto rows = static_cast<std::size_t>(est.topology.max_rows());
    const auto cols = static_cast<std::size_t>(est.topology.columns());

    const auto matrix_rows = [&](const Matrix<double>& m) {
        json out = json::array();
        for (std::size_t i = 0; i < rows; ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < cols; ++j) {
                const bool exists = est.exists(static_cast<int>(i) + 1, static_cast<int>(j) + 1);
                const bool visited = exists && est.counts(i, j) > 0;
                row.push_back(visited ? json(m(i, j)) : json(nullptr));
            }
            out.push_back(std::move(row));
        }
        return out;
    };

    json counts = json::array();
    for (std::size_t i = 0; i < rows; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < cols; ++j) {
            const bool exists = est.exists(static_cast<int>(i) + 1, static_cast<int>(j) + 1);
            row.push_back(exists ? json(est.counts(i, j)) : json(nullptr));
        }
        counts.push_back(std::move(row));
    }

    return {{"columns", est.topology.column_sizes()},
            {"n", est.n},
            {"T", matrix_rows(est.t)},
            {"Sigma", matrix_rows(est.sigma)},
            {"Tau2", matrix_rows(est.tau2)},
            {"counts", std::move(counts)}};
}

std::string estimates_to_table(const Estimates& est) {
    std::ostringstream os;
    os << "n = " << est.n << ", columns = [";
    for (int j = 1; j <= est.topology.columns(); ++j) {
        if (j > 1) os << ", ";
        os << est.topology.column_size(j);
    }
    os << "]\n\n";
    render_matrix(os, "T (conditional mean of path quality)", est, est.t);
    os << "\n";
    render_matrix(os, "Sigma (conditional variance of path quality)", est, est.sigma);
    return os.str();
}

bool AnalysisReport::nothing_analyzed() const {
    return mean_reports.empty() && variance_reports.empty() && bartlett.empty() &&
           !skipped.empty();
}

AnalysisReport run_analyze(const Dataset& dataset, const AnalysisConfig& config) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw InvalidAlpha("alpha must lie in (0,1)");

    AnalysisReport report;
    report.config = config;

    EstimatorState state = config.shards > 1
                               ? accumulate_parallel(dataset.topology, dataset.observations,
                                                     config.shards)
                               : accumulate(dataset.topology, dataset.observations);
    report.estimates = state.finalize();
    const Estimates& est = report.estimates;

    ColumnReportOptions options;
    options.alpha = config.alpha;
    options.adjust = config.adjust;
    options.reference_row = config.reference_row;
    options.all_pairs = config.all_pairs;
    options.equal_variance = config.equal_variance;
    options.min_count_warn = config.min_count_warn;

    for (int j = 1; j <= dataset.topology.columns(); ++j) {
        if (config.kind_mean) {
            options.kind = ComparisonKind::mean;
            try {
                report.mean_reports.push_back(column_report(est, j, options));
            } catch (const Error& e) {
                report.skipped.push_back({j, "mean", e.what()});
            }
        }
        if (config.kind_variance) {
            options.kind = ComparisonKind::variance;
            try {
                report.variance_reports.push_back(column_report(est, j, options));
            } catch (const Error& e) {
                report.skipped.push_back({j, "variance", e.what()});
            }
        }
        if (config.kind_bartlett) {
            try {
                report.bartlett.push_back(bartlett_test(est, j));
            } catch (const Error& e) {
                report.skipped.push_back({j, "bartlett", e.what()});
            }
        }
    }

    for (const auto& col_report : report.mean_reports) {
        for (const NodeRef& n : col_report.flagged) {
            double p_adj = 1.0;
            for (const Comparison& cmp : col_report.comparisons) {
                if (cmp.node.row == n.row || (col_report.all_pairs && cmp.reference.row == n.row)) {
                    p_adj = std::min(p_adj, cmp.p_adjusted);
                }
            }
            report.flags.push_back({col_report.column, n.row, "mean", p_adj});
        }
    }
    for (const auto& col_report : report.variance_reports) {
        for (const NodeRef& n : col_report.flagged) {
            double p_adj = 1.0;
            for (const Comparison& cmp : col_report.comparisons) {
                if (cmp.node.row == n.row || (col_report.all_pairs && cmp.reference.row == n.row)) {
                    p_adj = std::min(p_adj, cmp.p_adjusted);
                }
            }
            report.flags.push_back({col_report.column, n.row, "variance", p_adj});
        }
    }
    return report;
}

json report_to_json(const AnalysisReport& report) {
    json mean_tests = json::array();
    for (const auto& r : report.mean_reports) mean_tests.push_back(comparison_report_to_json(r));
    json variance_tests = json::array();
    for (const auto& r : report.variance_reports)
        variance_tests.push_back(comparison_report_to_json(r));

    json bartlett = json::array();
    for (const TestResult& t : report.bartlett) {
        bartlett.push_back({{"column", t.a.col},
                            {"statistic", t.statistic},
                            {"p_value", t.p_value},
                            {"df", t.df ? json(*t.df) : json(nullptr)},
                            {"significant", t.p_value < report.config.alpha},
                            {"low_count", t.low_count}});
    }

    json flags = json::array();
    for (const auto& f : report.flags) {
        flags.push_back({{"col", f.column}, {"row", f.row}, {"kind", f.kind}, {"p_adj", f.p_adj}});
    }

    json skipped = json::array();
    for (const auto& s : report.skipped) {
        skipped.push_back({{"column", s.column}, {"kind", s.kind}, {"reason", s.reason}});
    }

    return {{"alpha", report.config.alpha},
            {"adjust", report.config.adjust == AdjustMethod::benjamini_yekutieli ? "by" : "none"},
            {"estimates", estimates_to_json(report.estimates)},
            {"mean_tests", std::move(mean_tests)},
            {"variance_tests", std::move(variance_tests)},
            {"bartlett", std::move(bartlett)},
            {"flags", std::move(flags)},
            {"skipped", std::move(skipped)}};
}

std::string report_to_table(const AnalysisReport& report) {
    std::ostringstream os;
    os << estimates_to_table(report.estimates) << "\n";

    const auto render_comparisons = [&](const std::vector<ColumnComparisonReport>& reports,
                                        const char* title) {
        if (reports.empty()) return;
        os << title << " (alpha = " << format_double(reports.front().alpha) << ", adjust = "
           << (report.config.adjust == AdjustMethod::benjamini_yekutieli ? "BY" : "none") << ")\n";
        os << "  col  row  vs      diff         z     p_raw     p_adj  flag\n";
        for (const auto& r : reports) {
            for (const Comparison& cmp : r.comparisons) {
                char line[160];
                std::snprintf(line, sizeof(line), "%5d%5d%4d%10s%10s%10s%10s  %s\n", r.column,
                              cmp.node.row, cmp.reference.row, fixed2(cmp.difference).c_str(),
                              fixed2(cmp.statistic).c_str(), sci3(cmp.p_raw).c_str(),
                              sci3(cmp.p_adjusted).c_str(),
                              r.is_flagged(cmp.node.row) ? "*" : "");
                os << line;
            }
        }
        os << "\n";
    };
    render_comparisons(report.mean_reports, "Mean comparisons");
    render_comparisons(report.variance_reports, "Variance comparisons");

    if (!report.bartlett.empty()) {
        os << "Bartlett variance homogeneity\n";
        os << "  col  df  statistic   p_value  significant\n";
        for (const TestResult& t : report.bartlett) {
            char line[120];
            std::snprintf(line, sizeof(line), "%5d%4d%11s%10s  %s\n", t.a.col,
                          t.df ? *t.df : 0, fixed2(t.statistic).c_str(), sci3(t.p_value).c_str(),
                          t.p_value < report.config.alpha ? "yes" : "no");
            os << line;
        }
        os << "\n";
    }

    if (!report.skipped.empty()) {
        os << "Skipped\n";
        for (const auto& s : report.skipped) {
            os << "  col " << s.column << " [" << s.kind << "]: " << s.reason << "\n";
        }
        os << "\n";
    }

    if (report.flags.empty()) {
        os << "No machines flagged.\n";
    } else {
        os << "Flagged machines\n";
        for (const auto& f : report.flags) {
            os << "  (" << f.row << "," << f.column << ") " << f.kind
               << ", adjusted p = " << sci3(f.p_adj) << "\n";
        }
    }
    return os.str();
}

SimulateResult run_simulate(const std::filesystem::path& model_file, std::size_t n,
                            std::uint64_t seed, const std::filesystem::path& out, int shards) {
    if (n < 1) throw Error("simulate: n must be >= 1");
    if (shards < 1) throw Error("simulate: shards must be >= 1");
    const QualityModel model = load_model_file(model_file);

    Dataset dataset;
    dataset.topology = model.topology();
    dataset.observations = shards > 1 ? generate_dataset_parallel(model, n, seed, shards)
                                      : generate_dataset(model, n, seed);
    write_observations_csv_file(out, dataset);

    const TheoreticalMoments moments = theoretical_moments(model);
    json meta = {{"generator", kGeneratorId},
                 {"n", n},
                 {"seed", seed},
                 {"shards", shards},
                 {"model", model_to_json(model)},
                 {"true_moments",
                  {{"mean", moments_to_json(moments.mean)},
                   {"variance", moments_to_json(moments.variance)}}}};

    std::filesystem::path meta_path = out;
    meta_path.replace_extension();
    meta_path += ".meta.json";
    std::ofstream meta_out(meta_path, std::ios::binary);
    if (!meta_out) throw IoError("cannot write " + meta_path.string());
    meta_out << meta.dump(2) << "\n";

    return SimulateResult{out, meta_path};
}

}  // namespace qnet
