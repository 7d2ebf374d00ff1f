#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnet/inference.hpp"
#include "qnet/parallel.hpp"

namespace qnet {

// --- model spec (JSON) ------------------------------------------------------
//
// {"columns": [4,3,2,4],
//  "nodes": [{"col": 2, "row": 2, "dist": {"kind": "gaussian", "mean": 2, "var": 1}}],
//  "default": {"kind": "gaussian", "mean": 0, "var": 1}}
//
// Machines not listed under "nodes" use "default". Supported kinds:
// gaussian{mean,var}, bernoulli{p}, constant{value},
// discrete{values,probs}. Throws ModelSpecError on anything else.

QualityModel model_from_json(const nlohmann::json& spec);
QualityModel load_model_file(const std::filesystem::path& path);
nlohmann::json model_to_json(const QualityModel& model);

// --- observation CSV ----------------------------------------------------------
//
// Header `col_1,...,col_c,quality`; one row per part with 1-based machine
// indices and a finite decimal quality. UTF-8, '.' decimal separator.

struct Dataset {
    NetworkTopology topology;
    std::vector<Observation> observations;
};

// Reads a dataset. Without a configured topology the column sizes are
// inferred as the column-wise maxima of the observed indices; with one, the
// configuration wins and every index is validated against it.
Dataset parse_observations(std::istream& in,
                           const std::optional<NetworkTopology>& configured = {});
Dataset parse_observations_file(const std::filesystem::path& path,
                                const std::optional<NetworkTopology>& configured = {});

// Writes the CSV with shortest round-trip quality formatting, so reruns are
// byte-identical and parsing recovers the exact doubles.
void write_observations_csv(std::ostream& out, const Dataset& dataset);
void write_observations_csv_file(const std::filesystem::path& path, const Dataset& dataset);

// --- estimates serialization -------------------------------------------------

// Matrices as row-major arrays with null at placeholder and unvisited
// entries (counts keep explicit zeros for unvisited machines).
nlohmann::json estimates_to_json(const Estimates& est);

// Paper-style aligned matrices, two decimals, '*' at placeholders.
std::string estimates_to_table(const Estimates& est);

// --- analysis ------------------------------------------------------------------

struct AnalysisConfig {
    double alpha = 0.05;
    AdjustMethod adjust = AdjustMethod::benjamini_yekutieli;
    bool kind_mean = true;
    bool kind_variance = true;
    bool kind_bartlett = true;
    int reference_row = 0;  // 0 = last machine of each column
    bool all_pairs = false;
    bool equal_variance = true;
    int min_count_warn = 30;
    int shards = 1;  // estimator sharding; results identical for a fixed value
};

struct AnalysisReport {
    Estimates estimates;
    std::vector<ColumnComparisonReport> mean_reports;
    std::vector<ColumnComparisonReport> variance_reports;
    std::vector<TestResult> bartlett;

    struct Skip {
        int column = 0;
        std::string kind;
        std::string reason;
    };
    std::vector<Skip> skipped;

    struct Flag {
        int column = 0;
        int row = 0;
        std::string kind;
        double p_adj = 0.0;
    };
    std::vector<Flag> flags;

    AnalysisConfig config;

    // True when every requested analysis was skipped for preconditions.
    bool nothing_analyzed() const;
};

// Estimates the dataset and runs the requested tests per column. Columns
// whose machines miss a test's count precondition are reported as skipped
// with the reason; the report always carries the estimates.
AnalysisReport run_analyze(const Dataset& dataset, const AnalysisConfig& config);

nlohmann::json report_to_json(const AnalysisReport& report);
std::string report_to_table(const AnalysisReport& report);

// --- simulate -------------------------------------------------------------------

struct SimulateResult {
    std::filesystem::path csv_path;
    std::filesystem::path meta_path;  // "<out stem>.meta.json"
};

// Generates n observations from the model file and writes the dataset CSV
// plus a metadata sidecar (model, n, seed, shards, generator id and the
// model's theoretical moments) that enables exact re-runs.
SimulateResult run_simulate(const std::filesystem::path& model_file, std::size_t n,
                            std::uint64_t seed, const std::filesystem::path& out,
                            int shards = 1);

}  // namespace qnet
