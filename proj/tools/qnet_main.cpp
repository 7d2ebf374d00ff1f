#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qnet/errors.hpp"
#include "qnet/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitPreconditions = 3;

std::string default_format() {
    return isatty(fileno(stdout)) ? "table" : "json";
}

std::uint64_t effective_seed(std::uint64_t cli_seed) {
    if (const char* env = std::getenv("QNET_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return cli_seed;
}

std::optional<qnet::NetworkTopology> topology_from_model(const std::string& model_file) {
    if (model_file.empty()) return std::nullopt;
    return qnet::load_model_file(model_file).topology();
}

void emit(const std::string& text, const std::string& out_file) {
    if (out_file.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_file, std::ios::binary);
    if (!out) throw qnet::IoError("cannot write " + out_file);
    out << text;
}

int cmd_simulate(const std::string& model_file, std::size_t n, std::uint64_t seed,
                 const std::string& out, int shards) {
    const auto result = qnet::run_simulate(model_file, n, effective_seed(seed), out, shards);
    std::cerr << "wrote " << result.csv_path.string() << " and " << result.meta_path.string()
              << "\n";
    return kExitOk;
}

int cmd_estimate(const std::string& data_file, const std::string& model_file,
                 const std::string& format, const std::string& out_file, int shards) {
    const qnet::Dataset dataset =
        qnet::parse_observations_file(data_file, topology_from_model(model_file));
    const qnet::EstimatorState state =
        shards > 1 ? qnet::accumulate_parallel(dataset.topology, dataset.observations, shards)
                   : qnet::accumulate(dataset.topology, dataset.observations);
    const qnet::Estimates est = state.finalize();
    if (format == "json") {
        emit(qnet::estimates_to_json(est).dump(2) + "\n", out_file);
    } else {
        emit(qnet::estimates_to_table(est), out_file);
    }
    return kExitOk;
}

int cmd_analyze(const std::string& data_file, const std::string& model_file,
                const qnet::AnalysisConfig& config, const std::string& format,
                const std::string& out_file) {
    const qnet::Dataset dataset =
        qnet::parse_observations_file(data_file, topology_from_model(model_file));
    const qnet::AnalysisReport report = qnet::run_analyze(dataset, config);
    if (format == "json") {
        emit(qnet::report_to_json(report).dump(2) + "\n", out_file);
    } else {
        emit(qnet::report_to_table(report), out_file);
    }
    return report.nothing_analyzed() ? kExitPreconditions : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qnet: latent per-machine quality estimation in layered production networks"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic observation dataset");
    std::string sim_model, sim_out;
    std::size_t sim_n = 0;
    std::uint64_t sim_seed = 0;
    int sim_shards = 1;
    simulate->add_option("--model", sim_model, "model spec JSON")->required();
    simulate->add_option("--n", sim_n, "number of observations")->required();
    simulate->add_option("--seed", sim_seed, "generator seed (QNET_SEED overrides)");
    simulate->add_option("--out", sim_out, "output CSV path")->required();
    simulate->add_option("--shards", sim_shards, "generation shards (fixed seed split)")
        ->check(CLI::PositiveNumber);

    // estimate
    auto* estimate = app.add_subcommand("estimate", "compute per-machine estimates from a dataset");
    std::string est_data, est_model, est_format, est_out;
    int est_shards = 1;
    estimate->add_option("--data", est_data, "observation CSV")->required();
    estimate->add_option("--model", est_model, "model JSON providing the topology");
    estimate->add_option("--format", est_format, "json|table")
        ->check(CLI::IsMember({"json", "table"}));
    estimate->add_option("--out", est_out, "write output to file instead of stdout");
    estimate->add_option("--shards", est_shards, "estimator shards")->check(CLI::PositiveNumber);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "estimate and run the anomaly comparisons");
    std::string an_data, an_model, an_format, an_out, an_kinds = "mean,variance,bartlett";
    std::string an_adjust = "by", an_reference = "last";
    qnet::AnalysisConfig config;
    analyze->add_option("--data", an_data, "observation CSV")->required();
    analyze->add_option("--model", an_model, "model JSON providing the topology");
    analyze->add_option("--alpha", config.alpha, "significance level");
    analyze->add_option("--adjust", an_adjust, "by|none")->check(CLI::IsMember({"by", "none"}));
    analyze->add_option("--kinds", an_kinds, "subset of mean,variance,bartlett");
    analyze->add_option("--reference", an_reference, "reference machine: 'last' or a 1-based row");
    analyze->add_flag("--all-pairs", config.all_pairs, "compare all machine pairs per column");
    analyze->add_flag("--unequal-variance", [&config](std::int64_t) { config.equal_variance = false; },
                      "per-group variances instead of the pooled estimate");
    analyze->add_option("--min-count-warn", config.min_count_warn,
                        "attach a warning below this per-machine count");
    analyze->add_option("--format", an_format, "json|table")
        ->check(CLI::IsMember({"json", "table"}));
    analyze->add_option("--out", an_out, "write the report to a file instead of stdout");
    analyze->add_option("--shards", config.shards, "estimator shards")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(sim_model, sim_n, sim_seed, sim_out, sim_shards);
        }
        if (estimate->parsed()) {
            if (est_format.empty()) est_format = default_format();
            return cmd_estimate(est_data, est_model, est_format, est_out, est_shards);
        }
        if (analyze->parsed()) {
            if (an_format.empty()) an_format = default_format();
            config.adjust = an_adjust == "by" ? qnet::AdjustMethod::benjamini_yekutieli
                                              : qnet::AdjustMethod::none;
            config.kind_mean = an_kinds.find("mean") != std::string::npos;
            config.kind_variance = an_kinds.find("variance") != std::string::npos;
            config.kind_bartlett = an_kinds.find("bartlett") != std::string::npos;
            if (!config.kind_mean && !config.kind_variance && !config.kind_bartlett) {
                throw qnet::Error("--kinds selects none of mean, variance, bartlett");
            }
            config.reference_row = an_reference == "last" ? 0 : std::stoi(an_reference);
            return cmd_analyze(an_data, an_model, config, an_format, an_out);
        }
    } catch (const qnet::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
