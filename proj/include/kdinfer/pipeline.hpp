#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kdinfer/edgelist.hpp"
#include "kdinfer/evaluate.hpp"
#include "kdinfer/ingest.hpp"
#include "kdinfer/posterior.hpp"
#include "kdinfer/prior.hpp"
#include "kdinfer/simgen.hpp"

namespace kdinfer {

/// Settings for one inference run (the `infer` subcommand).
struct InferConfig {
    std::string expression_path;
    std::string metadata_path;
    std::string output_path;        ///< edgelist TSV destination
    std::string prior_table_path;   ///< empty = scalar prior for every pair
    double prior_scalar = 0.0005;
    double prior_default = 0.0005;  ///< default for pairs a table omits
    GPolicy g_policy = GPolicy::sqrt_n();
    std::int64_t min_experiments = 3;
    PipelineMode mode = PipelineMode::knockdown;
    int threads = 1;
    std::string baselines_path;  ///< optional debug dump of plate baselines

    void validate() const;
};

/// Counters for the machine-readable run report.
struct RunReport {
    std::string mode;
    int passes = 2;
    int threads = 1;
    std::int64_t plates = 0;
    std::int64_t experiments = 0;
    std::int64_t controls = 0;
    std::int64_t knockdowns = 0;
    std::int64_t perturbations = 0;
    std::int64_t usable = 0;
    std::int64_t unusable_plate = 0;
    std::int64_t off_panel = 0;
    std::int64_t regulators_scored = 0;
    std::int64_t pairs_scored = 0;
    std::int64_t pairs_skipped = 0;
    std::int64_t wall_ms = 0;

    std::string to_json() const;
};

struct InferResult {
    RankedEdgeList edges;
    RunReport report;
};

/// Run the full inference pipeline with two sequential passes over the
/// expression file: pass 1 streams control rows into plate baselines,
/// pass 2 streams every usable row into pairwise accumulators, z-scoring
/// on the fly. Peak memory holds the metadata, the baselines, the
/// accumulators and a bounded row block — never the whole matrix. Output
/// is byte-identical for every thread count.
InferResult run_infer(const InferConfig& config);

/// Same scoring without streaming, for callers that already hold a
/// dataset in memory (and as the cross-check for run_infer).
InferResult infer_dataset(const ExpressionDataset& dataset, const InferConfig& config);

/// Settings for the `eval` subcommand.
struct EvalConfig {
    std::string edgelist_path;
    std::string reference_path;
    std::string output_path;  ///< confusion report TSV destination
    std::string curve_path;   ///< optional PR-curve TSV destination
    std::vector<double> cutoffs = {0.5, 0.95};

    void validate() const;
};

struct EvalRunResult {
    EvalReport report;
    std::string to_json() const;
};

EvalRunResult run_eval(const EvalConfig& config);

/// Settings for the `simulate` subcommand. Output paths are derived from
/// one prefix: <prefix>_expression.tsv, _metadata.tsv, _truth.tsv.
struct SimulateConfig {
    SimConfig sim;
    std::string out_prefix;

    void validate() const;
};

struct SimulateResult {
    std::string expression_path;
    std::string metadata_path;
    std::string truth_path;
    std::int64_t edges = 0;
    std::int64_t experiments = 0;
    std::uint64_t seed = 0;

    std::string to_json() const;
};

SimulateResult run_simulate(const SimulateConfig& config);

}  // namespace kdinfer
