#include "kdinfer/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "kdinfer/baseline.hpp"
#include "kdinfer/errors.hpp"
#include "kdinfer/scoring.hpp"

namespace kdinfer {

namespace {

/// Rows buffered per scoring block. Bounds pass-2 memory to
/// kBlockRows x n_genes doubles regardless of how long the file is.
constexpr std::size_t kBlockRows = 128;

/// Group id for perturbation experiments that do not name a target gene.
constexpr const char* kPooledGroup = "perturbation";

ExperimentStatus classify(const ExperimentMeta& m,
                          const std::map<std::string, std::int64_t>& controls_per_plate,
                          const std::unordered_map<std::string, Eigen::Index>& gene_index) {
    if (m.kind == ExperimentKind::control) return ExperimentStatus::usable;
    if (m.kind == ExperimentKind::knockdown && !gene_index.count(m.target_gene)) {
        return ExperimentStatus::off_panel;
    }
    auto it = controls_per_plate.find(m.plate_id);
    if (it == controls_per_plate.end() || it->second < 2) return ExperimentStatus::unusable_plate;
    return ExperimentStatus::usable;
}

/// Which accumulator slot each scored row feeds. Slot layout:
///   knockdown mode: one slot per regulator (distinct usable knockdown
///                   targets), ascending by gene index.
///   two-class mode: slot 0 = controls (x = 0), then one slot per
///                   perturbation group, ascending by group id.
struct ScoringPlan {
    PipelineMode mode = PipelineMode::knockdown;
    std::vector<std::string> slot_ids;      ///< regulator / group id per slot
    std::vector<Eigen::Index> slot_self;    ///< panel index of the slot's own gene, or -1
    std::unordered_map<std::string, int> slot_of;
};

ScoringPlan build_plan(const std::vector<ExperimentMeta>& meta,
                       const std::vector<ExperimentStatus>& status,
                       const std::unordered_map<std::string, Eigen::Index>& gene_index,
                       PipelineMode mode) {
    ScoringPlan plan;
    plan.mode = mode;
    if (mode == PipelineMode::knockdown) {
        std::set<std::pair<Eigen::Index, std::string>> regulators;
        for (std::size_t i = 0; i < meta.size(); ++i) {
            if (status[i] != ExperimentStatus::usable) continue;
            if (meta[i].kind != ExperimentKind::knockdown) continue;
            regulators.emplace(gene_index.at(meta[i].target_gene), meta[i].target_gene);
        }
        for (const auto& [idx, id] : regulators) {
            plan.slot_of.emplace(id, static_cast<int>(plan.slot_ids.size()));
            plan.slot_ids.push_back(id);
            plan.slot_self.push_back(idx);
        }
    } else {
        plan.slot_ids.push_back("");  // controls
        plan.slot_self.push_back(-1);
        std::set<std::string> groups;
        for (std::size_t i = 0; i < meta.size(); ++i) {
            if (status[i] != ExperimentStatus::usable) continue;
            if (meta[i].kind == ExperimentKind::control) continue;
            groups.insert(meta[i].target_gene.empty() ? kPooledGroup : meta[i].target_gene);
        }
        for (const auto& id : groups) {
            plan.slot_of.emplace(id, static_cast<int>(plan.slot_ids.size()));
            plan.slot_ids.push_back(id);
            auto it = gene_index.find(id);
            plan.slot_self.push_back(it == gene_index.end() ? -1 : it->second);
        }
    }
    return plan;
}

/// Accumulates pairwise statistics over buffered row blocks. Threads own
/// disjoint target ranges, so every accumulator sees its additions in file
/// order no matter how many threads run — output is byte-identical for
/// every thread count.
class ScoringEngine {
public:
    ScoringEngine(std::size_t n_genes, std::size_t n_slots, int threads)
        : n_genes_(n_genes), threads_(threads) {
        accs_.resize(n_slots);
        for (auto& a : accs_) a.resize(n_genes_);
    }

    void add_row(const PlateBaseline* baseline, const Eigen::RowVectorXd& raw, int slot,
                 Eigen::Index self, double x) {
        block_.push_back({baseline, raw, slot, self, x});
        if (block_.size() >= kBlockRows) flush();
    }

    void finish() { flush(); }

    const std::vector<PairAccumulator<double>>& slot_accs(std::size_t slot) const {
        return accs_[slot];
    }

private:
    struct BufferedRow {
        const PlateBaseline* baseline;
        Eigen::RowVectorXd raw;
        int slot;
        Eigen::Index self;
        double x;
    };

    void flush() {
        if (block_.empty()) return;
        if (threads_ <= 1) {
            process_slice(0, static_cast<Eigen::Index>(n_genes_));
        } else {
            std::vector<std::thread> workers;
            workers.reserve(static_cast<std::size_t>(threads_));
            for (int k = 0; k < threads_; ++k) {
                auto a = static_cast<Eigen::Index>(n_genes_ * static_cast<std::size_t>(k) /
                                                   static_cast<std::size_t>(threads_));
                auto b = static_cast<Eigen::Index>(n_genes_ * (static_cast<std::size_t>(k) + 1) /
                                                   static_cast<std::size_t>(threads_));
                workers.emplace_back([this, a, b] { process_slice(a, b); });
            }
            for (auto& w : workers) w.join();
        }
        block_.clear();
    }

    void process_slice(Eigen::Index begin, Eigen::Index end) {
        for (const auto& row : block_) {
            const PlateBaseline& b = *row.baseline;
            auto& accs = accs_[static_cast<std::size_t>(row.slot)];
            for (Eigen::Index t = begin; t < end; ++t) {
                if (t == row.self) continue;
                double raw = row.raw[t];
                if (!b.valid[t] || std::isnan(raw)) continue;
                accs[static_cast<std::size_t>(t)].add(row.x, (raw - b.mean[t]) / b.sd[t]);
            }
        }
    }

    std::size_t n_genes_;
    int threads_;
    std::vector<BufferedRow> block_;
    std::vector<std::vector<PairAccumulator<double>>> accs_;
};

/// Route one usable row into the engine. Returns false if the row cannot
/// contribute (not a scoring row in this mode, or its own z-score is
/// unavailable in knockdown mode).
bool dispatch_row(const ExperimentMeta& m, ExperimentStatus status, const Eigen::RowVectorXd& raw,
                  const PlateBaselines& baselines,
                  const std::unordered_map<std::string, Eigen::Index>& gene_index,
                  const ScoringPlan& plan, ScoringEngine& engine) {
    if (status != ExperimentStatus::usable) return false;
    if (plan.mode == PipelineMode::knockdown) {
        if (m.kind != ExperimentKind::knockdown) return false;  // controls feed baselines only
        const PlateBaseline& b = baselines.at(m.plate_id);
        Eigen::Index h = gene_index.at(m.target_gene);
        if (!b.valid[h] || std::isnan(raw[h])) return false;
        double zx = (raw[h] - b.mean[h]) / b.sd[h];
        engine.add_row(&b, raw, plan.slot_of.at(m.target_gene), h, zx);
        return true;
    }
    const PlateBaseline& b = baselines.at(m.plate_id);
    if (m.kind == ExperimentKind::control) {
        engine.add_row(&b, raw, 0, -1, 0.0);
        return true;
    }
    const std::string& key = m.target_gene.empty() ? kPooledGroup : m.target_gene;
    int slot = plan.slot_of.at(key);
    engine.add_row(&b, raw, slot, plan.slot_self[static_cast<std::size_t>(slot)], 1.0);
    return true;
}

/// Collect EdgeScores out of the finished engine.
void assemble_scores(const ScoringEngine& engine, const ScoringPlan& plan,
                     const std::vector<std::string>& gene_ids, const PriorSpec& prior,
                     const GPolicy& policy, std::int64_t min_experiments,
                     std::vector<EdgeScore>& scores, std::int64_t& skipped,
                     std::int64_t& regulators_scored) {
    const std::size_t first_slot = plan.mode == PipelineMode::knockdown ? 0 : 1;
    for (std::size_t s = first_slot; s < plan.slot_ids.size(); ++s) {
        const std::string& regulator = plan.slot_ids[s];
        const auto self = plan.slot_self[s];
        const auto& accs = engine.slot_accs(s);
        std::size_t produced = 0;
        for (std::size_t t = 0; t < gene_ids.size(); ++t) {
            if (static_cast<Eigen::Index>(t) == self) continue;
            std::optional<EdgeScore> score;
            if (plan.mode == PipelineMode::knockdown) {
                score = score_accumulator(accs[t], resolve_prior(prior, regulator, gene_ids[t]),
                                          policy, min_experiments);
            } else {
                PairAccumulator<double> merged = accs[t];
                const auto& controls = engine.slot_accs(0)[t];
                if (merged.n == 0 || controls.n == 0) {
                    ++skipped;
                    continue;
                }
                merged.merge(controls);
                score = score_accumulator(merged, resolve_prior(prior, regulator, gene_ids[t]),
                                          policy, min_experiments);
            }
            if (!score) {
                ++skipped;
                continue;
            }
            score->regulator = regulator;
            score->target = gene_ids[t];
            scores.push_back(std::move(*score));
            ++produced;
        }
        if (produced > 0) ++regulators_scored;
    }
}

void count_kinds(const std::vector<ExperimentMeta>& meta,
                 const std::vector<ExperimentStatus>& status, RunReport& report) {
    std::set<std::string> plates;
    for (std::size_t i = 0; i < meta.size(); ++i) {
        plates.insert(meta[i].plate_id);
        switch (meta[i].kind) {
            case ExperimentKind::control: ++report.controls; break;
            case ExperimentKind::knockdown: ++report.knockdowns; break;
            case ExperimentKind::perturbation: ++report.perturbations; break;
        }
        switch (status[i]) {
            case ExperimentStatus::usable: ++report.usable; break;
            case ExperimentStatus::unusable_plate: ++report.unusable_plate; break;
            case ExperimentStatus::off_panel: ++report.off_panel; break;
        }
    }
    report.plates = static_cast<std::int64_t>(plates.size());
    report.experiments = static_cast<std::int64_t>(meta.size());
}

void check_mode_not_empty(PipelineMode mode, const std::vector<ExperimentMeta>& meta,
                          const std::vector<ExperimentStatus>& status) {
    std::int64_t usable_knockdowns = 0;
    std::int64_t usable_cases = 0;
    std::int64_t controls = 0;
    for (std::size_t i = 0; i < meta.size(); ++i) {
        if (status[i] != ExperimentStatus::usable) continue;
        if (meta[i].kind == ExperimentKind::control) {
            ++controls;
        } else if (meta[i].kind == ExperimentKind::knockdown) {
            ++usable_knockdowns;
            ++usable_cases;
        } else {
            ++usable_cases;
        }
    }
    if (mode == PipelineMode::knockdown && usable_knockdowns == 0) {
        throw ValidationError("empty dataset: no usable knockdown experiments");
    }
    if (mode == PipelineMode::two_class && (usable_cases == 0 || controls == 0)) {
        throw ValidationError("empty dataset: two-class mode needs control and "
                              "perturbation experiments");
    }
}

PriorSpec resolve_prior_spec(const InferConfig& config) {
    if (config.prior_table_path.empty()) return PriorSpec::scalar(config.prior_scalar);
    return load_prior_table_file(config.prior_table_path, config.prior_default);
}

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

void InferConfig::validate() const {
    if (expression_path.empty()) throw ValidationError("infer: --expression is required");
    if (metadata_path.empty()) throw ValidationError("infer: --metadata is required");
    if (output_path.empty()) throw ValidationError("infer: --output is required");
    if (min_experiments < 3) throw ValidationError("infer: --min-experiments must be >= 3");
    if (threads < 1) throw ValidationError("infer: --threads must be >= 1");
    if (g_policy.kind == GPolicy::Kind::fixed && !(g_policy.fixed_value >= 1.0)) {
        throw ValidationError("infer: fixed g must be >= 1");
    }
    if (!(prior_scalar >= 0.0 && prior_scalar <= 1.0)) {
        throw ValidationError("infer: --prior must lie in [0,1]");
    }
    if (!(prior_default >= 0.0 && prior_default <= 1.0)) {
        throw ValidationError("infer: --prior-default must lie in [0,1]");
    }
}

std::string RunReport::to_json() const {
    nlohmann::ordered_json j;
    j["mode"] = mode;
    j["passes"] = passes;
    j["threads"] = threads;
    j["plates"] = plates;
    j["experiments"] = {{"total", experiments},
                        {"controls", controls},
                        {"knockdowns", knockdowns},
                        {"perturbations", perturbations},
                        {"usable", usable},
                        {"unusable_plate", unusable_plate},
                        {"off_panel", off_panel}};
    j["regulators_scored"] = regulators_scored;
    j["pairs_scored"] = pairs_scored;
    j["pairs_skipped"] = pairs_skipped;
    j["wall_ms"] = wall_ms;
    return j.dump(2);
}

InferResult run_infer(const InferConfig& config) {
    auto start = std::chrono::steady_clock::now();
    config.validate();
    PriorSpec prior = resolve_prior_spec(config);
    std::vector<ExperimentMeta> meta = parse_metadata_file(config.metadata_path);
    std::unordered_map<std::string, std::size_t> meta_index;
    meta_index.reserve(meta.size());
    for (std::size_t i = 0; i < meta.size(); ++i) meta_index.emplace(meta[i].experiment_id, i);

    // Pass 1: stream controls into plate baselines; verify the join.
    std::vector<std::string> gene_ids;
    PlateBaselines baselines;
    {
        std::ifstream in(config.expression_path, std::ios::binary);
        if (!in) throw IoError("cannot open file: " + config.expression_path);
        ExpressionRowReader reader(in);
        gene_ids = reader.gene_ids();
        PlateBaselineAccumulator acc(gene_ids.size());
        std::unordered_set<std::string> seen;
        seen.reserve(meta.size());
        reader.for_each_row([&](const std::string& id, const Eigen::RowVectorXd& row) {
            auto it = meta_index.find(id);
            if (it == meta_index.end()) {
                throw ValidationError("experiment \"" + id + "\" has no metadata row");
            }
            if (!seen.insert(id).second) {
                throw ValidationError("duplicate experiment id: \"" + id + "\"");
            }
            const auto& m = meta[it->second];
            if (m.kind == ExperimentKind::control) acc.add_control(m.plate_id, row);
        });
        if (seen.size() != meta.size()) {
            std::ostringstream msg;
            msg << "metadata names experiments absent from the expression file:";
            for (const auto& m : meta) {
                if (!seen.count(m.experiment_id)) msg << ' ' << m.experiment_id;
            }
            throw ValidationError(msg.str());
        }
        baselines = acc.finalize();
    }

    std::unordered_map<std::string, Eigen::Index> gene_index;
    gene_index.reserve(gene_ids.size());
    for (std::size_t g = 0; g < gene_ids.size(); ++g) {
        gene_index.emplace(gene_ids[g], static_cast<Eigen::Index>(g));
    }

    if (!config.baselines_path.empty()) {
        std::ofstream out(config.baselines_path, std::ios::binary);
        if (!out) throw IoError("cannot open file for writing: " + config.baselines_path);
        write_baselines(baselines, gene_ids, out);
    }

    std::map<std::string, std::int64_t> controls_per_plate;
    for (const auto& m : meta) {
        if (m.kind == ExperimentKind::control) ++controls_per_plate[m.plate_id];
    }
    std::vector<ExperimentStatus> status(meta.size());
    for (std::size_t i = 0; i < meta.size(); ++i) {
        status[i] = classify(meta[i], controls_per_plate, gene_index);
    }
    check_mode_not_empty(config.mode, meta, status);

    ScoringPlan plan = build_plan(meta, status, gene_index, config.mode);
    ScoringEngine engine(gene_ids.size(), plan.slot_ids.size(), config.threads);

    // Pass 2: stream every usable scoring row through the engine.
    {
        std::ifstream in(config.expression_path, std::ios::binary);
        if (!in) throw IoError("cannot open file: " + config.expression_path);
        ExpressionRowReader reader(in);
        reader.for_each_row([&](const std::string& id, const Eigen::RowVectorXd& row) {
            auto it = meta_index.find(id);
            if (it == meta_index.end()) {
                throw ValidationError("experiment \"" + id + "\" has no metadata row");
            }
            dispatch_row(meta[it->second], status[it->second], row, baselines, gene_index, plan,
                         engine);
        });
        engine.finish();
    }

    InferResult result;
    result.report.mode =
        config.mode == PipelineMode::knockdown ? "knockdown" : "two-class";
    result.report.threads = config.threads;
    count_kinds(meta, status, result.report);

    std::vector<EdgeScore> scores;
    assemble_scores(engine, plan, gene_ids, prior, config.g_policy, config.min_experiments,
                    scores, result.report.pairs_skipped, result.report.regulators_scored);
    result.report.pairs_scored = static_cast<std::int64_t>(scores.size());
    result.edges = rank_edges(std::move(scores), result.report.pairs_skipped);

    write_edgelist_file(result.edges, config.output_path);
    result.report.wall_ms = elapsed_ms(start);
    return result;
}

InferResult infer_dataset(const ExpressionDataset& dataset, const InferConfig& config) {
    auto start = std::chrono::steady_clock::now();
    if (config.min_experiments < 3) throw ValidationError("min_experiments must be >= 3");
    if (config.threads < 1) throw ValidationError("threads must be >= 1");
    PriorSpec prior = resolve_prior_spec(config);

    PlateBaselines baselines = compute_plate_baselines(dataset);
    check_mode_not_empty(config.mode, dataset.experiments, dataset.status);
    ScoringPlan plan = build_plan(dataset.experiments, dataset.status, dataset.gene_index,
                                  config.mode);
    ScoringEngine engine(dataset.gene_ids.size(), plan.slot_ids.size(), config.threads);
    for (Eigen::Index i = 0; i < dataset.n_experiments(); ++i) {
        auto idx = static_cast<std::size_t>(i);
        dispatch_row(dataset.experiments[idx], dataset.status[idx], dataset.values.row(i),
                     baselines, dataset.gene_index, plan, engine);
    }
    engine.finish();

    InferResult result;
    result.report.mode =
        config.mode == PipelineMode::knockdown ? "knockdown" : "two-class";
    result.report.threads = config.threads;
    count_kinds(dataset.experiments, dataset.status, result.report);

    std::vector<EdgeScore> scores;
    assemble_scores(engine, plan, dataset.gene_ids, prior, config.g_policy,
                    config.min_experiments, scores, result.report.pairs_skipped,
                    result.report.regulators_scored);
    result.report.pairs_scored = static_cast<std::int64_t>(scores.size());
    result.edges = rank_edges(std::move(scores), result.report.pairs_skipped);

    if (!config.output_path.empty()) write_edgelist_file(result.edges, config.output_path);
    result.report.wall_ms = elapsed_ms(start);
    return result;
}

void EvalConfig::validate() const {
    if (edgelist_path.empty()) throw ValidationError("eval: --edgelist is required");
    if (reference_path.empty()) throw ValidationError("eval: --reference is required");
    if (output_path.empty()) throw ValidationError("eval: --output is required");
    for (double c : cutoffs) {
        if (!(c >= 0.0 && c <= 1.0)) {
            throw ValidationError("eval: cutoffs must lie in [0,1]");
        }
    }
}

std::string EvalRunResult::to_json() const {
    nlohmann::ordered_json j;
    j["considered"] = report.considered;
    j["in_universe"] = report.in_universe;
    j["duplicates_dropped"] = report.duplicates_dropped;
    j["baseline_precision"] = report.curve.baseline_precision;
    j["auprc"] = report.auprc;
    j["cutoffs"] = nlohmann::ordered_json::array();
    for (const auto& c : report.cutoffs) {
        j["cutoffs"].push_back({{"cutoff", c.cutoff},
                                {"tp", c.table.tp},
                                {"fp", c.table.fp},
                                {"fn", c.table.fn},
                                {"tn", c.table.tn},
                                {"pvalue", c.pvalue}});
    }
    return j.dump(2);
}

EvalRunResult run_eval(const EvalConfig& config) {
    config.validate();
    RankedEdgeList list = read_edgelist_file(config.edgelist_path);
    ReferenceStandard ref = load_reference_file(config.reference_path);

    EvalRunResult result;
    result.report = evaluate(list, ref, config.cutoffs);
    if (result.report.in_universe == 0) {
        throw ValidationError("no edge in the list falls inside the assessment universe (" +
                              std::to_string(list.edges.size()) + " edges checked)");
    }
    {
        std::ofstream out(config.output_path, std::ios::binary);
        if (!out) throw IoError("cannot open file for writing: " + config.output_path);
        write_confusion_report(result.report.cutoffs, out);
    }
    if (!config.curve_path.empty()) {
        std::ofstream out(config.curve_path, std::ios::binary);
        if (!out) throw IoError("cannot open file for writing: " + config.curve_path);
        write_pr_curve(result.report.curve, out);
    }
    return result;
}

void SimulateConfig::validate() const {
    if (out_prefix.empty()) throw ValidationError("simulate: --out-prefix is required");
    sim.validate();
}

std::string SimulateResult::to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["edges"] = edges;
    j["experiments"] = experiments;
    j["expression"] = expression_path;
    j["metadata"] = metadata_path;
    j["truth"] = truth_path;
    return j.dump(2);
}

SimulateResult run_simulate(const SimulateConfig& config) {
    config.validate();
    TrueNetwork network = generate_network(config.sim);
    ExpressionDataset dataset = simulate_dataset(network, config.sim);

    SimulateResult result;
    result.seed = config.sim.seed;
    result.edges = static_cast<std::int64_t>(network.edges.size());
    result.experiments = dataset.n_experiments();
    result.expression_path = config.out_prefix + "_expression.tsv";
    result.metadata_path = config.out_prefix + "_metadata.tsv";
    result.truth_path = config.out_prefix + "_truth.tsv";

    {
        std::ofstream out(result.expression_path, std::ios::binary);
        if (!out) throw IoError("cannot open file for writing: " + result.expression_path);
        write_expression(dataset, out);
    }
    {
        std::ofstream out(result.metadata_path, std::ios::binary);
        if (!out) throw IoError("cannot open file for writing: " + result.metadata_path);
        write_metadata(dataset.experiments, out);
    }
    {
        std::ofstream out(result.truth_path, std::ios::binary);
        if (!out) throw IoError("cannot open file for writing: " + result.truth_path);
        write_truth(network, out);
    }
    return result;
}

}  // namespace kdinfer
