#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kdinfer/edgelist.hpp"

namespace kdinfer {

/// Known true edges plus the assessment universe: every ordered pair
/// (r, t) with r in regulators, t in targets, r != t. Self-pairs are
/// excluded from the universe, so |U| = |R|·|T| − |R ∩ T|.
struct ReferenceStandard {
    std::set<std::pair<std::string, std::string>> true_edges;
    std::set<std::string> regulators;
    std::set<std::string> targets;
    std::int64_t duplicate_rows = 0;  ///< input rows dropped as repeats

    std::int64_t universe_size() const;
    bool in_universe(const std::string& regulator, const std::string& target) const;
    bool is_true(const std::string& regulator, const std::string& target) const;
};

/// Load a reference TSV with header "regulator\ttarget" (a simulated
/// truth table with its extra effect column is also accepted). By default
/// the regulator/target universes are the distinct ids seen in the file;
/// an override widens (or narrows) either universe, e.g. to "all panel
/// genes". Every true edge must lie inside the final universe.
ReferenceStandard load_reference(std::istream& in,
                                 std::optional<std::vector<std::string>> regulators_override = {},
                                 std::optional<std::vector<std::string>> targets_override = {});
ReferenceStandard load_reference_file(const std::string& path,
                                      std::optional<std::vector<std::string>> regulators_override = {},
                                      std::optional<std::vector<std::string>> targets_override = {});

/// Keep only edges inside the reference universe, preserving order.
/// Repeated (regulator, target) pairs keep their best-ranked occurrence;
/// later repeats are dropped so each universe pair is counted once.
RankedEdgeList restrict_universe(const RankedEdgeList& list, const ReferenceStandard& ref);

/// Append every universe pair missing from the (restricted) list with
/// posterior 0, in (regulator, target) id order, so confusion tables and
/// curves cover the whole universe.
RankedEdgeList complete_universe(const RankedEdgeList& restricted, const ReferenceStandard& ref);

struct ConfusionTable {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t predicted() const { return tp + fp; }
};

/// 2x2 table at a posterior cutoff. Predicted positive = posterior >=
/// cutoff; tn is derived from the universe size. The list must already be
/// restricted to the universe.
ConfusionTable confusion_at_cutoff(const RankedEdgeList& restricted, const ReferenceStandard& ref,
                                   double cutoff);

/// Exact upper tail P(X >= tp) for X ~ Binomial(n_predicted, p0),
/// summed in log space.
double binomial_tail_pvalue(std::int64_t tp, std::int64_t n_predicted, double p0);

struct PRPoint {
    std::int64_t rank = 0;
    double precision = 0.0;
    double recall = 0.0;
};

struct PRCurve {
    std::vector<PRPoint> points;  ///< one per rank, ties not collapsed
    double baseline_precision = 0.0;
};

/// Per-rank precision/recall over a restricted list. The true-edge set
/// must be non-empty (recall is undefined otherwise).
PRCurve precision_recall(const RankedEdgeList& restricted, const ReferenceStandard& ref);

/// Area under the PR curve: trapezoids over the points where recall
/// increases, anchored at recall 0 with the first such point's precision.
double auprc(const PRCurve& curve);

struct CutoffReport {
    double cutoff = 0.0;
    ConfusionTable table;
    double pvalue = 1.0;
};

/// One-stop assessment: restrict to the universe, complete it, build the
/// confusion table and binomial p-value at each cutoff (p0 = true-edge
/// density of the universe), and the full PR curve with its area.
struct EvalReport {
    std::int64_t considered = 0;       ///< edges in the input list
    std::int64_t in_universe = 0;      ///< edges surviving restriction
    std::int64_t duplicates_dropped = 0;
    std::vector<CutoffReport> cutoffs;
    PRCurve curve;
    double auprc = 0.0;
};

EvalReport evaluate(const RankedEdgeList& list, const ReferenceStandard& ref,
                    const std::vector<double>& cutoffs);

/// "cutoff\ttp\tfp\tfn\ttn\tpvalue", one row per cutoff.
void write_confusion_report(const std::vector<CutoffReport>& reports, std::ostream& out);

/// "# baseline_precision=<v>" comment, then "rank\tprecision\trecall".
void write_pr_curve(const PRCurve& curve, std::ostream& out);

}  // namespace kdinfer
