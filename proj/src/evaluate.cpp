#include "kdinfer/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "kdinfer/errors.hpp"
#include "kdinfer/tsv.hpp"

namespace kdinfer {

std::int64_t ReferenceStandard::universe_size() const {
    std::int64_t overlap = 0;
    for (const auto& r : regulators) overlap += targets.count(r) ? 1 : 0;
    return static_cast<std::int64_t>(regulators.size()) *
               static_cast<std::int64_t>(targets.size()) -
           overlap;
}

bool ReferenceStandard::in_universe(const std::string& regulator,
                                    const std::string& target) const {
    return regulator != target && regulators.count(regulator) && targets.count(target);
}

bool ReferenceStandard::is_true(const std::string& regulator, const std::string& target) const {
    return true_edges.count({regulator, target}) > 0;
}

ReferenceStandard load_reference(std::istream& in,
                                 std::optional<std::vector<std::string>> regulators_override,
                                 std::optional<std::vector<std::string>> targets_override) {
    tsv::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw ParseError("empty reference file");
    // A simulated truth table doubles as a reference: its effect column is
    // simply ignored.
    std::size_t columns = 0;
    if (line == "regulator\ttarget") {
        columns = 2;
    } else if (line == "regulator\ttarget\teffect") {
        columns = 3;
    } else {
        throw ParseError(
            "reference header must be exactly \"regulator\\ttarget\" "
            "(or \"regulator\\ttarget\\teffect\")");
    }

    ReferenceStandard ref;
    while (reader.next(line)) {
        auto cells = tsv::split(line);
        if (cells.size() != columns) {
            throw ParseError("line " + std::to_string(reader.line_no()) + ": expected " +
                             std::to_string(columns) + " columns, found " +
                             std::to_string(cells.size()));
        }
        if (cells[0].empty() || cells[1].empty()) {
            throw ValidationError("line " + std::to_string(reader.line_no()) + ": empty gene id");
        }
        if (cells[0] == cells[1]) {
            throw ValidationError("line " + std::to_string(reader.line_no()) + ": self-edge " +
                                  std::string(cells[0]) + " -> " + std::string(cells[1]));
        }
        auto edge = std::make_pair(std::string(cells[0]), std::string(cells[1]));
        if (!ref.true_edges.insert(edge).second) {
            ++ref.duplicate_rows;
            continue;
        }
        ref.regulators.insert(edge.first);
        ref.targets.insert(edge.second);
    }

    if (regulators_override) {
        ref.regulators = {regulators_override->begin(), regulators_override->end()};
    }
    if (targets_override) {
        ref.targets = {targets_override->begin(), targets_override->end()};
    }
    for (const auto& [r, t] : ref.true_edges) {
        if (!ref.regulators.count(r) || !ref.targets.count(t)) {
            throw ValidationError("true edge " + r + " -> " + t +
                                  " falls outside the assessment universe");
        }
    }
    return ref;
}

ReferenceStandard load_reference_file(const std::string& path,
                                      std::optional<std::vector<std::string>> regulators_override,
                                      std::optional<std::vector<std::string>> targets_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    return load_reference(in, std::move(regulators_override), std::move(targets_override));
}

RankedEdgeList restrict_universe(const RankedEdgeList& list, const ReferenceStandard& ref) {
    RankedEdgeList out;
    out.skipped = list.skipped;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : list.edges) {
        if (!ref.in_universe(e.regulator, e.target)) continue;
        if (!seen.emplace(e.regulator, e.target).second) continue;
        out.edges.push_back(e);
    }
    return out;
}

RankedEdgeList complete_universe(const RankedEdgeList& restricted, const ReferenceStandard& ref) {
    std::set<std::pair<std::string, std::string>> present;
    for (const auto& e : restricted.edges) present.emplace(e.regulator, e.target);

    RankedEdgeList out = restricted;
    for (const auto& r : ref.regulators) {
        for (const auto& t : ref.targets) {
            if (r == t || present.count({r, t})) continue;
            EdgeScore e;
            e.regulator = r;
            e.target = t;
            e.log_odds = -std::numeric_limits<double>::infinity();
            e.posterior = 0.0;
            out.edges.push_back(std::move(e));
        }
    }
    return out;
}

ConfusionTable confusion_at_cutoff(const RankedEdgeList& restricted, const ReferenceStandard& ref,
                                   double cutoff) {
    if (!(cutoff >= 0.0 && cutoff <= 1.0)) {
        throw ValidationError("cutoff must lie in [0,1], got " + tsv::format_value(cutoff));
    }
    ConfusionTable c;
    for (const auto& e : restricted.edges) {
        if (e.posterior < cutoff) break;  // sorted: the rest are below too
        if (ref.is_true(e.regulator, e.target)) {
            ++c.tp;
        } else {
            ++c.fp;
        }
    }
    c.fn = static_cast<std::int64_t>(ref.true_edges.size()) - c.tp;
    c.tn = ref.universe_size() - c.tp - c.fp - c.fn;
    return c;
}

double binomial_tail_pvalue(std::int64_t tp, std::int64_t n_predicted, double p0) {
    if (tp < 0 || n_predicted < 0 || tp > n_predicted) {
        throw std::domain_error("binomial_tail_pvalue: need 0 <= tp <= n_predicted");
    }
    if (!(p0 >= 0.0 && p0 <= 1.0)) {
        throw std::domain_error("binomial_tail_pvalue: p0 outside [0,1]");
    }
    if (tp == 0) return 1.0;
    if (p0 == 0.0) return 0.0;
    if (p0 == 1.0) return 1.0;

    // P(X >= tp) = sum_{k=tp}^{n} C(n,k) p^k q^(n-k), each term in logs,
    // combined by log-sum-exp so tails far below double range still work.
    const double log_p = std::log(p0);
    const double log_q = std::log1p(-p0);
    const double log_n_fact = std::lgamma(static_cast<double>(n_predicted) + 1.0);
    std::vector<double> log_terms;
    log_terms.reserve(static_cast<std::size_t>(n_predicted - tp + 1));
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::int64_t k = tp; k <= n_predicted; ++k) {
        double kf = static_cast<double>(k);
        double nk = static_cast<double>(n_predicted - k);
        double lt = log_n_fact - std::lgamma(kf + 1.0) - std::lgamma(nk + 1.0) + kf * log_p +
                    nk * log_q;
        log_terms.push_back(lt);
        max_log = std::max(max_log, lt);
    }
    double sum = 0.0;
    for (double lt : log_terms) sum += std::exp(lt - max_log);
    double p = std::exp(max_log) * sum;
    return std::min(p, 1.0);
}

PRCurve precision_recall(const RankedEdgeList& restricted, const ReferenceStandard& ref) {
    if (ref.true_edges.empty()) {
        throw ValidationError("recall undefined: reference has no true edges");
    }
    PRCurve curve;
    curve.baseline_precision = static_cast<double>(ref.true_edges.size()) /
                               static_cast<double>(ref.universe_size());
    curve.points.reserve(restricted.edges.size());
    std::int64_t tp = 0;
    std::int64_t rank = 0;
    const double n_true = static_cast<double>(ref.true_edges.size());
    for (const auto& e : restricted.edges) {
        ++rank;
        if (ref.is_true(e.regulator, e.target)) ++tp;
        curve.points.push_back(
            {rank, static_cast<double>(tp) / static_cast<double>(rank), static_cast<double>(tp) / n_true});
    }
    return curve;
}

double auprc(const PRCurve& curve) {
    // Trapezoids between successive recall levels; flat-recall points are
    // false positives and do not advance the area.
    double area = 0.0;
    double prev_recall = 0.0;
    double prev_precision = 0.0;
    bool have_first = false;
    for (const auto& pt : curve.points) {
        if (pt.recall <= prev_recall && have_first) continue;
        if (!have_first) {
            if (pt.recall <= 0.0) continue;
            prev_precision = pt.precision;  // anchor at (0, first hit's precision)
            have_first = true;
        }
        area += (pt.recall - prev_recall) * (pt.precision + prev_precision) / 2.0;
        prev_recall = pt.recall;
        prev_precision = pt.precision;
    }
    return area;
}

EvalReport evaluate(const RankedEdgeList& list, const ReferenceStandard& ref,
                    const std::vector<double>& cutoffs) {
    EvalReport report;
    report.considered = static_cast<std::int64_t>(list.edges.size());

    std::int64_t in_universe_rows = 0;
    for (const auto& e : list.edges) {
        if (ref.in_universe(e.regulator, e.target)) ++in_universe_rows;
    }
    RankedEdgeList restricted = restrict_universe(list, ref);
    report.in_universe = static_cast<std::int64_t>(restricted.edges.size());
    report.duplicates_dropped = in_universe_rows - report.in_universe;

    RankedEdgeList completed = complete_universe(restricted, ref);
    const double p0 = static_cast<double>(ref.true_edges.size()) /
                      static_cast<double>(ref.universe_size());
    for (double cutoff : cutoffs) {
        CutoffReport r;
        r.cutoff = cutoff;
        r.table = confusion_at_cutoff(completed, ref, cutoff);
        r.pvalue = binomial_tail_pvalue(r.table.tp, r.table.predicted(), p0);
        report.cutoffs.push_back(r);
    }
    report.curve = precision_recall(completed, ref);
    report.auprc = auprc(report.curve);
    return report;
}

void write_confusion_report(const std::vector<CutoffReport>& reports, std::ostream& out) {
    out << "cutoff\ttp\tfp\tfn\ttn\tpvalue\n";
    for (const auto& r : reports) {
        out << tsv::format_value(r.cutoff) << '\t' << r.table.tp << '\t' << r.table.fp << '\t'
            << r.table.fn << '\t' << r.table.tn << '\t' << tsv::format_value(r.pvalue) << '\n';
    }
    if (!out) throw IoError("failed writing confusion report");
}

void write_pr_curve(const PRCurve& curve, std::ostream& out) {
    out << "# baseline_precision=" << tsv::format_value(curve.baseline_precision) << '\n';
    out << "rank\tprecision\trecall\n";
    for (const auto& pt : curve.points) {
        out << pt.rank << '\t' << tsv::format_value(pt.precision) << '\t'
            << tsv::format_value(pt.recall) << '\n';
    }
    if (!out) throw IoError("failed writing precision-recall curve");
}

}  // namespace kdinfer
