#include "kdinfer/scoring.hpp"

#include <cmath>

#include "kdinfer/errors.hpp"

namespace kdinfer {

std::optional<EdgeScore> score_accumulator(const PairAccumulator<double>& acc, double prior,
                                           const GPolicy& policy, std::int64_t min_experiments) {
    if (min_experiments < 3) {
        throw ValidationError("min_experiments must be >= 3 (the evidence term needs n >= 3)");
    }
    if (acc.n < min_experiments) return std::nullopt;
    EdgeScore s;
    s.n = acc.n;
    s.r2 = rsquared(acc);
    s.g = choose_g(acc.n, policy);
    s.prior = prior;
    s.log_odds = log_posterior_odds(s.r2, s.n, s.g, prior);
    s.posterior = posterior_probability(s.log_odds);
    return s;
}

std::optional<EdgeScore> score_pair(const Eigen::VectorXd& zx, const Eigen::VectorXd& zy,
                                    double prior, const GPolicy& policy,
                                    std::int64_t min_experiments) {
    if (zx.size() != zy.size()) {
        throw ValidationError("score_pair: vectors differ in length (" +
                              std::to_string(zx.size()) + " vs " + std::to_string(zy.size()) +
                              ")");
    }
    PairAccumulator<double> acc;
    for (Eigen::Index i = 0; i < zx.size(); ++i) {
        if (std::isnan(zx[i]) || std::isnan(zy[i])) continue;
        acc.add(zx[i], zy[i]);
    }
    return score_accumulator(acc, prior, policy, min_experiments);
}

RegulatorScores score_regulator(const std::string& h, const ZScoreMatrix& zmatrix,
                                const PriorSpec& prior, const GPolicy& policy,
                                std::int64_t min_experiments) {
    auto it = zmatrix.gene_index.find(h);
    if (it == zmatrix.gene_index.end()) {
        throw ValidationError("regulator \"" + h + "\" is not on the panel");
    }
    const Eigen::Index hcol = it->second;
    const Eigen::Index n_genes = zmatrix.z.cols();

    std::vector<PairAccumulator<double>> accs(static_cast<std::size_t>(n_genes));
    RegulatorScores out;
    for (Eigen::Index row = 0; row < zmatrix.z.rows(); ++row) {
        const auto& m = zmatrix.experiments[static_cast<std::size_t>(row)];
        if (m.kind != ExperimentKind::knockdown || m.target_gene != h) continue;
        ++out.n_experiments;
        double zx = zmatrix.z(row, hcol);
        if (std::isnan(zx)) continue;
        for (Eigen::Index t = 0; t < n_genes; ++t) {
            if (t == hcol) continue;
            double zy = zmatrix.z(row, t);
            if (std::isnan(zy)) continue;
            accs[static_cast<std::size_t>(t)].add(zx, zy);
        }
    }

    for (Eigen::Index t = 0; t < n_genes; ++t) {
        if (t == hcol) continue;
        const auto& target = zmatrix.gene_ids[static_cast<std::size_t>(t)];
        auto score = score_accumulator(accs[static_cast<std::size_t>(t)],
                                       resolve_prior(prior, h, target), policy, min_experiments);
        if (!score) {
            ++out.skipped;
            continue;
        }
        score->regulator = h;
        score->target = target;
        out.scores.push_back(std::move(*score));
    }
    return out;
}

std::optional<EdgeScore> two_class_score(const Eigen::VectorXd& control_values,
                                         const Eigen::VectorXd& perturbed_values, double prior,
                                         const GPolicy& policy, std::int64_t min_experiments) {
    PairAccumulator<double> acc;
    std::int64_t n_control = 0;
    std::int64_t n_perturbed = 0;
    for (Eigen::Index i = 0; i < control_values.size(); ++i) {
        if (std::isnan(control_values[i])) continue;
        acc.add(0.0, control_values[i]);
        ++n_control;
    }
    for (Eigen::Index i = 0; i < perturbed_values.size(); ++i) {
        if (std::isnan(perturbed_values[i])) continue;
        acc.add(1.0, perturbed_values[i]);
        ++n_perturbed;
    }
    if (n_control == 0 || n_perturbed == 0) return std::nullopt;
    return score_accumulator(acc, prior, policy, min_experiments);
}

}  // namespace kdinfer
