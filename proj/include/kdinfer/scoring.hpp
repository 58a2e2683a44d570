#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kdinfer/dataset.hpp"
#include "kdinfer/pair_stats.hpp"
#include "kdinfer/posterior.hpp"
#include "kdinfer/prior.hpp"

namespace kdinfer {

/// One scored regulator-target pair. posterior = logistic(log_odds);
/// log_odds may be +-inf when the prior is 1 or 0.
struct EdgeScore {
    std::string regulator;
    std::string target;
    std::int64_t n = 0;
    double r2 = 0.0;
    double g = 0.0;
    double prior = 0.0;
    double log_odds = 0.0;
    double posterior = 0.0;
};

/// Scores for one regulator h: one EdgeScore per target with enough
/// paired observations, plus how many candidate targets were skipped for
/// lack of data and how many knockdown experiments of h fed the pass.
struct RegulatorScores {
    std::vector<EdgeScore> scores;
    std::int64_t skipped = 0;
    std::int64_t n_experiments = 0;
};

inline constexpr std::int64_t kDefaultMinExperiments = 3;

/// Turn one pair's sufficient statistics into an EdgeScore (ids left for
/// the caller to fill). nullopt when acc.n < min_experiments.
std::optional<EdgeScore> score_accumulator(const PairAccumulator<double>& acc, double prior,
                                           const GPolicy& policy,
                                           std::int64_t min_experiments = kDefaultMinExperiments);

/// Score one pair from z-score vectors of equal length. Positions where
/// either value is missing are dropped (pairwise deletion); nullopt when
/// fewer than min_experiments pairs remain.
std::optional<EdgeScore> score_pair(const Eigen::VectorXd& zx, const Eigen::VectorXd& zy,
                                    double prior, const GPolicy& policy,
                                    std::int64_t min_experiments = kDefaultMinExperiments);

/// Score regulator h against every other gene on the panel in one pass
/// over h's knockdown experiments: all pair accumulators advance together
/// per experiment row. h itself is never a target.
RegulatorScores score_regulator(const std::string& h, const ZScoreMatrix& zmatrix,
                                const PriorSpec& prior, const GPolicy& policy,
                                std::int64_t min_experiments = kDefaultMinExperiments);

/// Two-class model: regress the target's z-scores on a 0/1 indicator
/// (0 = control, 1 = perturbation); R^2 is the squared point-biserial
/// correlation. Missing values are dropped. nullopt when either class is
/// empty or fewer than min_experiments observations remain.
std::optional<EdgeScore> two_class_score(const Eigen::VectorXd& control_values,
                                         const Eigen::VectorXd& perturbed_values, double prior,
                                         const GPolicy& policy,
                                         std::int64_t min_experiments = kDefaultMinExperiments);

}  // namespace kdinfer
