#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace kdinfer {

/// How to pick the g-prior scale for a pair with n observations.
/// g = 1 means the slope is expected to be indistinguishable from noise;
/// g = n is a unit information prior. sqrt_n sits between the extremes
/// and is the default. A fixed value is clamped into [1, n].
struct GPolicy {
    enum class Kind { sqrt_n, unit_information, fixed };
    Kind kind = Kind::sqrt_n;
    double fixed_value = 1.0;

    static GPolicy sqrt_n() { return {Kind::sqrt_n, 1.0}; }
    static GPolicy unit_information() { return {Kind::unit_information, 1.0}; }
    static GPolicy fixed(double v) { return {Kind::fixed, v}; }
};

inline double choose_g(std::int64_t n, const GPolicy& policy) {
    double nf = static_cast<double>(n);
    switch (policy.kind) {
        case GPolicy::Kind::sqrt_n:
            return std::sqrt(nf);
        case GPolicy::Kind::unit_information:
            return nf;
        case GPolicy::Kind::fixed:
            return std::min(std::max(policy.fixed_value, 1.0), nf);
    }
    return std::sqrt(nf);
}

/// Log posterior odds that the regulator-target edge is real:
///
///   log T = log(prior / (1 - prior))
///         + (n - 2) log(1 + g) / 2
///         - (n - 1) log(1 + g (1 - R^2)) / 2
///
/// The data term is the closed-form Bayes factor of the simple linear
/// regression under a Zellner g-prior on the slope (flat intercept,
/// 1/sigma^2 scale prior) against the intercept-only null; the slope,
/// intercept and noise variance are marginalized analytically. Computed
/// entirely in log space: the exponentiated form overflows once
/// n log(1+g) gets large. prior = 0 and prior = 1 give -inf / +inf.
inline double log_posterior_odds(double r2, std::int64_t n, double g, double prior) {
    if (!(r2 >= 0.0 && r2 <= 1.0)) throw std::domain_error("log_posterior_odds: r2 outside [0,1]");
    if (n < 3) throw std::domain_error("log_posterior_odds: n < 3");
    if (!(g >= 1.0)) throw std::domain_error("log_posterior_odds: g < 1");
    if (!(prior >= 0.0 && prior <= 1.0)) throw std::domain_error("log_posterior_odds: prior outside [0,1]");
    if (prior == 0.0) return -std::numeric_limits<double>::infinity();
    if (prior == 1.0) return std::numeric_limits<double>::infinity();
    double nf = static_cast<double>(n);
    double log_prior_odds = std::log(prior) - std::log1p(-prior);
    double evidence = (nf - 2.0) * std::log1p(g) / 2.0 -
                      (nf - 1.0) * std::log1p(g * (1.0 - r2)) / 2.0;
    return log_prior_odds + evidence;
}

/// Overflow-safe logistic of the log odds; +-inf map to 1 / 0.
inline double posterior_probability(double log_odds) {
    if (log_odds >= 0.0) {
        return 1.0 / (1.0 + std::exp(-log_odds));
    }
    double t = std::exp(log_odds);
    return t / (1.0 + t);
}

}  // namespace kdinfer
