#pragma once

// Independent reference implementations the tests compare the library
// against. Everything here deliberately avoids the library's own
// algorithms: plain two-pass statistics, a direct least-squares fit, a
// numerical-integration Bayes factor and a long-double binomial tail.

#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

struct MeanSd {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations from the mean
    double sd = 0.0;  // sample sd, n-1 divisor (0 when n < 2)
};

/// Textbook two-pass mean and standard deviation.
MeanSd two_pass_mean_sd(const std::vector<double>& values);

/// R^2 of the simple linear regression of y on x, via an explicit
/// least-squares fit and 1 - RSS/TSS. Returns 0 for degenerate inputs.
double ols_r2(const std::vector<double>& xs, const std::vector<double>& ys);

/// Slope of the least-squares fit of y on x.
double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// log Bayes factor of the one-slope regression model against the
/// intercept-only null, with slope prior N(0, g sigma^2 / Sxx), flat
/// intercept and 1/sigma^2 scale prior, computed by composite
/// Gauss-Legendre quadrature over (slope, log sigma^2). Uses canonical
/// sufficient statistics (centered data, TSS = Sxx = 1, slope = sqrt(r2)),
/// which fully determine the likelihood.
double log_bayes_factor_quadrature(double r2, std::int64_t n, double g);

/// Exact binomial upper tail P(X >= tp) in long double precision.
long double binomial_tail_longdouble(std::int64_t tp, std::int64_t n, long double p0);

/// Create a fresh private directory under the system temp dir.
std::string make_temp_dir(const std::string& tag);

/// A reference standard and a matching score file with known confusion
/// tables at the default cutoffs: 37 regulators, 1139
/// targets (23 of them regulators), 4303 true edges, universe 42120;
/// 292 scored edges at posterior >= 0.5 of which 41 true, 76 at >= 0.95
/// of which 14 true. Deterministic; every score row is self-consistent
/// with the posterior formula (n = 25, g = 5, prior = 0.0005).
struct AssessmentFixture {
    std::string reference_path;
    std::string edgelist_path;
    std::int64_t n_regulators = 37;
    std::int64_t n_targets = 1139;
    std::int64_t n_true = 4303;
    std::int64_t universe = 42120;
};

AssessmentFixture write_assessment_fixture(const std::string& dir);

}  // namespace oracle
