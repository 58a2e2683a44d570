#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace kdinfer {

/// Six mergeable sufficient statistics for one regulator-target pair:
/// n, sum x, sum y, sum x^2, sum y^2, sum xy over z-scored observations.
/// x is the knocked-down gene, y the candidate target. Everything the
/// posterior needs reduces to these, so scoring is a single pass.
template <typename Scalar = double>
struct PairAccumulator {
    std::int64_t n = 0;
    Scalar sx = 0;
    Scalar sy = 0;
    Scalar sxx = 0;
    Scalar syy = 0;
    Scalar sxy = 0;

    void add(Scalar zx, Scalar zy) {
        if (!std::isfinite(zx) || !std::isfinite(zy)) {
            throw std::domain_error("PairAccumulator: non-finite observation");
        }
        ++n;
        sx += zx;
        sy += zy;
        sxx += zx * zx;
        syy += zy * zy;
        sxy += zx * zy;
    }

    /// Sums are plain additions, so merging equals accumulating the
    /// concatenated streams up to floating-point associativity.
    void merge(const PairAccumulator& other) {
        n += other.n;
        sx += other.sx;
        sy += other.sy;
        sxx += other.sxx;
        syy += other.syy;
        sxy += other.sxy;
    }
};

/// Coefficient of determination of the simple regression of y on x,
/// equal to the squared Pearson correlation:
///   R^2 = (n sxy - sx sy)^2 / [(n sxx - sx^2)(n syy - sy^2)]
/// clamped into [0, 1]. A degenerate side (constant x or constant y,
/// variance term <= 0 up to rounding) carries no regression evidence and
/// maps to 0. Requires n >= 3.
template <typename Scalar>
Scalar rsquared(const PairAccumulator<Scalar>& acc) {
    if (acc.n < 3) throw std::domain_error("rsquared: needs n >= 3");
    Scalar nf = static_cast<Scalar>(acc.n);
    Scalar vx = nf * acc.sxx - acc.sx * acc.sx;
    Scalar vy = nf * acc.syy - acc.sy * acc.sy;
    Scalar tol_x = Scalar(1e-12) * std::max(nf * std::abs(acc.sxx), acc.sx * acc.sx);
    Scalar tol_y = Scalar(1e-12) * std::max(nf * std::abs(acc.syy), acc.sy * acc.sy);
    if (vx <= tol_x || vy <= tol_y) return 0;
    Scalar cov = nf * acc.sxy - acc.sx * acc.sy;
    Scalar r2 = (cov * cov) / (vx * vy);
    if (r2 < 0) return 0;
    if (r2 > 1) return 1;
    return r2;
}

}  // namespace kdinfer
