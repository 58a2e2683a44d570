#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace kdinfer {

/// Streaming mean/variance accumulator in the numerically stable deviation
/// form (Welford update, Chan et al. merge). Raw sums of squares cancel
/// catastrophically once plate means dwarf the control spread; tracking the
/// centered second moment keeps the one-pass property without that loss.
///
/// merge(a, b) equals accumulating the concatenated streams, up to
/// floating-point associativity, so control experiments may be partitioned
/// arbitrarily across workers.
template <typename Scalar = double>
class RunningStats {
public:
    void add(Scalar value) {
        if (!std::isfinite(value)) {
            throw std::domain_error("RunningStats: non-finite value");
        }
        ++n_;
        Scalar delta = value - mean_;
        mean_ += delta / static_cast<Scalar>(n_);
        m2_ += delta * (value - mean_);
    }

    void merge(const RunningStats& other) {
        if (other.n_ == 0) return;
        if (n_ == 0) {
            *this = other;
            return;
        }
        std::int64_t n = n_ + other.n_;
        Scalar delta = other.mean_ - mean_;
        mean_ += delta * static_cast<Scalar>(other.n_) / static_cast<Scalar>(n);
        m2_ += other.m2_ + delta * delta * static_cast<Scalar>(n_) *
                               static_cast<Scalar>(other.n_) / static_cast<Scalar>(n);
        n_ = n;
    }

    std::int64_t count() const { return n_; }
    Scalar mean() const { return mean_; }

    /// Centered sum of squared deviations, sum_i (x_i - mean)^2.
    Scalar m2() const { return m2_; }

    /// Sample variance (divisor n-1). Requires count() >= 2.
    Scalar variance() const {
        if (n_ < 2) throw std::domain_error("RunningStats: variance needs n >= 2");
        return m2_ / static_cast<Scalar>(n_ - 1);
    }

    Scalar sd() const { return std::sqrt(variance()); }

private:
    std::int64_t n_ = 0;
    Scalar mean_ = 0;
    Scalar m2_ = 0;
};

template <typename Scalar>
RunningStats<Scalar> merged(RunningStats<Scalar> a, const RunningStats<Scalar>& b) {
    a.merge(b);
    return a;
}

}  // namespace kdinfer
