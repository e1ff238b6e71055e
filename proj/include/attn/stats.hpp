#pragma once

#include <cstdint>
#include <utility>

namespace attn {

// Standard normal CDF, erfc based.
double normal_cdf(double x) noexcept;

// Inverse standard normal CDF. Rational initial approximation refined by
// Halley steps against the erfc-based CDF; |Phi(result) - p| stays well below
// 1e-9 across (0,1). Exactly antisymmetric around p = 0.5 by construction.
// Throws DomainError for p outside (0,1) or NaN.
double inverse_normal_cdf(double p);

// Streaming estimate of the full-margin mean and spread. The first `warmup`
// observations use exact Welford mean / sample variance; afterwards an
// exponential moving average with the given decay, so the estimate keeps
// tracking the margin distribution as it drifts under model updates.
struct MarginMoments {
    double mean = 0.0;
    // Sample variance during the Welford phase, EMA of squared deviation after.
    double second_moment = 0.0;
    std::uint64_t count = 0;
    double decay = 0.99;
    std::uint64_t warmup = 0;
    double welford_m2 = 0.0;  // running sum of squared deviations, warmup phase only

    bool operator==(const MarginMoments&) const = default;
};

// Functional update. Rejects non-finite observations with DomainError.
MarginMoments moments_update(MarginMoments m, double observed_margin);

// (mean, std) with std clamped from below by min_std. A fresh estimator
// reports (0, min_std).
std::pair<double, double> moments_mean_std(const MarginMoments& m, double min_std) noexcept;

}  // namespace attn
