#include "attn/stats.hpp"

#include <cmath>
#include <numbers>

#include "attn/error.hpp"

namespace attn {

double normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

// Acklam's rational approximation for the lower region p in (0, 0.5].
// Relative accuracy ~1.15e-9 before refinement.
double acklam_lower(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double inverse_normal_cdf(double p) {
    if (!(p > 0.0) || !(p < 1.0))  // also rejects NaN
        throw DomainError("inverse_normal_cdf: p must lie in (0,1)");
    if (p == 0.5) return 0.0;
    // For p > 0.5, 1-p is exact (Sterbenz), making antisymmetry exact too.
    if (p > 0.5) return -inverse_normal_cdf(1.0 - p);

    double x = acklam_lower(p);
    // Halley refinement against Phi. Two steps push the error to the few-ulp
    // level; the left tail is the numerically stable side for erfc.
    for (int it = 0; it < 2; ++it) {
        const double err = normal_cdf(x) - p;
        const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

MarginMoments moments_update(MarginMoments m, double observed_margin) {
    if (!std::isfinite(observed_margin))
        throw DomainError("moments_update: observed margin is not finite");
    if (m.count < m.warmup) {
        // Welford phase: exact cumulative mean / sample variance.
        m.count += 1;
        const double delta = observed_margin - m.mean;
        m.mean += delta / static_cast<double>(m.count);
        m.welford_m2 += delta * (observed_margin - m.mean);
        m.second_moment =
            m.count >= 2 ? m.welford_m2 / static_cast<double>(m.count - 1) : 0.0;
    } else {
        m.count += 1;
        m.mean = m.decay * m.mean + (1.0 - m.decay) * observed_margin;
        const double dev = observed_margin - m.mean;
        m.second_moment = m.decay * m.second_moment + (1.0 - m.decay) * dev * dev;
    }
    return m;
}

std::pair<double, double> moments_mean_std(const MarginMoments& m, double min_std) noexcept {
    const double sd = std::sqrt(m.second_moment);
    return {m.mean, sd > min_std ? sd : min_std};
}

}  // namespace attn
