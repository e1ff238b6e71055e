#include "attn/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "attn/rng.hpp"
#include "attn/stats.hpp"

namespace attn {

StoppingThreshold stopping_threshold(double theta, double mean, double stddev, double delta) {
    if (!(stddev > 0.0) || !std::isfinite(stddev))
        throw DomainError("stopping_threshold: std must be positive and finite");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw DomainError("stopping_threshold: delta must lie in (0,1)");
    const double quantile = inverse_normal_cdf(1.0 - delta);
    const double tau = 0.5 * (theta - mean + stddev * quantile);
    return StoppingThreshold{tau, theta, delta, mean, stddev, quantile};
}

std::vector<std::uint32_t> evaluation_order(const LabeledExample& ex, const LinearModel& model,
                                            OrderPolicy policy, std::uint64_t seed,
                                            std::uint64_t example_id) {
    const std::size_t n = ex.features.size();
    switch (policy) {
        case OrderPolicy::NaturalIndex: {
            std::vector<std::uint32_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0u);
            return perm;
        }
        case OrderPolicy::SeededShuffle:
            return random_permutation<std::uint32_t>(n, Rng::keyed(seed, example_id));
        case OrderPolicy::WeightMagnitudeDesc: {
            std::vector<std::uint32_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0u);
            const auto magnitude = [&](std::uint32_t pos) {
                const std::uint32_t idx = ex.features[pos].index;
                return idx < model.dimension() ? std::fabs(model.weights[idx]) : 0.0;
            };
            std::sort(perm.begin(), perm.end(), [&](std::uint32_t lhs, std::uint32_t rhs) {
                const bool lb = ex.features[lhs].index == kBiasIndex;
                const bool rb = ex.features[rhs].index == kBiasIndex;
                if (lb != rb) return lb;  // bias first
                const double lm = magnitude(lhs), rm = magnitude(rhs);
                if (lm != rm) return lm > rm;
                return ex.features[lhs].index < ex.features[rhs].index;
            });
            return perm;
        }
    }
    throw ContractError("evaluation_order: unknown policy");
}

ScanOutcome partial_margin_scan(const LinearModel& model, const LabeledExample& ex,
                                const StoppingThreshold& threshold,
                                std::span<const std::uint32_t> order, std::uint32_t stride,
                                bool filtering_enabled) {
    const std::size_t n = ex.features.size();
    if (order.size() != n)
        throw ContractError("partial_margin_scan: order has " + std::to_string(order.size()) +
                            " entries for an example with " + std::to_string(n) + " terms");
    if (stride < 1) throw ContractError("partial_margin_scan: stride must be >= 1");
    detail::require_fits(model, ex);

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += detail::term_value(model, ex, order[i]);
        const std::size_t step = i + 1;
        if (filtering_enabled && step < n && step % stride == 0 && acc > threshold.tau)
            return Filtered{static_cast<std::uint32_t>(step), acc, threshold.tau};
    }
    return Completed{acc, static_cast<std::uint32_t>(n)};
}

PartialScanState replay_prefix(const LinearModel& model, const LabeledExample& ex,
                               std::span<const std::uint32_t> order, std::uint32_t steps) {
    const std::size_t n = ex.features.size();
    if (order.size() != n)
        throw ContractError("replay_prefix: order length mismatch");
    if (steps > n)
        throw ContractError("replay_prefix: steps exceeds term count");
    detail::require_fits(model, ex);

    double acc = 0.0;
    for (std::uint32_t i = 0; i < steps; ++i) acc += detail::term_value(model, ex, order[i]);
    return PartialScanState{acc, steps, static_cast<std::uint32_t>(n)};
}

}  // namespace attn
