#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "attn/types.hpp"

namespace attn {

// Constant stopping level for partial-margin scans:
//   tau = 0.5 * (theta - mean + std * quantile),  quantile = Phi^{-1}(1 - delta).
// Inputs are carried alongside tau so it is recomputable from the fields.
struct StoppingThreshold {
    double tau = 0.0;
    double theta = 0.0;
    double delta = 0.0;
    double mean_used = 0.0;
    double std_used = 0.0;
    double quantile = 0.0;
};

// Throws DomainError unless stddev > 0 and delta in (0,1).
StoppingThreshold stopping_threshold(double theta, double mean, double stddev, double delta);

// Permutation of the example's stored-feature positions.
//   NaturalIndex        identity
//   SeededShuffle       Fisher-Yates keyed by (seed, example_id); bit-reproducible
//   WeightMagnitudeDesc |weight| descending, ties by ascending feature index,
//                       bias position (feature index 0) pinned first
std::vector<std::uint32_t> evaluation_order(const LabeledExample& ex, const LinearModel& model,
                                            OrderPolicy policy, std::uint64_t seed,
                                            std::uint64_t example_id);

// Accumulates margin terms in the given order. After every stride-th term --
// never after the final one -- the partial sum is compared against tau when
// filtering is enabled; a strict crossing (S_i > tau) stops the scan. At
// S_i == tau the scan continues. With filtering disabled the outcome is always
// Completed, and under natural order its margin equals full_margin bit for bit.
// Throws ContractError when order.size() mismatches the example's term count.
ScanOutcome partial_margin_scan(const LinearModel& model, const LabeledExample& ex,
                                const StoppingThreshold& threshold,
                                std::span<const std::uint32_t> order, std::uint32_t stride,
                                bool filtering_enabled);

// Recomputes S_i after `steps` terms of the given order (audit helper; the
// result is bit-identical to what the scan saw at that point).
PartialScanState replay_prefix(const LinearModel& model, const LabeledExample& ex,
                               std::span<const std::uint32_t> order, std::uint32_t steps);

}  // namespace attn
