#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "attn/error.hpp"

namespace attn {

// Feature index 0 is the implicit bias term (value 1.0), inserted at ingestion
// so it participates in partial sums like any other weight.
inline constexpr std::uint32_t kBiasIndex = 0;

struct Feature {
    std::uint32_t index = 0;
    double value = 0.0;
    bool operator==(const Feature&) const = default;
};

// Sparse example with a label in {-1,+1}. Feature indices are strictly
// increasing within an example and all values are finite.
struct LabeledExample {
    std::vector<Feature> features;
    int label = 1;
    std::uint64_t id = 0;

    std::size_t term_count() const noexcept { return features.size(); }
    bool operator==(const LabeledExample&) const = default;
};

// Throws DataError when the invariants above do not hold.
void validate_example(const LabeledExample& ex);

// Dense weight vector; weights beyond the observed indices stay zero.
struct LinearModel {
    std::vector<double> weights;

    LinearModel() = default;
    explicit LinearModel(std::uint32_t dimension) : weights(dimension, 0.0) {}

    std::uint32_t dimension() const noexcept { return static_cast<std::uint32_t>(weights.size()); }
    bool operator==(const LinearModel&) const = default;
};

// One feature's contribution label * weight[index] * value to the margin.
struct MarginTerm {
    double value = 0.0;
};

// Accumulator snapshot of a partial scan: S_i after steps_taken of total_terms.
struct PartialScanState {
    double partial_sum = 0.0;
    std::uint32_t steps_taken = 0;
    std::uint32_t total_terms = 0;
};

enum class OrderPolicy { NaturalIndex, SeededShuffle, WeightMagnitudeDesc };

struct FilterConfig {
    double delta = 0.05;
    double theta = 0.0;
    std::uint32_t stride = 1;
    std::uint64_t warmup = 100;
    double decay = 0.99;
    double min_std = 1e-9;
    OrderPolicy order = OrderPolicy::SeededShuffle;
    std::uint64_t seed = 1;
    bool enabled = true;
};

// Throws DomainError on out-of-range knobs.
void validate_config(const FilterConfig& cfg);

// Scan stopped early: the partial sum crossed tau after `step` terms (step is
// strictly smaller than the example's term count).
struct Filtered {
    std::uint32_t step = 0;
    double partial_sum = 0.0;
    double tau = 0.0;
};

// Scan ran to the end: margin is the exact full sum over `terms` terms.
struct Completed {
    double margin = 0.0;
    std::uint32_t terms = 0;
};

using ScanOutcome = std::variant<Filtered, Completed>;

inline bool is_filtered(const ScanOutcome& o) noexcept {
    return std::holds_alternative<Filtered>(o);
}

// label * weight[index] * value for the feature stored at `position`.
// Throws DimensionError on an out-of-range position or feature index.
MarginTerm margin_term(const LinearModel& model, const LabeledExample& ex, std::size_t position);

// Sum of margin terms in natural (stored) order; equals y * (w . x).
double full_margin(const LinearModel& model, const LabeledExample& ex);

namespace detail {

// Shared term kernel. full_margin and the partial scan both accumulate this
// exact expression, left to right, so a completed scan under natural order
// reproduces full_margin bit for bit.
inline double term_value(const LinearModel& model, const LabeledExample& ex,
                         std::size_t position) noexcept {
    const Feature& f = ex.features[position];
    return static_cast<double>(ex.label) * model.weights[f.index] * f.value;
}

// Throws DimensionError unless every stored feature index fits the model.
void require_fits(const LinearModel& model, const LabeledExample& ex);

}  // namespace detail

}  // namespace attn
