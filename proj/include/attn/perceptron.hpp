#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include "attn/sequential.hpp"
#include "attn/stats.hpp"
#include "attn/types.hpp"

namespace attn {

struct Dataset;  // data_io.hpp

// Everything a training run accumulates: the model, the streaming margin
// moments, and exact work counters.
struct TrainState {
    LinearModel model;
    MarginMoments moments;
    std::uint64_t examples_seen = 0;
    std::uint64_t updates = 0;
    std::uint64_t filtered = 0;
    std::uint64_t features_evaluated = 0;
    std::uint64_t features_available = 0;

    // Counter snapshot taken when moments.count first reaches the warmup
    // length; lets reports quote post-warmup per-example work.
    bool warmup_done = false;
    std::uint64_t warmup_features_evaluated = 0;
    std::uint64_t warmup_examples_seen = 0;

    bool operator==(const TrainState&) const = default;
};

TrainState make_train_state(std::uint32_t dimension, const FilterConfig& cfg);

// w <- w + y * x over the example's stored features; learning rate fixed at 1.
LinearModel perceptron_update(LinearModel model, const LabeledExample& ex);

// Step functions are functional: they take the state by value and return the
// successor. Traced variants also expose what the step did.
struct StepResult {
    TrainState state;
    ScanOutcome outcome;
    bool updated = false;
};

// Full margin evaluation; update iff margin <= theta (update on ties).
StepResult baseline_step_traced(TrainState state, const LabeledExample& ex, double theta);
TrainState baseline_train_step(TrainState state, const LabeledExample& ex, double theta);

// During warmup, or with the filter disabled, identical to the baseline step.
// Otherwise runs the partial-margin scan against the current stopping
// threshold: a filtered example makes no model update and does not feed the
// moment estimator; a completed one takes the baseline tail.
StepResult attentive_step_traced(TrainState state, const LabeledExample& ex,
                                 const FilterConfig& cfg);
TrainState attentive_train_step(TrainState state, const LabeledExample& ex,
                                const FilterConfig& cfg);

struct Prediction {
    int label = 1;
    std::uint64_t features_used = 0;
    double score = 0.0;     // full score when completed, partial score at the stop otherwise
    bool completed = true;  // false when the scan stopped early
};

// Attentive prediction over the unsigned score (the label is unknown here):
// terms are w_j * x_j and the stop rule is two-sided around a threshold built
// from the score moments with theta = 0 -- emit +1 on s_i > tau, -1 on
// s_i < -tau. A full scan emits sign(s_n) with sign(0) = +1. With the filter
// disabled the scan always completes, in natural order.
Prediction predict(const LinearModel& model, const LabeledExample& ex, const FilterConfig& cfg,
                   const MarginMoments& score_moments);

// Per-epoch deltas.
struct EpochReport {
    std::uint64_t updates = 0;
    std::uint64_t filtered = 0;
    std::uint64_t features_evaluated = 0;
    std::uint64_t features_available = 0;
    std::uint64_t train_mistakes = 0;
};

// Per-step hook for audits (decision-error oracles, counter replays). For a
// filtered step no update happened, so `model` is also the model that made
// the decision.
struct StepTrace {
    const LabeledExample* example = nullptr;
    const ScanOutcome* outcome = nullptr;
    const LinearModel* model = nullptr;  // model after the step
    bool updated = false;
};
using StepObserver = std::function<void(const StepTrace&)>;

// Single pass over the dataset. With a shuffle seed the visit order is the
// deterministic Fisher-Yates permutation for that seed; otherwise stored
// order. cfg.enabled selects attentive vs baseline behaviour.
std::pair<TrainState, EpochReport> train_epoch(TrainState state, const Dataset& data,
                                               const FilterConfig& cfg,
                                               std::optional<std::uint64_t> shuffle_seed,
                                               const StepObserver& observer = {});

}  // namespace attn
