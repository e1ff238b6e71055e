#include "attn/perceptron.hpp"

#include <numeric>

#include "attn/data_io.hpp"

namespace attn {

namespace {

// Unsigned score contribution w_j * x_j (prediction path; no label).
inline double score_term(const LinearModel& model, const LabeledExample& ex,
                         std::size_t position) noexcept {
    const Feature& f = ex.features[position];
    return model.weights[f.index] * f.value;
}

void maybe_take_warmup_snapshot(TrainState& st) {
    if (!st.warmup_done && st.moments.count >= st.moments.warmup) {
        st.warmup_done = true;
        st.warmup_features_evaluated = st.features_evaluated;
        st.warmup_examples_seen = st.examples_seen;
    }
}

}  // namespace

TrainState make_train_state(std::uint32_t dimension, const FilterConfig& cfg) {
    validate_config(cfg);
    TrainState st;
    st.model = LinearModel(dimension);
    st.moments.decay = cfg.decay;
    st.moments.warmup = cfg.warmup;
    return st;
}

LinearModel perceptron_update(LinearModel model, const LabeledExample& ex) {
    detail::require_fits(model, ex);
    const double y = static_cast<double>(ex.label);
    for (const Feature& f : ex.features) model.weights[f.index] += y * f.value;
    return model;
}

StepResult baseline_step_traced(TrainState st, const LabeledExample& ex, double theta) {
    maybe_take_warmup_snapshot(st);
    const double margin = full_margin(st.model, ex);
    const std::uint64_t n = ex.term_count();
    st.examples_seen += 1;
    st.features_evaluated += n;
    st.features_available += n;
    st.moments = moments_update(st.moments, margin);
    const bool update = margin <= theta;
    if (update) {
        st.model = perceptron_update(std::move(st.model), ex);
        st.updates += 1;
    }
    return StepResult{std::move(st), Completed{margin, static_cast<std::uint32_t>(n)}, update};
}

TrainState baseline_train_step(TrainState st, const LabeledExample& ex, double theta) {
    return baseline_step_traced(std::move(st), ex, theta).state;
}

StepResult attentive_step_traced(TrainState st, const LabeledExample& ex,
                                 const FilterConfig& cfg) {
    maybe_take_warmup_snapshot(st);
    if (!cfg.enabled || st.moments.count < cfg.warmup)
        return baseline_step_traced(std::move(st), ex, cfg.theta);

    const auto [mean, sd] = moments_mean_std(st.moments, cfg.min_std);
    const StoppingThreshold thr = stopping_threshold(cfg.theta, mean, sd, cfg.delta);
    const auto order = evaluation_order(ex, st.model, cfg.order, cfg.seed, ex.id);
    ScanOutcome outcome = partial_margin_scan(st.model, ex, thr, order, cfg.stride, true);

    const std::uint64_t n = ex.term_count();
    st.examples_seen += 1;
    st.features_available += n;

    if (const Filtered* f = std::get_if<Filtered>(&outcome)) {
        // Filtered: no model update, no moments feed (S_n is unknown).
        st.filtered += 1;
        st.features_evaluated += f->step;
        return StepResult{std::move(st), outcome, false};
    }

    const Completed& c = std::get<Completed>(outcome);
    st.features_evaluated += n;
    st.moments = moments_update(st.moments, c.margin);
    const bool update = c.margin <= cfg.theta;
    if (update) {
        st.model = perceptron_update(std::move(st.model), ex);
        st.updates += 1;
    }
    return StepResult{std::move(st), outcome, update};
}

TrainState attentive_train_step(TrainState st, const LabeledExample& ex,
                                const FilterConfig& cfg) {
    return attentive_step_traced(std::move(st), ex, cfg).state;
}

Prediction predict(const LinearModel& model, const LabeledExample& ex, const FilterConfig& cfg,
                   const MarginMoments& score_moments) {
    detail::require_fits(model, ex);
    const std::size_t n = ex.term_count();

    if (!cfg.enabled) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += score_term(model, ex, i);
        return Prediction{s >= 0.0 ? +1 : -1, n, s, true};
    }

    const auto [mean, sd] = moments_mean_std(score_moments, cfg.min_std);
    const StoppingThreshold thr = stopping_threshold(0.0, mean, sd, cfg.delta);
    const auto order = evaluation_order(ex, model, cfg.order, cfg.seed, ex.id);

    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += score_term(model, ex, order[i]);
        const std::size_t step = i + 1;
        if (step < n && step % cfg.stride == 0) {
            if (s > thr.tau) return Prediction{+1, step, s, false};
            if (s < -thr.tau) return Prediction{-1, step, s, false};
        }
    }
    return Prediction{s >= 0.0 ? +1 : -1, n, s, true};
}

std::pair<TrainState, EpochReport> train_epoch(TrainState st, const Dataset& data,
                                               const FilterConfig& cfg,
                                               std::optional<std::uint64_t> shuffle_seed,
                                               const StepObserver& observer) {
    if (data.examples.empty()) throw DomainError("train_epoch: dataset is empty");

    const std::uint64_t updates0 = st.updates;
    const std::uint64_t filtered0 = st.filtered;
    const std::uint64_t evaluated0 = st.features_evaluated;
    const std::uint64_t available0 = st.features_available;

    std::vector<std::size_t> visit;
    if (shuffle_seed) {
        visit = shuffled_indices(data.examples.size(), *shuffle_seed);
    } else {
        visit.resize(data.examples.size());
        std::iota(visit.begin(), visit.end(), std::size_t{0});
    }

    std::uint64_t mistakes = 0;
    for (const std::size_t idx : visit) {
        const LabeledExample& ex = data.examples[idx];
        StepResult r = attentive_step_traced(std::move(st), ex, cfg);
        st = std::move(r.state);
        if (const Completed* c = std::get_if<Completed>(&r.outcome)) {
            // score = y * margin is an exact sign flip, so this is w . x
            const double score = c->margin * static_cast<double>(ex.label);
            const int predicted = score >= 0.0 ? +1 : -1;
            if (predicted != ex.label) mistakes += 1;
        }
        if (observer) observer(StepTrace{&ex, &r.outcome, &st.model, r.updated});
    }

    EpochReport rep;
    rep.updates = st.updates - updates0;
    rep.filtered = st.filtered - filtered0;
    rep.features_evaluated = st.features_evaluated - evaluated0;
    rep.features_available = st.features_available - available0;
    rep.train_mistakes = mistakes;
    return {std::move(st), rep};
}

}  // namespace attn
