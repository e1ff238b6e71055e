#include "attn/bench.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>

#include <json.hpp>

#include "attn/rng.hpp"

namespace attn {

namespace {

constexpr std::uint64_t kReflectStream = 0x3ef1ec70ULL;

std::string fmt_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

bool decision_error_oracle(const LinearModel& model_at_decision, const LabeledExample& ex,
                           double theta, const ScanOutcome& outcome) {
    if (!is_filtered(outcome))
        throw ContractError("decision_error_oracle: outcome must be Filtered");
    return full_margin(model_at_decision, ex) <= theta;
}

EvalReport evaluate(const LinearModel& model, const Dataset& test, const FilterConfig& cfg) {
    MarginMoments score_moments;
    score_moments.decay = cfg.decay;
    score_moments.warmup = cfg.warmup;

    // Early-stopped scans only ever complete on small partial scores, so
    // feeding completions alone would shrink the estimated spread and collapse
    // the stopping band. The moments are fed exclusively by scheduled full
    // evaluations, which stay unbiased samples of the score distribution.
    constexpr std::uint64_t kScoreRefreshInterval = 8;

    EvalReport r;
    std::uint64_t i = 0;
    for (const LabeledExample& ex : test.examples) {
        const bool force_full =
            score_moments.count < cfg.warmup || i % kScoreRefreshInterval == 0;
        FilterConfig eff = cfg;
        if (force_full) eff.enabled = false;
        const Prediction p = predict(model, ex, eff, score_moments);
        if (force_full) score_moments = moments_update(score_moments, p.score);
        r.total += 1;
        r.features_used += p.features_used;
        r.features_available += ex.term_count();
        if (p.label == ex.label) r.correct += 1;
        ++i;
    }
    if (r.total > 0) {
        r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.total);
        r.mean_features = static_cast<double>(r.features_used) / static_cast<double>(r.total);
    }
    return r;
}

RunReport run_training(const Dataset& train, const Dataset* test, const FilterConfig& cfg,
                       std::uint32_t epochs, std::uint64_t seed) {
    if (train.examples.empty()) throw DataError("run_training: train set is empty");
    if (epochs == 0) throw DomainError("run_training: epochs must be >= 1");
    validate_config(cfg);

    const auto t0 = std::chrono::steady_clock::now();

    std::uint32_t dim = train.dimension;
    if (test) dim = std::max(dim, test->dimension);

    RunReport rep;
    rep.algo = cfg.enabled ? "attentive" : "baseline";
    rep.config = cfg;
    rep.epochs = epochs;
    rep.seed = seed;
    rep.train_name = train.name;
    rep.test_name = test ? test->name : "";
    rep.dimension = dim;
    rep.train_examples = train.examples.size();
    rep.test_examples = test ? test->examples.size() : 0;

    TrainState st = make_train_state(dim, cfg);
    for (std::uint32_t e = 1; e <= epochs; ++e) {
        std::uint64_t epoch_errors = 0;
        StepObserver observer;
        if (cfg.enabled) {
            observer = [&](const StepTrace& t) {
                // A filtered step never updates, so t.model is the model
                // that made the decision.
                if (is_filtered(*t.outcome) &&
                    decision_error_oracle(*t.model, *t.example, cfg.theta, *t.outcome))
                    epoch_errors += 1;
            };
        }
        auto [next, ep] = train_epoch(std::move(st), train, cfg, hash_combine(seed, e), observer);
        st = std::move(next);

        EpochRow row;
        row.epoch = e;
        row.updates = ep.updates;
        row.filtered = ep.filtered;
        row.decision_errors = epoch_errors;
        row.features_evaluated = ep.features_evaluated;
        row.features_available = ep.features_available;
        row.train_mistakes = ep.train_mistakes;
        rep.epoch_rows.push_back(row);

        rep.decision_errors += epoch_errors;
        rep.train_mistakes += ep.train_mistakes;
    }

    rep.examples_seen = st.examples_seen;
    rep.updates = st.updates;
    rep.filtered = st.filtered;
    rep.features_evaluated = st.features_evaluated;
    rep.features_available = st.features_available;
    rep.realized_delta =
        st.filtered > 0
            ? static_cast<double>(rep.decision_errors) / static_cast<double>(st.filtered)
            : 0.0;
    rep.speedup_ratio = st.features_evaluated > 0
                            ? static_cast<double>(st.features_available) /
                                  static_cast<double>(st.features_evaluated)
                            : 1.0;
    rep.mean_features_per_example =
        st.examples_seen > 0
            ? static_cast<double>(st.features_evaluated) / static_cast<double>(st.examples_seen)
            : 0.0;
    if (st.warmup_done && st.examples_seen > st.warmup_examples_seen) {
        rep.post_warmup_mean_features =
            static_cast<double>(st.features_evaluated - st.warmup_features_evaluated) /
            static_cast<double>(st.examples_seen - st.warmup_examples_seen);
    } else {
        rep.post_warmup_mean_features = rep.mean_features_per_example;
    }

    if (test && !test->examples.empty()) {
        FilterConfig full_cfg = cfg;
        full_cfg.enabled = false;
        rep.test_accuracy = evaluate(st.model, *test, full_cfg).accuracy;
        const EvalReport pred = evaluate(st.model, *test, cfg);
        rep.prediction_accuracy = pred.accuracy;
        rep.prediction_mean_features = pred.mean_features;
    }

    const auto t1 = std::chrono::steady_clock::now();
    rep.wall_time_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    return rep;
}

BenchResult run_benchmark(const Dataset& train, const Dataset& test, const FilterConfig& cfg,
                          std::uint32_t epochs, std::uint64_t seed) {
    if (train.examples.empty() || test.examples.empty())
        throw DataError("run_benchmark: train and test sets must be nonempty");
    FilterConfig base_cfg = cfg;
    base_cfg.enabled = false;
    FilterConfig attn_cfg = cfg;
    attn_cfg.enabled = true;
    BenchResult res;
    res.baseline = run_training(train, &test, base_cfg, epochs, seed);
    res.attentive = run_training(train, &test, attn_cfg, epochs, seed);
    return res;
}

ReflectionReport run_reflection_mc(std::uint32_t n_steps, std::uint64_t n_walks, double delta,
                                   double theta, std::uint64_t seed, bool filtering_enabled) {
    if (n_steps < 2) throw DomainError("run_reflection_mc: n_steps must be >= 2");
    if (n_walks < 1000) throw DomainError("run_reflection_mc: n_walks must be >= 1000");

    // True moments of a symmetric +-1 walk: ES_n = 0, std(S_n) = sqrt(n).
    const StoppingThreshold thr =
        stopping_threshold(theta, 0.0, std::sqrt(static_cast<double>(n_steps)), delta);

    LinearModel ones(n_steps + 1);
    for (double& w : ones.weights) w = 1.0;
    std::vector<std::uint32_t> order(n_steps);
    std::iota(order.begin(), order.end(), 0u);

    LabeledExample ex;
    ex.label = +1;
    ex.features.resize(n_steps);

    ReflectionReport rep;
    rep.n_steps = n_steps;
    rep.n_walks = n_walks;
    rep.delta = delta;
    rep.theta = theta;
    rep.seed = seed;
    rep.filtering_enabled = filtering_enabled;
    rep.tau = thr.tau;

    for (std::uint64_t w = 0; w < n_walks; ++w) {
        Rng rng = Rng::keyed(hash_combine(seed, kReflectStream), w);
        for (std::uint32_t j = 0; j < n_steps; ++j)
            ex.features[j] = Feature{j + 1, static_cast<double>(rng.next_sign())};
        ex.id = w;
        const ScanOutcome out =
            partial_margin_scan(ones, ex, thr, order, 1, filtering_enabled);
        if (is_filtered(out)) {
            rep.filtered += 1;
            if (full_margin(ones, ex) < theta) rep.errors += 1;
        }
    }

    rep.empirical_error =
        static_cast<double>(rep.errors) / static_cast<double>(n_walks);
    rep.mc_stderr = std::sqrt(rep.empirical_error * (1.0 - rep.empirical_error) /
                              static_cast<double>(n_walks));
    return rep;
}

namespace {

FilterConfig apply_sweep_value(const std::string& param, FilterConfig cfg,
                               const std::string& value) {
    const auto parse_num = [&](auto& out) {
        const char* b = value.data();
        const char* e = value.data() + value.size();
        const auto r = std::from_chars(b, e, out);
        if (r.ec != std::errc{} || r.ptr != e)
            throw DomainError("sweep: bad value '" + value + "' for parameter " + param);
    };
    if (param == "delta") {
        parse_num(cfg.delta);
    } else if (param == "stride") {
        parse_num(cfg.stride);
    } else if (param == "warmup") {
        parse_num(cfg.warmup);
    } else if (param == "order") {
        cfg.order = order_policy_from_name(value);
    } else {
        throw DomainError("sweep: unknown parameter '" + param +
                          "' (expected delta, stride, warmup, or order)");
    }
    return cfg;
}

}  // namespace

std::vector<SweepRow> sweep(const std::string& param, const std::vector<std::string>& values,
                            const FilterConfig& base, const Dataset& train, const Dataset& test,
                            std::uint32_t epochs, std::uint64_t seed) {
    if (values.empty()) throw DomainError("sweep: values must be nonempty");

    struct Cell {
        std::string value;
        std::uint64_t cell_seed;
        FilterConfig cfg;
    };
    std::vector<Cell> cells;
    cells.reserve(values.size());
    for (const std::string& v : values) {
        const std::uint64_t cell_seed =
            hash_combine(hash_combine(seed, fnv1a(param)), fnv1a(v));
        cells.push_back(Cell{v, cell_seed, apply_sweep_value(param, base, v)});
    }

    // Cells are independent; seeds are value-derived, so parallel execution
    // cannot change the table.
    std::vector<std::future<BenchResult>> futures;
    futures.reserve(cells.size());
    for (const Cell& c : cells)
        futures.push_back(std::async(std::launch::async, [&train, &test, epochs, c]() {
            return run_benchmark(train, test, c.cfg, epochs, c.cell_seed);
        }));

    std::vector<SweepRow> rows;
    rows.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        SweepRow row;
        row.param = param;
        row.value = cells[i].value;
        row.cell_seed = cells[i].cell_seed;
        row.result = futures[i].get();
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

std::string order_policy_name(OrderPolicy p) {
    switch (p) {
        case OrderPolicy::NaturalIndex: return "natural";
        case OrderPolicy::SeededShuffle: return "shuffle";
        case OrderPolicy::WeightMagnitudeDesc: return "wmag";
    }
    return "?";
}

OrderPolicy order_policy_from_name(const std::string& name) {
    if (name == "natural") return OrderPolicy::NaturalIndex;
    if (name == "shuffle") return OrderPolicy::SeededShuffle;
    if (name == "wmag") return OrderPolicy::WeightMagnitudeDesc;
    throw DomainError("unknown order policy '" + name +
                      "' (expected natural, shuffle, or wmag)");
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json config_json(const RunReport& r) {
    ordered_json j;
    j["delta"] = r.config.delta;
    j["theta"] = r.config.theta;
    j["stride"] = r.config.stride;
    j["warmup"] = r.config.warmup;
    j["decay"] = r.config.decay;
    j["min_std"] = r.config.min_std;
    j["order"] = order_policy_name(r.config.order);
    j["seed"] = r.seed;
    j["filter_seed"] = r.config.seed;
    j["enabled"] = r.config.enabled;
    j["epochs"] = r.epochs;
    j["train"] = r.train_name;
    j["test"] = r.test_name;
    j["dimension"] = r.dimension;
    j["train_examples"] = r.train_examples;
    j["test_examples"] = r.test_examples;
    return j;
}

ordered_json run_report_json(const RunReport& r) {
    ordered_json j;
    j["algo"] = r.algo;
    j["config"] = config_json(r);
    ordered_json rows = ordered_json::array();
    for (const EpochRow& e : r.epoch_rows) {
        ordered_json row;
        row["epoch"] = e.epoch;
        row["updates"] = e.updates;
        row["filtered"] = e.filtered;
        row["decision_errors"] = e.decision_errors;
        row["features_evaluated"] = e.features_evaluated;
        row["features_available"] = e.features_available;
        row["train_mistakes"] = e.train_mistakes;
        rows.push_back(std::move(row));
    }
    j["epochs"] = std::move(rows);
    ordered_json f;
    f["examples_seen"] = r.examples_seen;
    f["updates"] = r.updates;
    f["filtered"] = r.filtered;
    f["decision_errors"] = r.decision_errors;
    f["train_mistakes"] = r.train_mistakes;
    f["features_evaluated"] = r.features_evaluated;
    f["features_available"] = r.features_available;
    f["realized_delta"] = r.realized_delta;
    f["speedup_ratio"] = r.speedup_ratio;
    f["mean_features_per_example"] = r.mean_features_per_example;
    f["post_warmup_mean_features"] = r.post_warmup_mean_features;
    const auto opt = [](const std::optional<double>& v) {
        return v ? ordered_json(*v) : ordered_json(nullptr);
    };
    f["test_accuracy"] = opt(r.test_accuracy);
    f["prediction_accuracy"] = opt(r.prediction_accuracy);
    f["prediction_mean_features"] = opt(r.prediction_mean_features);
    j["final"] = std::move(f);
    j["wall_time_ms"] = r.wall_time_ms;
    return j;
}

}  // namespace

std::string run_report_to_json(const RunReport& r) { return run_report_json(r).dump(2) + "\n"; }

std::string bench_result_to_json(const BenchResult& r) {
    ordered_json j;
    j["baseline"] = run_report_json(r.baseline);
    j["attentive"] = run_report_json(r.attentive);
    return j.dump(2) + "\n";
}

std::string reflection_to_json(const ReflectionReport& r) {
    ordered_json j;
    j["steps"] = r.n_steps;
    j["walks"] = r.n_walks;
    j["delta"] = r.delta;
    j["theta"] = r.theta;
    j["seed"] = r.seed;
    j["filtering_enabled"] = r.filtering_enabled;
    j["tau"] = r.tau;
    j["filtered"] = r.filtered;
    j["errors"] = r.errors;
    j["empirical_error"] = r.empirical_error;
    j["mc_stderr"] = r.mc_stderr;
    return j.dump(2) + "\n";
}

std::string sweep_csv_header() {
    return "param,value,cell_seed,epochs,"
           "baseline_updates,baseline_train_mistakes,baseline_features_evaluated,"
           "baseline_test_accuracy,"
           "attentive_updates,attentive_train_mistakes,attentive_filtered,"
           "attentive_decision_errors,attentive_realized_delta,"
           "attentive_features_evaluated,attentive_features_available,"
           "attentive_speedup_ratio,attentive_mean_features_per_example,"
           "attentive_test_accuracy,attentive_prediction_accuracy,"
           "attentive_prediction_mean_features";
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = sweep_csv_header() + "\n";
    for (const SweepRow& row : rows) {
        const RunReport& b = row.result.baseline;
        const RunReport& a = row.result.attentive;
        out += row.param;
        out += ',';
        out += row.value;
        out += ',';
        out += std::to_string(row.cell_seed);
        out += ',';
        out += std::to_string(b.epochs);
        out += ',';
        out += std::to_string(b.updates);
        out += ',';
        out += std::to_string(b.train_mistakes);
        out += ',';
        out += std::to_string(b.features_evaluated);
        out += ',';
        out += b.test_accuracy ? fmt_double(*b.test_accuracy) : std::string("nan");
        out += ',';
        out += std::to_string(a.updates);
        out += ',';
        out += std::to_string(a.train_mistakes);
        out += ',';
        out += std::to_string(a.filtered);
        out += ',';
        out += std::to_string(a.decision_errors);
        out += ',';
        out += fmt_double(a.realized_delta);
        out += ',';
        out += std::to_string(a.features_evaluated);
        out += ',';
        out += std::to_string(a.features_available);
        out += ',';
        out += fmt_double(a.speedup_ratio);
        out += ',';
        out += fmt_double(a.mean_features_per_example);
        out += ',';
        out += a.test_accuracy ? fmt_double(*a.test_accuracy) : std::string("nan");
        out += ',';
        out += a.prediction_accuracy ? fmt_double(*a.prediction_accuracy) : std::string("nan");
        out += ',';
        out += a.prediction_mean_features ? fmt_double(*a.prediction_mean_features)
                                          : std::string("nan");
        out += '\n';
    }
    return out;
}

}  // namespace attn
