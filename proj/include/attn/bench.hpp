#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attn/data_io.hpp"
#include "attn/perceptron.hpp"

namespace attn {

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

struct EpochRow {
    std::uint32_t epoch = 0;
    std::uint64_t updates = 0;
    std::uint64_t filtered = 0;
    std::uint64_t decision_errors = 0;
    std::uint64_t features_evaluated = 0;
    std::uint64_t features_available = 0;
    std::uint64_t train_mistakes = 0;
};

struct RunReport {
    // config echo
    std::string algo;  // "baseline" | "attentive"
    FilterConfig config;
    std::uint32_t epochs = 0;
    std::uint64_t seed = 0;
    std::string train_name;
    std::string test_name;
    std::uint32_t dimension = 0;
    std::uint64_t train_examples = 0;
    std::uint64_t test_examples = 0;

    std::vector<EpochRow> epoch_rows;

    // final tallies over the whole run
    std::uint64_t examples_seen = 0;
    std::uint64_t updates = 0;
    std::uint64_t filtered = 0;
    std::uint64_t decision_errors = 0;
    std::uint64_t features_evaluated = 0;
    std::uint64_t features_available = 0;
    std::uint64_t train_mistakes = 0;
    double realized_delta = 0.0;  // decision_errors / filtered, 0 when nothing filtered
    double speedup_ratio = 1.0;   // features_available / features_evaluated
    double mean_features_per_example = 0.0;
    double post_warmup_mean_features = 0.0;
    // full-evaluation accuracy of the trained model (absent without a test set)
    std::optional<double> test_accuracy;
    // the same test set pushed through attentive prediction with this config
    std::optional<double> prediction_accuracy;
    std::optional<double> prediction_mean_features;
    std::int64_t wall_time_ms = 0;
};

struct BenchResult {
    RunReport baseline;
    RunReport attentive;
};

struct ReflectionReport {
    std::uint32_t n_steps = 0;
    std::uint64_t n_walks = 0;
    double delta = 0.0;
    double theta = 0.0;
    std::uint64_t seed = 0;
    bool filtering_enabled = true;
    double tau = 0.0;
    std::uint64_t filtered = 0;
    std::uint64_t errors = 0;
    double empirical_error = 0.0;
    double mc_stderr = 0.0;
};

struct SweepRow {
    std::string param;
    std::string value;
    std::uint64_t cell_seed = 0;
    BenchResult result;
};

// ---------------------------------------------------------------------------
// operations
// ---------------------------------------------------------------------------

// True iff a filtered example's exact full margin (recomputed with the model
// snapshot that made the decision) is <= theta, i.e. the filter was wrong.
// Throws ContractError on a Completed outcome.
bool decision_error_oracle(const LinearModel& model_at_decision, const LabeledExample& ex,
                           double theta, const ScanOutcome& outcome);

// Test-set evaluation with attentive prediction. Score moments are built
// online from fully evaluated examples; prediction-time filtering stays off
// until `warmup` of them have been seen.
struct EvalReport {
    std::uint64_t total = 0;
    std::uint64_t correct = 0;
    std::uint64_t features_used = 0;
    std::uint64_t features_available = 0;
    double accuracy = 0.0;
    double mean_features = 0.0;
};
EvalReport evaluate(const LinearModel& model, const Dataset& test, const FilterConfig& cfg);

// One training run (cfg.enabled selects the algorithm). Epoch visit orders
// are shuffled with seeds derived from (seed, epoch); with filtering on, the
// decision-error oracle audits every filtered example. `test` may be null.
RunReport run_training(const Dataset& train, const Dataset* test, const FilterConfig& cfg,
                       std::uint32_t epochs, std::uint64_t seed);

// Paired baseline + attentive runs from identical initial state and identical
// epoch orders.
BenchResult run_benchmark(const Dataset& train, const Dataset& test, const FilterConfig& cfg,
                          std::uint32_t epochs, std::uint64_t seed);

// Symmetric +-1 random walks scanned against the threshold computed from the
// walk's true moments (mean 0, std sqrt(n_steps)), stride 1. Reports the
// fraction of walks that were filtered yet finished below theta.
ReflectionReport run_reflection_mc(std::uint32_t n_steps, std::uint64_t n_walks, double delta,
                                   double theta, std::uint64_t seed,
                                   bool filtering_enabled = true);

// One run_benchmark per value; cell seeds are hash(seed, param, value) so the
// table is reproducible regardless of execution order.
std::vector<SweepRow> sweep(const std::string& param, const std::vector<std::string>& values,
                            const FilterConfig& base, const Dataset& train, const Dataset& test,
                            std::uint32_t epochs, std::uint64_t seed);

// ---------------------------------------------------------------------------
// serialization (deterministic: identical inputs, identical bytes, except
// wall_time_ms which tracks the actual run)
// ---------------------------------------------------------------------------

std::string order_policy_name(OrderPolicy p);
OrderPolicy order_policy_from_name(const std::string& name);  // throws DomainError

std::string run_report_to_json(const RunReport& r);
std::string bench_result_to_json(const BenchResult& r);
std::string reflection_to_json(const ReflectionReport& r);

// Fixed column order; see sweep_csv_header().
std::string sweep_csv_header();
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace attn
