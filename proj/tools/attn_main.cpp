// attn: train and benchmark a streaming linear classifier whose per-example
// margin evaluation can be stopped early by a sequential test.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "attn/bench.hpp"

namespace {

using namespace attn;

struct CommonOpts {
    std::string data;
    std::string test;
    FilterConfig cfg;
    std::uint32_t epochs = 1;
    std::uint64_t seed = 1;
    bool l2norm = false;
    bool map01 = false;
    std::string order_name = "shuffle";
};

void add_filter_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--delta", o.cfg.delta, "decision-error rate bound, in (0,1)")
        ->capture_default_str();
    cmd->add_option("--theta", o.cfg.theta, "importance threshold for updates")
        ->capture_default_str();
    cmd->add_option("--stride", o.cfg.stride, "terms between stopping checks")
        ->capture_default_str();
    cmd->add_option("--warmup", o.cfg.warmup, "fully evaluated margins before filtering starts")
        ->capture_default_str();
    cmd->add_option("--decay", o.cfg.decay, "EMA decay of the moment estimates")
        ->capture_default_str();
    cmd->add_option("--min-std", o.cfg.min_std, "lower clamp on the estimated std")
        ->capture_default_str();
    cmd->add_option("--order", o.order_name, "term evaluation order: natural|shuffle|wmag")
        ->check(CLI::IsMember({"natural", "shuffle", "wmag"}))
        ->capture_default_str();
    cmd->add_option("--epochs", o.epochs, "training passes")->capture_default_str();
    cmd->add_option("--seed", o.seed, "run seed (epoch orders, term shuffles)")
        ->capture_default_str();
    cmd->add_flag("--l2norm", o.l2norm, "normalize each example's non-bias features to unit L2");
    cmd->add_flag("--map01", o.map01, "remap on-disk label 0 to -1");
}

Dataset load_prepared(const std::string& path, const CommonOpts& o) {
    Dataset ds = load_dataset(path, ParseOptions{o.map01});
    if (o.map01) ds.name += ":map01";
    if (o.l2norm) {
        l2_normalize(ds);
        ds.name += ":l2norm";
    }
    return ds;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw DataError("write error on " + path);
}

void finish_config(CommonOpts& o) {
    o.cfg.order = order_policy_from_name(o.order_name);
    o.cfg.seed = o.seed;  // one seed drives epoch orders and term shuffles
}

int run_synth(const std::string& kind, std::uint32_t n, std::uint32_t d, double margin,
              double flip, std::uint64_t seed, const std::string& out,
              const std::string& test_out, std::uint32_t test_n) {
    SynthSpec spec;
    if (kind == "gaussian-sep")
        spec.kind = SynthKind::GaussianSeparable;
    else if (kind == "gaussian-noisy")
        spec.kind = SynthKind::GaussianNoisy;
    else if (kind == "walk")
        spec.kind = SynthKind::RandomWalkTerms;
    else
        throw DomainError("unknown kind '" + kind + "'");
    spec.n_examples = n + (test_out.empty() ? 0 : test_n);
    spec.n_features = d;
    spec.margin = margin;
    spec.flip_prob = flip;
    spec.seed = seed;

    Dataset all = generate_synthetic(spec);
    if (!test_out.empty()) {
        if (test_n == 0) throw DomainError("--test-out requires --test-n > 0");
        Dataset test;
        test.dimension = all.dimension;
        test.name = all.name + ":test";
        test.examples.assign(all.examples.begin() + n, all.examples.end());
        all.examples.resize(n);
        save_dataset(test, test_out);
        std::cout << "wrote " << test.examples.size() << " examples to " << test_out << "\n";
    }
    save_dataset(all, out);
    std::cout << "wrote " << all.examples.size() << " examples to " << out << "\n";
    return 0;
}

int run_train_cmd(CommonOpts& o, const std::string& algo, const std::string& report_path) {
    finish_config(o);
    o.cfg.enabled = (algo == "attentive");
    const Dataset train = load_prepared(o.data, o);
    Dataset test;
    const bool have_test = !o.test.empty();
    if (have_test) test = load_prepared(o.test, o);

    const RunReport rep =
        run_training(train, have_test ? &test : nullptr, o.cfg, o.epochs, o.seed);
    const std::string json = run_report_to_json(rep);
    if (report_path.empty())
        std::cout << json;
    else
        write_text(report_path, json);

    std::cerr << rep.algo << ": updates=" << rep.updates << " filtered=" << rep.filtered
              << " features=" << rep.features_evaluated << "/" << rep.features_available;
    if (rep.test_accuracy) std::cerr << " test_accuracy=" << *rep.test_accuracy;
    std::cerr << "\n";
    return 0;
}

int run_bench_cmd(CommonOpts& o, const std::string& report_path) {
    finish_config(o);
    const Dataset train = load_prepared(o.data, o);
    const Dataset test = load_prepared(o.test, o);
    const BenchResult res = run_benchmark(train, test, o.cfg, o.epochs, o.seed);
    const std::string json = bench_result_to_json(res);
    if (report_path.empty())
        std::cout << json;
    else
        write_text(report_path, json);

    std::cerr << "baseline:  updates=" << res.baseline.updates
              << " features=" << res.baseline.features_evaluated;
    if (res.baseline.test_accuracy)
        std::cerr << " test_accuracy=" << *res.baseline.test_accuracy;
    std::cerr << "\nattentive: updates=" << res.attentive.updates
              << " filtered=" << res.attentive.filtered
              << " decision_errors=" << res.attentive.decision_errors
              << " realized_delta=" << res.attentive.realized_delta
              << " speedup=" << res.attentive.speedup_ratio;
    if (res.attentive.test_accuracy)
        std::cerr << " test_accuracy=" << *res.attentive.test_accuracy;
    std::cerr << "\n";
    return 0;
}

int run_sweep_cmd(CommonOpts& o, const std::string& param, const std::string& values_csv,
                  const std::string& csv_path) {
    finish_config(o);
    std::vector<std::string> values;
    std::size_t start = 0;
    while (start <= values_csv.size()) {
        const std::size_t comma = values_csv.find(',', start);
        const std::string v = values_csv.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!v.empty()) values.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    const Dataset train = load_prepared(o.data, o);
    const Dataset test = load_prepared(o.test, o);
    const auto rows = sweep(param, values, o.cfg, train, test, o.epochs, o.seed);
    const std::string csv = sweep_to_csv(rows);
    if (csv_path.empty())
        std::cout << csv;
    else
        write_text(csv_path, csv);
    std::cerr << "swept " << param << " over " << rows.size() << " values\n";
    return 0;
}

int run_reflect_cmd(std::uint32_t steps, std::uint64_t walks, double delta, double theta,
                    std::uint64_t seed, bool no_filter) {
    const ReflectionReport rep =
        run_reflection_mc(steps, walks, delta, theta, seed, !no_filter);
    std::cout << reflection_to_json(rep);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "attn: streaming perceptron with sequential-test early stopping of margin "
        "evaluations, plus a baseline/attentive benchmark harness"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic sparse dataset");
    std::string sy_kind = "gaussian-sep";
    std::uint32_t sy_n = 1000, sy_d = 20, sy_test_n = 0;
    double sy_margin = 1.0, sy_flip = 0.1;
    std::uint64_t sy_seed = 1;
    std::string sy_out, sy_test_out;
    synth->add_option("--kind", sy_kind, "gaussian-sep|gaussian-noisy|walk")
        ->check(CLI::IsMember({"gaussian-sep", "gaussian-noisy", "walk"}))
        ->capture_default_str();
    synth->add_option("--n", sy_n, "number of examples")->capture_default_str();
    synth->add_option("--d", sy_d, "number of features (excluding bias)")->capture_default_str();
    synth->add_option("--margin", sy_margin, "teacher margin (gaussian kinds)")
        ->capture_default_str();
    synth->add_option("--flip", sy_flip, "label flip probability (gaussian-noisy)")
        ->capture_default_str();
    synth->add_option("--seed", sy_seed, "generator seed")->capture_default_str();
    synth->add_option("--out", sy_out, "output file (.gz honored)")->required();
    synth->add_option("--test-out", sy_test_out, "also write a held-out test file");
    synth->add_option("--test-n", sy_test_n, "held-out test examples for --test-out");

    // train
    auto* train = app.add_subcommand("train", "train one algorithm and report");
    CommonOpts tr;
    std::string tr_algo = "attentive", tr_report;
    train->add_option("--data", tr.data, "training set (sparse text, .gz ok)")->required();
    train->add_option("--test", tr.test, "held-out test set");
    train->add_option("--algo", tr_algo, "baseline|attentive")
        ->check(CLI::IsMember({"baseline", "attentive"}))
        ->capture_default_str();
    add_filter_flags(train, tr);
    train->add_option("--report", tr_report, "write the JSON report here (default: stdout)");

    // bench
    auto* bench = app.add_subcommand("bench", "paired baseline + attentive run");
    CommonOpts be;
    std::string be_report;
    bench->add_option("--data", be.data, "training set")->required();
    bench->add_option("--test", be.test, "held-out test set")->required();
    add_filter_flags(bench, be);
    bench->add_option("--report", be_report, "write the JSON report here (default: stdout)");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "benchmark across one parameter");
    CommonOpts sw;
    std::string sw_param, sw_values, sw_csv;
    sweep_cmd->add_option("--data", sw.data, "training set")->required();
    sweep_cmd->add_option("--test", sw.test, "held-out test set")->required();
    sweep_cmd->add_option("--param", sw_param, "delta|stride|warmup|order")
        ->check(CLI::IsMember({"delta", "stride", "warmup", "order"}))
        ->required();
    sweep_cmd->add_option("--values", sw_values, "comma-separated values")->required();
    add_filter_flags(sweep_cmd, sw);
    sweep_cmd->add_option("--csv", sw_csv,
                          "write the flat table here (default: stdout); columns: " +
                              sweep_csv_header());

    // reflect
    auto* reflect = app.add_subcommand("reflect", "Monte Carlo check of the stopping bound");
    std::uint32_t rf_steps = 20;
    std::uint64_t rf_walks = 100000, rf_seed = 1;
    double rf_delta = 0.1, rf_theta = 0.0;
    bool rf_no_filter = false;
    reflect->add_option("--steps", rf_steps, "walk length")->capture_default_str();
    reflect->add_option("--walks", rf_walks, "number of walks")->capture_default_str();
    reflect->add_option("--delta", rf_delta, "decision-error rate bound")->capture_default_str();
    reflect->add_option("--theta", rf_theta, "importance threshold")->capture_default_str();
    reflect->add_option("--seed", rf_seed, "walk seed")->capture_default_str();
    reflect->add_flag("--no-filter", rf_no_filter, "scan with filtering disabled (sanity mode)");

    try {
        app.parse(argc, argv);
        if (synth->parsed())
            return run_synth(sy_kind, sy_n, sy_d, sy_margin, sy_flip, sy_seed, sy_out,
                             sy_test_out, sy_test_n);
        if (train->parsed()) return run_train_cmd(tr, tr_algo, tr_report);
        if (bench->parsed()) return run_bench_cmd(be, be_report);
        if (sweep_cmd->parsed()) return run_sweep_cmd(sw, sw_param, sw_values, sw_csv);
        if (reflect->parsed())
            return run_reflect_cmd(rf_steps, rf_walks, rf_delta, rf_theta, rf_seed,
                                   rf_no_filter);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const attn::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const attn::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
