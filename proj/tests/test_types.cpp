#include <cmath>

#include <doctest.h>

#include "attn/types.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace attn;
using testutil::make_ex;
using testutil::make_model;

TEST_SUITE("types") {

TEST_CASE("margin_term computes label * weight * value") {
    CHECK(margin_term(make_model({0.5}), make_ex({{0, 1.0}}, +1), 0).value == 0.5);
    CHECK(margin_term(make_model({2.0}), make_ex({{0, 3.0}}, -1), 0).value == -6.0);
    // sparse: position 1 holds feature index 2, which picks weight 3
    CHECK(margin_term(make_model({1, 2, 3}), make_ex({{0, 1.0}, {2, 4.0}}, +1), 1).value == 12.0);
}

TEST_CASE("margin_term rejects bad positions and indices") {
    const LinearModel m = make_model({1.0, 2.0});
    const LabeledExample ex = make_ex({{0, 1.0}, {5, 1.0}}, +1);
    CHECK_THROWS_AS(margin_term(m, ex, 7), DimensionError);
    CHECK_THROWS_AS(margin_term(m, ex, 1), DimensionError);  // index 5 >= dim 2
}

TEST_CASE("full_margin basics") {
    CHECK(full_margin(make_model({1, 1}), make_ex({{0, 1.0}, {1, 1.0}}, +1)) == 2.0);
    CHECK(full_margin(make_model({1, -1}), make_ex({{0, 1.0}, {1, 1.0}}, +1)) == 0.0);
    CHECK_THROWS_AS(full_margin(make_model({1}), make_ex({{0, 1.0}, {3, 1.0}}, +1)),
                    DimensionError);
}

TEST_CASE("full_margin equals the termwise sum and the naive dot oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ex = testutil::random_dense_example(rng, 100, trial);
        const auto m = testutil::random_model(rng, 100);
        const double fm = full_margin(m, ex);

        double termwise = 0.0;
        for (std::size_t p = 0; p < ex.features.size(); ++p)
            termwise += margin_term(m, ex, p).value;
        CHECK(fm == termwise);

        // independent route: label applied to the finished dot product
        CHECK(fm == oracle::naive_margin(m, ex));
    }
}

TEST_CASE("negating the label negates the margin exactly") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto ex = testutil::random_dense_example(rng, 30, trial);
        const auto m = testutil::random_model(rng, 30);
        ex.label = +1;
        const double pos = full_margin(m, ex);
        ex.label = -1;
        CHECK(full_margin(m, ex) == -pos);
    }
}

TEST_CASE("scaling all weights by a power of two scales the margin exactly") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto ex = testutil::random_dense_example(rng, 30, trial);
        auto m = testutil::random_model(rng, 30);
        const double base = full_margin(m, ex);
        for (double& w : m.weights) w *= 4.0;
        CHECK(full_margin(m, ex) == 4.0 * base);
    }
}

TEST_CASE("validate_example enforces the invariants") {
    CHECK_NOTHROW(validate_example(make_ex({{0, 1.0}, {3, 2.0}}, -1)));
    CHECK_THROWS_AS(validate_example(make_ex({{0, 1.0}}, 2)), DataError);
    CHECK_THROWS_AS(validate_example(make_ex({{3, 1.0}, {1, 1.0}}, +1)), DataError);
    CHECK_THROWS_AS(validate_example(make_ex({{1, 1.0}, {1, 2.0}}, +1)), DataError);
    CHECK_THROWS_AS(validate_example(make_ex({{0, std::nan("")}}, +1)), DataError);
}

TEST_CASE("validate_config enforces knob ranges") {
    FilterConfig cfg;
    CHECK_NOTHROW(validate_config(cfg));
    FilterConfig bad = cfg;
    bad.delta = 0.0;
    CHECK_THROWS_AS(validate_config(bad), DomainError);
    bad = cfg;
    bad.delta = 1.0;
    CHECK_THROWS_AS(validate_config(bad), DomainError);
    bad = cfg;
    bad.decay = 1.0;
    CHECK_THROWS_AS(validate_config(bad), DomainError);
    bad = cfg;
    bad.min_std = 0.0;
    CHECK_THROWS_AS(validate_config(bad), DomainError);
    bad = cfg;
    bad.stride = 0;
    CHECK_THROWS_AS(validate_config(bad), DomainError);
}

}  // TEST_SUITE
