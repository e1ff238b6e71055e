#include <cmath>
#include <vector>

#include <doctest.h>

#include "attn/rng.hpp"
#include "attn/stats.hpp"
#include "oracles.hpp"

using namespace attn;

TEST_SUITE("stats") {

TEST_CASE("inverse_normal_cdf hits the median exactly") {
    CHECK(inverse_normal_cdf(0.5) == 0.0);
}

TEST_CASE("inverse_normal_cdf matches the bisection oracle at frozen points") {
    // frozen from oracle::normal_quantile
    CHECK(std::fabs(inverse_normal_cdf(0.975) - 1.959963984540054) < 1e-9);
    CHECK(std::fabs(inverse_normal_cdf(0.95) - 1.6448536269514722) < 1e-9);
    CHECK(std::fabs(inverse_normal_cdf(0.975) - oracle::normal_quantile(0.975)) < 1e-9);
    CHECK(std::fabs(inverse_normal_cdf(0.95) - oracle::normal_quantile(0.95)) < 1e-9);
}

TEST_CASE("inverse_normal_cdf is antisymmetric") {
    for (double p : {0.001, 0.01, 0.1, 0.25, 0.4, 0.49, 0.5}) {
        CHECK(std::fabs(inverse_normal_cdf(1.0 - p) + inverse_normal_cdf(p)) <= 1e-12);
    }
}

TEST_CASE("round trip through the quadrature CDF stays within 1e-9") {
    for (double p = 0.001; p < 0.9995; p += 0.007) {
        const double z = inverse_normal_cdf(p);
        CHECK(std::fabs(oracle::normal_cdf(z) - p) <= 1e-9);
    }
    for (double p : {1e-4, 1e-3, 1.0 - 1e-3, 1.0 - 1e-4}) {
        const double z = inverse_normal_cdf(p);
        CHECK(std::fabs(oracle::normal_cdf(z) - p) <= 1e-9);
    }
}

TEST_CASE("inverse_normal_cdf is strictly increasing on a grid") {
    double prev = inverse_normal_cdf(0.0005);
    for (double p = 0.001; p < 0.9999; p += 0.0013) {
        const double z = inverse_normal_cdf(p);
        CHECK(z > prev);
        prev = z;
    }
}

TEST_CASE("inverse_normal_cdf rejects out-of-domain input") {
    CHECK_THROWS_AS(inverse_normal_cdf(0.0), DomainError);
    CHECK_THROWS_AS(inverse_normal_cdf(1.0), DomainError);
    CHECK_THROWS_AS(inverse_normal_cdf(-0.2), DomainError);
    CHECK_THROWS_AS(inverse_normal_cdf(1.2), DomainError);
    CHECK_THROWS_AS(inverse_normal_cdf(std::nan("")), DomainError);
}

TEST_CASE("warmup stream [1,2,3] gives mean 2, sample variance 1") {
    MarginMoments m;
    m.warmup = 3;
    for (double x : {1.0, 2.0, 3.0}) m = moments_update(m, x);
    CHECK(m.mean == 2.0);
    CHECK(m.second_moment == 1.0);
    CHECK(m.count == 3);
    const auto [mean, sd] = moments_mean_std(m, 1e-9);
    CHECK(mean == 2.0);
    CHECK(sd == 1.0);
}

TEST_CASE("constant stream keeps variance at zero through both phases") {
    MarginMoments m;
    m.warmup = 5;
    m.decay = 0.99;
    for (int i = 0; i < 200; ++i) {
        m = moments_update(m, 5.0);
        CHECK(std::fabs(m.mean - 5.0) <= 1e-12);
        CHECK(m.second_moment >= 0.0);
        CHECK(m.second_moment <= 1e-24);
    }
}

TEST_CASE("EMA recovers the moments of Normal(3, 2^2)") {
    MarginMoments m;
    m.warmup = 0;
    m.decay = 0.999;
    Rng rng(424242);
    for (int i = 0; i < 100000; ++i) m = moments_update(m, 3.0 + 2.0 * rng.next_normal());
    const auto [mean, sd] = moments_mean_std(m, 1e-9);
    CHECK(std::fabs(mean - 3.0) <= 0.1);
    CHECK(std::fabs(sd - 2.0) <= 0.15);
}

TEST_CASE("Welford phase matches the two-pass oracle") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t len = 1 + rng.next_below(64);
        const double mu = (rng.next_unit() - 0.5) * 10.0;
        const double sigma = 0.1 + 3.0 * rng.next_unit();
        std::vector<double> xs(len);
        for (double& x : xs) x = mu + sigma * rng.next_normal();

        MarginMoments m;
        m.warmup = 64;
        for (double x : xs) m = moments_update(m, x);

        const auto [om, ov] = oracle::two_pass_mean_var(xs);
        CHECK(std::fabs(m.mean - om) <= 1e-10 * std::max(1.0, std::fabs(om)));
        CHECK(std::fabs(m.second_moment - ov) <= 1e-10 * std::max(1.0, ov));
    }
}

TEST_CASE("moments stay finite and non-negative on rough streams") {
    Rng rng(5150);
    MarginMoments m;
    m.warmup = 10;
    m.decay = 0.9;
    for (int i = 0; i < 5000; ++i) {
        const double scale = std::pow(10.0, static_cast<double>(rng.next_below(13)) - 6.0);
        m = moments_update(m, scale * rng.next_normal());
        CHECK(m.second_moment >= 0.0);
        CHECK(std::isfinite(m.mean));
        CHECK(std::isfinite(m.second_moment));
    }
    CHECK_THROWS_AS(moments_update(m, std::nan("")), DomainError);
    CHECK_THROWS_AS(moments_update(m, HUGE_VAL), DomainError);
}

TEST_CASE("moments_mean_std clamps the std from below") {
    MarginMoments fresh;
    {
        const auto [mean, sd] = moments_mean_std(fresh, 1e-9);
        CHECK(mean == 0.0);
        CHECK(sd == 1e-9);
    }
    MarginMoments tiny;
    tiny.second_moment = 1e-30;
    tiny.count = 10;
    const auto [mean, sd] = moments_mean_std(tiny, 1e-9);
    CHECK(mean == 0.0);
    CHECK(sd == 1e-9);
}

}  // TEST_SUITE
