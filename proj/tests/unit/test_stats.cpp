#include "doctest.h"

#include "stablebelief/error.hpp"
#include "stablebelief/stable.hpp"
#include "stablebelief/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace sb;

TEST_CASE("uniform quantiles give the minimal discrepancy") {
    const int n = 200;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = (i + 0.5) / n;
    const auto r = ks_test(x, [](double v) { return v; });
    CHECK(r.ksstat == doctest::Approx(0.5 / n));
    CHECK(r.p_value > 0.999);
    CHECK(r.pass_at_5pct);
    CHECK(r.n_samples == static_cast<std::size_t>(n));
}

TEST_CASE("kolmogorov survival reference values") {
    // Classic critical values of the limiting distribution.
    CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_survival(1.2239) == doctest::Approx(0.10).epsilon(1e-3));
    CHECK(kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(kolmogorov_survival(0.0) == 1.0);
}

TEST_CASE("p-value is nonincreasing in D") {
    double prev = 1.0;
    for (int i = 1; i < 400; ++i) {
        const double p = kolmogorov_survival(0.01 * i);
        CHECK(p <= prev + 1e-15);
        prev = p;
    }
}

TEST_CASE("input validation") {
    std::vector<double> few(10, 0.5);
    CHECK_THROWS_AS(ks_test(few, [](double v) { return v; }), InsufficientData);
    std::vector<double> x(30, 0.5);
    CHECK_THROWS_AS(ks_test(x, [](double) { return 1.5; }), NonFiniteCdf);
    CHECK_THROWS_AS(ks_test(x, [](double) { return std::nan(""); }), NonFiniteCdf);
}

TEST_CASE("D is invariant under a monotone transform") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    std::vector<double> x(500);
    for (double& v : x) v = nd(rng);
    auto phi = [](double v) { return 0.5 * std::erfc(-v / std::sqrt(2.0)); };
    const double d0 = ks_test(x, phi).ksstat;
    std::vector<double> y(x.size());
    std::transform(x.begin(), x.end(), y.begin(), [](double v) { return std::exp(v) + v * v * v; });
    // inverse of the map by bisection feeds the model cdf
    auto inv = [](double w) {
        double lo = -50, hi = 50;
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (lo + hi);
            (std::exp(m) + m * m * m < w ? lo : hi) = m;
        }
        return 0.5 * (lo + hi);
    };
    const double d1 = ks_test(y, [&](double w) { return phi(inv(w)); }).ksstat;
    CHECK(d1 == doctest::Approx(d0).epsilon(1e-9));
}

TEST_CASE("cauchy data: stable fit passes, gaussian fit fails") {
    int stable_pass = 0;
    int gauss_fail = 0;
    const int seeds = 50;
    for (int s = 0; s < seeds; ++s) {
        const auto x = sample({1, 0, 1, 0}, 10000, 500 + s);
        const auto fit = estimate_koutrouvelis(x).params;
        stable_pass += ks_test(x, [&](double v) { return cdf(fit, v); }).pass_at_5pct;
        const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
        double var = 0;
        for (double v : x) var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / (x.size() - 1));
        gauss_fail += !ks_test(x, [&](double v) { return normal_cdf(v, mean, sd); }).pass_at_5pct;
    }
    CHECK(stable_pass >= 45);
    CHECK(gauss_fail >= 50);
}

TEST_CASE("running variance") {
    const auto g = sample({2, 0, 1, 0}, 100000, 4);
    const auto t = running_variance(g, 1000);
    CHECK(t.ns.back() == 100000u);
    for (std::size_t i = 0; i < t.ns.size(); ++i) {
        if (t.ns[i] >= 90000) CHECK(std::abs(t.variances[i] - 2.0) < 0.2);
    }
    const std::vector<double> flat(100, 4.0);
    for (double v : running_variance(flat, 10).variances) CHECK(v == 0.0);

    // Divergence signature: the trace spans a wide range instead of settling.
    const auto spread = [](const std::vector<double>& v) {
        return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
    };
    CHECK(spread(t.variances) < 1.5);
    for (std::uint64_t seed : {4, 5, 6}) {
        const auto c = sample({1, 0, 1, 0}, 100000, seed);
        CHECK(spread(running_variance(c, 1000).variances) > 5.0);
    }
    CHECK_THROWS_AS(running_variance(std::vector<double>{1.0}, 1), InsufficientData);
}
