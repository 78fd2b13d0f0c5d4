#include <doctest.h>

#include <cmath>
#include <vector>

#include "ratelab/rng.hpp"

using namespace ratelab;

TEST_CASE("streams are deterministic and split by trial index") {
    RngStream a = RngStream::for_trial(7, 3);
    RngStream b = RngStream::for_trial(7, 3);
    RngStream c = RngStream::for_trial(7, 4);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        any_diff = any_diff || (va != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("uniform doubles live in [0,1)") {
    RngStream rng(123);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_double();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(std::fabs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("exponential sampler hits its mean") {
    RngStream rng(5);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rng.exponential(2.0);
    const double se = 0.5 / std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(sum / n - 0.5) < 3.0 * se);
}

TEST_CASE("gamma sampler moments, both shape regimes") {
    for (double shape : {0.5, 3.0}) {
        const double rate = 2.0;
        RngStream rng(11);
        const int n = 200000;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double g = rng.gamma(shape, rate);
            sum += g;
            sumsq += g * g;
        }
        const double mean = sum / n;
        const double var = sumsq / n - mean * mean;
        const double true_mean = shape / rate;
        const double true_var = shape / (rate * rate);
        CHECK(std::fabs(mean - true_mean) < 4.0 * std::sqrt(true_var / n));
        CHECK(var == doctest::Approx(true_var).epsilon(0.05));
    }
}

TEST_CASE("poisson sampler moments across the small/large mean switch") {
    for (double mean : {3.0, 2000.0}) {
        RngStream rng(17);
        const int n = 20000;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng.poisson(mean));
            sum += k;
            sumsq += k * k;
        }
        const double m = sum / n;
        const double var = sumsq / n - m * m;
        CHECK(std::fabs(m - mean) < 4.0 * std::sqrt(mean / n));
        CHECK(var / mean == doctest::Approx(1.0).epsilon(0.06));
    }
}

TEST_CASE("binomial sampler moments across both paths") {
    struct Case {
        long n;
        double p;
    } cases[] = {{40, 0.3}, {100000, 0.3}, {5000, 0.9}};
    for (const auto& c : cases) {
        RngStream rng(23);
        const int trials = 20000;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < trials; ++i) {
            const double k = static_cast<double>(rng.binomial(c.n, c.p));
            sum += k;
            sumsq += k * k;
        }
        const double mean = sum / trials;
        const double var = sumsq / trials - mean * mean;
        const double true_mean = static_cast<double>(c.n) * c.p;
        const double true_var = true_mean * (1.0 - c.p);
        CHECK(std::fabs(mean - true_mean) < 4.0 * std::sqrt(true_var / trials));
        CHECK(var == doctest::Approx(true_var).epsilon(0.06));
    }
}

TEST_CASE("binomial sampler respects degenerate edges") {
    RngStream rng(1);
    CHECK(rng.binomial(10, 0.0) == 0);
    CHECK(rng.binomial(10, 1.0) == 10);
    CHECK(rng.binomial(0, 0.5) == 0);
}
