#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ratelab/dist.hpp"

using namespace ratelab;

namespace {

using u128 = unsigned __int128;

u128 binom_coeff_u128(int n, int k) {
    // Pascal's triangle; exact for the n <= 30 oracle range
    std::vector<std::vector<u128>> rows(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        rows[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(i) + 1, 1);
        for (int j = 1; j < i; ++j)
            rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                rows[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] +
                rows[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
    }
    return rows[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

// Exact-rational tail P(X > k) for X ~ B(n, a/b): terms and denominator stay
// within 128 bits for n <= 30, b <= 3.
long double exact_binom_survival(int n, int a, int b, int k) {
    if (k < 0) return 1.0L;
    if (k >= n) return 0.0L;
    u128 num = 0;
    for (int j = k + 1; j <= n; ++j) {
        u128 term = binom_coeff_u128(n, j);
        for (int i = 0; i < j; ++i) term *= static_cast<u128>(a);
        for (int i = 0; i < n - j; ++i) term *= static_cast<u128>(b - a);
        num += term;
    }
    u128 den = 1;
    for (int i = 0; i < n; ++i) den *= static_cast<u128>(b);
    return static_cast<long double>(num) / static_cast<long double>(den);
}

// every toss sequence of length m+k whose m-th head lands on the last toss
double negbinom_pmf_by_enumeration(int m, double p, int k) {
    const int len = m + k;
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << len); ++mask) {
        int heads = 0;
        for (int i = 0; i < len; ++i)
            if (mask & (1u << i)) ++heads;
        if (heads != m) continue;
        if ((mask & (1u << (len - 1))) == 0) continue; // last toss must be the m-th head
        total += std::pow(p, m) * std::pow(1.0 - p, k);
    }
    return total;
}

}  // namespace

TEST_CASE("binomial pmf matches exact values") {
    CHECK(binom_pmf({10, 0.5}, 10) == doctest::Approx(1.0 / 1024.0).epsilon(1e-12));
    CHECK(binom_pmf({5, 0.0}, 0) == 1.0);
    CHECK(binom_pmf({10, 0.5}, 5) == doctest::Approx(252.0 / 1024.0).epsilon(1e-12));
    CHECK_THROWS_AS(binom_pmf({10, 0.5}, 11), std::domain_error);
    CHECK_THROWS_AS(binom_pmf({10, 0.5}, -1), std::domain_error);
}

TEST_CASE("binomial survival matches the exact rational oracle") {
    CHECK(binom_survival({10, 0.5}, 7) == doctest::Approx(56.0 / 1024.0).epsilon(1e-12));
    CHECK(binom_survival({10, 0.5}, -1) == 1.0);
    CHECK(binom_survival({10, 0.5}, 10) == 0.0);

    const struct { int a, b; } probs[] = {{1, 2}, {1, 3}, {2, 3}};
    double worst = 0.0;
    for (int n = 0; n <= 30; ++n) {
        for (const auto& pr : probs) {
            const double p = static_cast<double>(pr.a) / pr.b;
            for (int k = -1; k <= n; ++k) {
                const long double expected = exact_binom_survival(n, pr.a, pr.b, k);
                worst = std::max(worst, std::fabs(binom_survival({n, p}, k) -
                                                  static_cast<double>(expected)));
            }
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("binomial survival also sums the pmf directly") {
    for (int n : {3, 17, 30}) {
        for (double p : {0.2, 0.5, 0.9}) {
            for (int k = -1; k <= n; ++k) {
                long double brute = 0.0L;
                for (int j = std::max(0, k + 1); j <= n; ++j) brute += binom_pmf({n, p}, j);
                CHECK(std::fabs(binom_survival({n, p}, k) - static_cast<double>(brute)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("binomial inverse survival uses the min{k : S(k) <= q} convention") {
    CHECK(binom_inverse_survival({10, 0.5}, 0.05) == 8);
    CHECK(binom_inverse_survival({10, 0.5}, 0.999) == 1);
    CHECK_THROWS_AS(binom_inverse_survival({10, 0.5}, 0.0), std::domain_error);
    CHECK_THROWS_AS(binom_inverse_survival({10, 0.5}, 1.0), std::domain_error);

    long prev = 11;
    for (double q = 0.01; q < 1.0; q += 0.01) {
        const long k = binom_inverse_survival({10, 0.5}, q);
        CHECK(k <= prev); // nonincreasing in q
        prev = k;
    }
}

TEST_CASE("poisson pmf") {
    CHECK(poisson_pmf({0.0}, 0) == 1.0);
    CHECK(poisson_pmf({0.0}, 3) == 0.0);
    CHECK(poisson_pmf({1.0}, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    const long double expected = std::exp(-5.0L) * 3125.0L / 120.0L;
    CHECK(poisson_pmf({5.0}, 5) == doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
}

TEST_CASE("poisson survival against brute pmf sums") {
    for (double mean : {0.3, 4.0, 25.0}) {
        for (long k = -1; k <= 60; ++k) {
            long double brute = 0.0L;
            for (long j = 0; j <= std::max(200L, 10 * static_cast<long>(mean)); ++j)
                if (j > k) brute += poisson_pmf({mean}, j);
            CHECK(std::fabs(poisson_survival({mean}, k) - static_cast<double>(brute)) <= 1e-12);
        }
    }
}

TEST_CASE("negative binomial pmf") {
    CHECK(negbinom_pmf({1.0, 0.5}, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(negbinom_pmf({2.0, 0.5}, 1) == doctest::Approx(0.25).epsilon(1e-12));
    double partial = 0.0;
    for (long k = 0; k <= 3; ++k) partial += negbinom_pmf({1.0, 0.5}, k);
    CHECK(partial == doctest::Approx(0.9375).epsilon(1e-12));
}

TEST_CASE("negative binomial with integer m matches coin-toss enumeration") {
    for (int m = 1; m <= 3; ++m)
        for (int k = 0; k <= 6; ++k)
            for (double p : {0.3, 0.5, 0.8})
                CHECK(negbinom_pmf({static_cast<double>(m), p}, k) ==
                      doctest::Approx(negbinom_pmf_by_enumeration(m, p, k)).epsilon(1e-10));
}

TEST_CASE("negative binomial survival and real-valued m") {
    for (double m : {0.7, 2.0, 3.5}) {
        for (double p : {0.2, 0.6}) {
            for (long k = -1; k <= 40; ++k) {
                long double brute = 0.0L;
                for (long j = k + 1; j <= 2000; ++j) brute += negbinom_pmf({m, p}, j);
                CHECK(std::fabs(negbinom_survival({m, p}, k) - static_cast<double>(brute)) <= 1e-11);
            }
        }
    }
}

TEST_CASE("normal survival") {
    CHECK(normal_survival(0.0, 1.0) == 0.5);
    CHECK(std::fabs(normal_survival(1.6448536, 1.0) - 0.05) < 1e-6);
    CHECK(normal_survival(2.0 * 3.0, 3.0) == normal_survival(2.0, 1.0));
    CHECK_THROWS_AS(normal_survival(0.0, 0.0), std::domain_error);
}

TEST_CASE("DiscreteDist: cdf + survival is exactly one") {
    const DiscreteDist binom = DiscreteDist::binomial(10, 0.3);
    const DiscreteDist pois = DiscreteDist::poisson(4.0);
    for (const DiscreteDist* d : {&binom, &pois})
        for (long k = -1; k <= d->max_support() + 1; ++k)
            CHECK(d->cdf(k) + d->survival(k) == 1.0);
    CHECK(pois.total_mass() >= 1.0 - 1e-12);
    CHECK(pois.total_mass() <= 1.0 + 1e-15);
}

TEST_CASE("DiscreteDist: inverse survival round trip") {
    const DiscreteDist d = DiscreteDist::binomial(12, 0.4);
    for (long k = 0; k <= d.max_support(); ++k) {
        const double s = d.survival(k);
        if (s <= 0.0 || s >= 1.0) continue;
        CHECK(d.inverse_survival(s * (1.0 + 1e-13)) <= k);
    }
    // monotone in q
    long prev = d.max_support() + 1;
    for (double q = 0.02; q < 1.0; q += 0.02) {
        const long k = d.inverse_survival(q);
        CHECK(k <= prev);
        prev = k;
    }
}

TEST_CASE("DiscreteDist: scaled, uniform, point mass, mixture") {
    const DiscreteDist base = DiscreteDist::binomial(5, 0.5);
    const DiscreteDist doubled = DiscreteDist::scaled(base, 2);
    CHECK(doubled.max_support() == 10);
    for (long k = 0; k <= 5; ++k) {
        CHECK(doubled.pmf(2 * k) == base.pmf(k));
        if (2 * k + 1 <= 10) CHECK(doubled.pmf(2 * k + 1) == 0.0);
    }
    const DiscreteDist uniform = DiscreteDist::uniform(10);
    CHECK(uniform.survival(7) == doctest::Approx(3.0 / 11.0).epsilon(1e-12));
    const DiscreteDist point = DiscreteDist::point_mass(3);
    CHECK(point.pmf(3) == 1.0);
    CHECK(point.survival(3) == 0.0);
    const DiscreteDist mix = DiscreteDist::mixture(0.25, point, uniform);
    CHECK(mix.pmf(3) == doctest::Approx(0.25 + 0.75 / 11.0).epsilon(1e-12));
    CHECK(mix.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("DiscreteDist: quantile convention") {
    const DiscreteDist d = DiscreteDist::binomial(10, 0.5);
    CHECK(d.quantile(0.5) == 5);
    CHECK(d.quantile(0.999999) == 10);
    CHECK(d.quantile(1e-6) == 0);
    CHECK_THROWS_AS(d.quantile(0.0), std::domain_error);
}
