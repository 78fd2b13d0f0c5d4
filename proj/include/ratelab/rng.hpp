#pragma once

#include <cmath>
#include <cstdint>

namespace ratelab {

// splitmix64 step; also used as the seed-mixing finalizer.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seedable xoshiro256** stream with explicit per-trial splitting.
///
/// Reproducibility contract: every stochastic operation in this library
/// draws from an explicitly seeded RngStream; there is no global RNG state.
/// Monte-Carlo trial i of a run with master seed s uses the stream
/// RngStream::for_trial(s, i), whose seed is splitmix64(s + (i+1)*GOLDEN)
/// expanded into the xoshiro256** state by four further splitmix64 steps.
/// Because each trial owns an independent stream, results are identical for
/// any partitioning of trials across workers.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64_next(sm);
    }

    static RngStream for_trial(std::uint64_t master_seed, std::uint64_t trial_index) {
        std::uint64_t sm = master_seed + (trial_index + 1) * 0x9e3779b97f4a7c15ull;
        return RngStream(splitmix64_next(sm));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0,1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0,1); safe as a log() argument.
    double uniform_open() {
        double u;
        do { u = next_double(); } while (u <= 0.0);
        return u;
    }

    /// One standard normal draw (Box-Muller, non-caching).
    double normal() {
        const double u1 = uniform_open();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    double exponential(double rate) { return -std::log(uniform_open()) / rate; }

    /// Gamma(shape, rate), mean shape/rate. Marsaglia-Tsang squeeze for
    /// shape >= 1, with the usual power-of-uniform boost below 1.
    double gamma(double shape, double rate) {
        if (shape < 1.0) {
            const double u = uniform_open();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

    /// Binomial(n, p), exact at any size: geometric skips when n*min(p,1-p)
    /// is small, otherwise the beta order-statistic split halves n.
    long binomial(long n, double p) {
        long acc = 0;
        for (;;) {
            if (n <= 0 || p <= 0.0) return acc;
            if (p >= 1.0) return acc + n;
            const bool flip = p > 0.5;
            const double q = flip ? 1.0 - p : p;
            if (static_cast<double>(n) * q <= 64.0 || n < 128) {
                const long tail = binomial_small(n, q);
                return acc + (flip ? n - tail : tail);
            }
            const long a = (n + 1) / 2;
            // a-th order statistic of n uniforms is Beta(a, n+1-a)
            const double g1 = gamma(static_cast<double>(a), 1.0);
            const double g2 = gamma(static_cast<double>(n + 1 - a), 1.0);
            const double w = g1 / (g1 + g2);
            if (w <= p) {
                acc += a;
                n -= a;
                p = (p - w) / (1.0 - w);
            } else {
                n = a - 1;
                p = p / w;
            }
        }
    }

    /// Poisson(mean), exact at any mean: gamma jumps reduce a large mean,
    /// then product-of-uniforms finishes.
    long poisson(double mean) {
        long acc = 0;
        while (mean > 30.0) {
            const long a = static_cast<long>(std::floor(0.875 * mean));
            const double g = gamma(static_cast<double>(a), 1.0);
            if (g <= mean) {
                acc += a;
                mean -= g;
            } else {
                return acc + binomial(a - 1, mean / g);
            }
        }
        const double limit = std::exp(-mean);
        long k = 0;
        double prod = next_double();
        while (prod > limit) {
            ++k;
            prod *= next_double();
        }
        return acc + k;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    // waiting-time method, O(n*q) expected; requires 0 < q <= 1/2
    long binomial_small(long n, double q) {
        const double lq = std::log1p(-q);
        long hits = 0;
        long pos = 0;
        for (;;) {
            const double u = uniform_open();
            pos += static_cast<long>(std::floor(std::log(u) / lq)) + 1;
            if (pos > n) return hits;
            ++hits;
        }
    }

    std::uint64_t state_[4];
};

}  // namespace ratelab
