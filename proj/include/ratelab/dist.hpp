#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ratelab {

/// Truncation policy for infinite sums: stop once the remaining tail mass of
/// the driving distribution is below tail_eps, never exceeding max_terms.
struct TruncationPolicy {
    double tail_eps = 1e-12;
    std::size_t max_terms = 10'000'000;
};

struct BinomialParams {
    long n = 0;   // trials, n >= 0
    double p = 0; // success probability in [0,1]
};

struct PoissonParams {
    double mean = 0; // lambda*t >= 0
};

// Counts tails before the m-th head of a p-coin; real-valued m uses the
// gamma-function form of the PMF.
struct NegBinomialParams {
    double m = 1; // heads target, > 0
    double p = 1; // head probability in (0,1]
};

// ---------------------------------------------------------------------------
// Scalar special functions. All PMFs are evaluated in log space (log-gamma)
// and exponentiated, so counts in the tens of thousands stay finite.
// ---------------------------------------------------------------------------

double log_binom_coeff(long n, long k);

/// Regularized incomplete beta I_x(a,b).
double ibeta(double a, double b, double x);

/// Regularized lower incomplete gamma P(a,x).
double igamma_lower(double a, double x);

double binom_pmf(const BinomialParams& params, long k);

/// P(X > k); survival(-1) = 1, survival(n) = 0. Any integer k is accepted.
double binom_survival(const BinomialParams& params, long k);

/// min{k : P(X > k) <= q} for q in (0,1).
long binom_inverse_survival(const BinomialParams& params, double q);

double poisson_pmf(const PoissonParams& params, long k);
double poisson_survival(const PoissonParams& params, long k);
long poisson_inverse_survival(const PoissonParams& params, double q);

double negbinom_pmf(const NegBinomialParams& params, long k);
double negbinom_survival(const NegBinomialParams& params, long k);
long negbinom_inverse_survival(const NegBinomialParams& params, double q);

/// P(N(0, sigma^2) > x); sigma > 0.
double normal_survival(double x, double sigma);

// ---------------------------------------------------------------------------
// DiscreteDist: a nonnegative-integer distribution materialized as a PMF
// vector over 0..max_support(). Survival values are backward-accumulated
// from the PMF and cdf(k) is defined as 1 - survival(k), so
// cdf(k) + survival(k) == 1 holds exactly. Distributions with unbounded
// support are truncated at tail mass <= tail_eps of the policy, so the PMF
// sums to a value in [1 - tail_eps, 1].
// ---------------------------------------------------------------------------
class DiscreteDist {
public:
    static DiscreteDist from_pmf(std::vector<double> pmf);
    static DiscreteDist binomial(long n, double p);
    static DiscreteDist poisson(double mean, const TruncationPolicy& policy = {});
    static DiscreteDist negbinomial(double m, double p, const TruncationPolicy& policy = {});
    static DiscreteDist uniform(long upper); // uniform on {0..upper}
    static DiscreteDist point_mass(long k);
    /// Pushes the mass at k to k*l (batch-of-l support).
    static DiscreteDist scaled(const DiscreteDist& base, long l);
    static DiscreteDist mixture(double w_first, const DiscreteDist& first, const DiscreteDist& second);

    double pmf(long k) const;
    double cdf(long k) const { return 1.0 - survival(k); }
    double survival(long k) const;

    /// min{k : survival(k) <= q}, q in (0,1); nonincreasing in q.
    long inverse_survival(double q) const;
    /// min{k : cdf(k) >= q}, q in (0,1).
    long quantile(double q) const;

    long max_support() const { return static_cast<long>(pmf_.size()) - 1; }
    double total_mass() const;

private:
    DiscreteDist() = default;
    void rebuild_survival();

    std::vector<double> pmf_;
    std::vector<double> surv_; // surv_[k] = P(X > k), k = 0..max_support
};

}  // namespace ratelab
