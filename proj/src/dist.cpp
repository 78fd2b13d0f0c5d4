#include "ratelab/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ratelab {

namespace {

constexpr double kCfEps = 1e-15;
constexpr int kCfMaxIter = 300;

// Lentz continued fraction for the incomplete beta, valid for
// x < (a+1)/(a+b+2).
double betacf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kCfMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = 1.0 + aa / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kCfEps) break;
    }
    return h;
}

double igamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kCfMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kCfEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for the upper incomplete gamma Q(a,x), x > a+1.
double igamma_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1e300;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kCfMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kCfEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error(std::string(what) + " must lie in [0,1]");
}

// generic doubling + bisection for a nonincreasing integer survival function
template <typename Survival>
long inverse_survival_search(Survival surv, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("inverse survival requires q in (0,1)");
    long hi = 1;
    while (surv(hi) > q) {
        if (hi > (1L << 61)) throw std::runtime_error("inverse survival search overflow");
        hi *= 2;
    }
    long lo = -1; // survival(-1) = 1 > q always
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (surv(mid) <= q)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

double log_binom_coeff(long n, long k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

double ibeta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw std::domain_error("ibeta requires a,b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lfront =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(lfront);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double igamma_lower(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("igamma_lower requires a > 0");
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) return igamma_series(a, x);
    return 1.0 - igamma_cf(a, x);
}

double binom_pmf(const BinomialParams& params, long k) {
    if (params.n < 0) throw std::domain_error("binomial requires n >= 0");
    check_probability(params.p, "binomial p");
    if (k < 0 || k > params.n) throw std::domain_error("binom_pmf requires 0 <= k <= n");
    if (params.p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (params.p == 1.0) return k == params.n ? 1.0 : 0.0;
    const double lp = log_binom_coeff(params.n, k) + k * std::log(params.p) +
                      (params.n - k) * std::log1p(-params.p);
    return std::exp(lp);
}

double binom_survival(const BinomialParams& params, long k) {
    if (params.n < 0) throw std::domain_error("binomial requires n >= 0");
    check_probability(params.p, "binomial p");
    if (k < 0) return 1.0;
    if (k >= params.n) return 0.0;
    if (params.p == 0.0) return 0.0;
    if (params.p == 1.0) return 1.0;
    // P(X > k) = P(X >= k+1) = I_p(k+1, n-k)
    return ibeta(static_cast<double>(k + 1), static_cast<double>(params.n - k), params.p);
}

long binom_inverse_survival(const BinomialParams& params, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("inverse survival requires q in (0,1)");
    long lo = -1;
    long hi = params.n; // survival(n) = 0 <= q
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (binom_survival(params, mid) <= q)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double poisson_pmf(const PoissonParams& params, long k) {
    if (!(params.mean >= 0.0)) throw std::domain_error("poisson mean must be >= 0");
    if (k < 0) return 0.0;
    if (params.mean == 0.0) return k == 0 ? 1.0 : 0.0;
    const double lp =
        -params.mean + k * std::log(params.mean) - std::lgamma(static_cast<double>(k) + 1.0);
    return std::exp(lp);
}

double poisson_survival(const PoissonParams& params, long k) {
    if (!(params.mean >= 0.0)) throw std::domain_error("poisson mean must be >= 0");
    if (k < 0) return 1.0;
    if (params.mean == 0.0) return 0.0;
    // P(N > k) = P_reg(k+1, mean)
    return igamma_lower(static_cast<double>(k + 1), params.mean);
}

long poisson_inverse_survival(const PoissonParams& params, double q) {
    if (params.mean == 0.0) {
        if (!(q > 0.0 && q < 1.0)) throw std::domain_error("inverse survival requires q in (0,1)");
        return 0;
    }
    return inverse_survival_search([&](long k) { return poisson_survival(params, k); }, q);
}

double negbinom_pmf(const NegBinomialParams& params, long k) {
    if (!(params.m > 0.0)) throw std::domain_error("negative binomial requires m > 0");
    if (!(params.p > 0.0 && params.p <= 1.0))
        throw std::domain_error("negative binomial requires p in (0,1]");
    if (k < 0) return 0.0;
    if (params.p == 1.0) return k == 0 ? 1.0 : 0.0;
    const double lp = std::lgamma(k + params.m) - std::lgamma(params.m) -
                      std::lgamma(static_cast<double>(k) + 1.0) + params.m * std::log(params.p) +
                      k * std::log1p(-params.p);
    return std::exp(lp);
}

double negbinom_survival(const NegBinomialParams& params, long k) {
    if (!(params.m > 0.0)) throw std::domain_error("negative binomial requires m > 0");
    if (!(params.p > 0.0 && params.p <= 1.0))
        throw std::domain_error("negative binomial requires p in (0,1]");
    if (k < 0) return 1.0;
    if (params.p == 1.0) return 0.0;
    // P(X > k) = I_{1-p}(k+1, m)
    return ibeta(static_cast<double>(k + 1), params.m, 1.0 - params.p);
}

long negbinom_inverse_survival(const NegBinomialParams& params, double q) {
    if (params.p == 1.0) {
        if (!(q > 0.0 && q < 1.0)) throw std::domain_error("inverse survival requires q in (0,1)");
        return 0;
    }
    return inverse_survival_search([&](long k) { return negbinom_survival(params, k); }, q);
}

double normal_survival(double x, double sigma) {
    if (!(sigma > 0.0)) throw std::domain_error("normal_survival requires sigma > 0");
    return 0.5 * std::erfc(x / (sigma * 1.4142135623730950488));
}

// ---------------------------------------------------------------------------
// DiscreteDist
// ---------------------------------------------------------------------------

void DiscreteDist::rebuild_survival() {
    const std::size_t n = pmf_.size();
    surv_.assign(n, 0.0);
    double acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        surv_[i] = acc;          // P(X > i) over the materialized support
        acc += pmf_[i];
    }
}

DiscreteDist DiscreteDist::from_pmf(std::vector<double> pmf) {
    if (pmf.empty()) throw std::invalid_argument("empty PMF");
    for (double v : pmf)
        if (!(v >= 0.0)) throw std::invalid_argument("PMF entries must be >= 0");
    DiscreteDist d;
    d.pmf_ = std::move(pmf);
    d.rebuild_survival();
    return d;
}

DiscreteDist DiscreteDist::binomial(long n, double p) {
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
    for (long k = 0; k <= n; ++k) pmf[static_cast<std::size_t>(k)] = binom_pmf({n, p}, k);
    return from_pmf(std::move(pmf));
}

DiscreteDist DiscreteDist::poisson(double mean, const TruncationPolicy& policy) {
    if (mean == 0.0) return point_mass(0);
    long upper = poisson_inverse_survival({mean}, policy.tail_eps);
    upper = std::min<long>(upper, static_cast<long>(policy.max_terms));
    std::vector<double> pmf(static_cast<std::size_t>(upper) + 1);
    for (long k = 0; k <= upper; ++k) pmf[static_cast<std::size_t>(k)] = poisson_pmf({mean}, k);
    return from_pmf(std::move(pmf));
}

DiscreteDist DiscreteDist::negbinomial(double m, double p, const TruncationPolicy& policy) {
    if (p == 1.0) return point_mass(0);
    long upper = negbinom_inverse_survival({m, p}, policy.tail_eps);
    upper = std::min<long>(upper, static_cast<long>(policy.max_terms));
    std::vector<double> pmf(static_cast<std::size_t>(upper) + 1);
    for (long k = 0; k <= upper; ++k) pmf[static_cast<std::size_t>(k)] = negbinom_pmf({m, p}, k);
    return from_pmf(std::move(pmf));
}

DiscreteDist DiscreteDist::uniform(long upper) {
    if (upper < 0) throw std::invalid_argument("uniform requires upper >= 0");
    return from_pmf(std::vector<double>(static_cast<std::size_t>(upper) + 1,
                                        1.0 / (static_cast<double>(upper) + 1.0)));
}

DiscreteDist DiscreteDist::point_mass(long k) {
    if (k < 0) throw std::invalid_argument("point_mass requires k >= 0");
    std::vector<double> pmf(static_cast<std::size_t>(k) + 1, 0.0);
    pmf.back() = 1.0;
    return from_pmf(std::move(pmf));
}

DiscreteDist DiscreteDist::scaled(const DiscreteDist& base, long l) {
    if (l < 1) throw std::invalid_argument("scale factor must be >= 1");
    std::vector<double> pmf(static_cast<std::size_t>(base.max_support()) * l + 1, 0.0);
    for (long k = 0; k <= base.max_support(); ++k)
        pmf[static_cast<std::size_t>(k * l)] = base.pmf(k);
    return from_pmf(std::move(pmf));
}

DiscreteDist DiscreteDist::mixture(double w_first, const DiscreteDist& first,
                                   const DiscreteDist& second) {
    check_probability(w_first, "mixture weight");
    const long upper = std::max(first.max_support(), second.max_support());
    std::vector<double> pmf(static_cast<std::size_t>(upper) + 1, 0.0);
    for (long k = 0; k <= upper; ++k)
        pmf[static_cast<std::size_t>(k)] = w_first * first.pmf(k) + (1.0 - w_first) * second.pmf(k);
    return from_pmf(std::move(pmf));
}

double DiscreteDist::pmf(long k) const {
    if (k < 0 || k > max_support()) return 0.0;
    return pmf_[static_cast<std::size_t>(k)];
}

double DiscreteDist::survival(long k) const {
    if (k < 0) return 1.0;
    if (k >= max_support()) return 0.0;
    return surv_[static_cast<std::size_t>(k)];
}

long DiscreteDist::inverse_survival(double q) const {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("inverse survival requires q in (0,1)");
    // surv_ is nonincreasing: first index with surv_[k] <= q
    const auto it = std::partition_point(surv_.begin(), surv_.end(),
                                         [q](double s) { return s > q; });
    return static_cast<long>(it - surv_.begin());
}

long DiscreteDist::quantile(double q) const {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("quantile requires q in (0,1)");
    // cdf(k) >= q  <=>  survival(k) <= 1-q
    const double target = 1.0 - q;
    const auto it = std::partition_point(surv_.begin(), surv_.end(),
                                         [target](double s) { return s > target; });
    return static_cast<long>(it - surv_.begin());
}

double DiscreteDist::total_mass() const {
    return surv_.empty() ? 0.0 : surv_[0] + pmf_[0];
}

}  // namespace ratelab
