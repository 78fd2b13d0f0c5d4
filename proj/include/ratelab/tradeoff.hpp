#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ratelab/dist.hpp"
#include "ratelab/point_process.hpp"

namespace ratelab {

// ---------------------------------------------------------------------------
// A scenario pins the data-generating processes for an A/B comparison:
// the control group runs `windows0` observation windows of length t0 on the
// control model, the treatment group `windows1` windows of length t1.
// Under the no-effect hypothesis both groups follow the control model; under
// the effect hypothesis the treatment group follows the treatment model.
// Both models must come from the same family and differ only in the rate
// parameter (arrival rate for the Poisson/compound families, theta for the
// negative binomial).
//
// Windows matter only for the negative binomial family, where every window
// draws a fresh rate from the mixing distribution; the other families have
// independent increments and see only the total exposure.
// ---------------------------------------------------------------------------
struct Scenario {
    ProcessModel control;
    ProcessModel treatment;
    double t0 = 1;
    double t1 = 1;
    long windows0 = 1;
    long windows1 = 1;
};

void validate(const Scenario& scenario);
Scenario null_scenario(const Scenario& scenario);
double total_exposure0(const Scenario& scenario);
double total_exposure1(const Scenario& scenario);

/// Aggregate group count draw over `windows` windows of length t; equal in
/// distribution to summing per-window draws.
long draw_group_count(const ProcessModel& model, double t, long windows, RngStream& rng);

// ---------------------------------------------------------------------------
// Closed-form error rates for the rate test applied to a scenario.
//
// beta_at_alpha_hat evaluates the printed double sum
//   beta(a^) = sum_n sum_{j=0}^{x_t(n)} P(N1=j) P(N0=n-j),
// where x_t(n) is the inverse survival of the test's design null B(n, p_c),
// p_c = T1/(T0+T1), at the type-1 error rate a^ actually set on the test.
//
// beta_at_alpha thresholds on the true conditional null of the statistic
// instead, giving the false negative rate at a realized false positive rate.
// The two coincide for Poisson data; for batch-compounded data the true null
// is the batch-scaled binomial and equals the plain-Poisson curve point for
// point. Only those two families have that structure in closed form.
//
// At an alpha_hat exactly equal to an attainable tail value the strict
// decision rule (reject iff p < alpha_hat) keeps one more fail-to-reject
// point than the printed sum; grids of non-attainable values are unaffected.
// ---------------------------------------------------------------------------

double beta_at_alpha_hat(const Scenario& scenario, double alpha_hat,
                         const TruncationPolicy& policy = {});
double beta_at_alpha(const Scenario& scenario, double alpha, const TruncationPolicy& policy = {});

/// Realized false positive rate of the test at threshold alpha_hat:
/// 1 - beta_at_alpha_hat of the no-effect scenario.
double alpha_at_alpha_hat(const Scenario& scenario, double alpha_hat,
                          const TruncationPolicy& policy = {});

/// Realized false positive rate when the rate test runs on batch-compounded
/// data, via the explicit Poisson-weighted double sum.
double alpha_detcompound(double lambda, long batch, double t0, double t1, double alpha_hat,
                         const TruncationPolicy& policy = {});

/// False negative rate for two negative-binomial groups: a (control) and b
/// (treatment) windows of length t, treatment theta reduced by dtheta.
double beta_negbinomial(double m, double theta, double dtheta, double t, long a, long b,
                        double alpha_hat, const TruncationPolicy& policy = {});

// ---------------------------------------------------------------------------
// Trade-off curves
// ---------------------------------------------------------------------------

struct CurvePoint {
    double alpha_hat = 0;
    double alpha = 0;
    double beta = 0;
    double alpha_se = 0;
    double beta_se = 0;
};

struct TradeoffCurve {
    std::vector<CurvePoint> points;
    std::string method; // "closed" or "mc"
    long trials = 0;
    std::uint64_t seed = 0;
};

/// Logit-spaced threshold grid over (lo, hi); resolves both tails.
std::vector<double> logit_grid(std::size_t count = 199, double lo = 0.001, double hi = 0.999);

TradeoffCurve curve_closed_form(const Scenario& scenario, std::span<const double> alpha_hat_grid,
                                const TruncationPolicy& policy = {});

/// Monte-Carlo curve: per trial, counts are drawn independently under the
/// no-effect and effect hypotheses; alpha is the fraction of no-effect trials
/// with p < alpha_hat, beta the fraction of effect trials with p >= alpha_hat.
/// Trial i uses RngStream::for_trial(seed, i), so results are identical for
/// any worker count; workers <= 1 runs the serial reference loop.
TradeoffCurve curve_monte_carlo(const Scenario& scenario, std::span<const double> alpha_hat_grid,
                                long trials, std::uint64_t seed, int workers = 1);

/// As curve_monte_carlo but the p-value uses an arbitrary null distribution
/// built per observed total count n (the swapped-null test).
using NullSwapFactory = std::function<DiscreteDist(long n)>;
TradeoffCurve curve_monte_carlo_swapped(const Scenario& scenario,
                                        std::span<const double> alpha_hat_grid, long trials,
                                        std::uint64_t seed, const NullSwapFactory& factory,
                                        int workers = 1);

struct InterpPoint {
    double beta = 0;
    double se = 0;
};

/// Linear interpolation of beta between a curve's attained alpha values.
InterpPoint interp_beta_at_alpha(const TradeoffCurve& curve, double alpha);

// ---------------------------------------------------------------------------
// QQ data: paired inverse-CDF values per grid quantile.
// ---------------------------------------------------------------------------

struct QqPoint {
    double q = 0;
    long x_quantile = 0;
    long y_quantile = 0;
};

std::vector<QqPoint> qq_data(const DiscreteDist& dist_x, const DiscreteDist& dist_y,
                             std::span<const double> q_grid);

}  // namespace ratelab
