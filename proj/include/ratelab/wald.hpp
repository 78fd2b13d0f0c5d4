#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ratelab/tradeoff.hpp"

namespace ratelab {

// ---------------------------------------------------------------------------
// Wald test on the log-rate difference, with the variance formula customized
// to negative-binomial counts:
//   V = (1 + eta^2) / (mu_t (lambda0 + eta lambda1)) + (1 + eta) k / eta
// eta is the treatment/control subject ratio, mu_t the expected events per
// observation period (estimated as the pooled mean), and k the dispersion
// (1/m), supplied rather than estimated. The statistic log(rate1/rate0) is
// compared against N(0, V / n_control).
// ---------------------------------------------------------------------------

struct WaldInput {
    std::vector<long> control_counts;   // Y_i0, nonempty
    std::vector<long> treatment_counts; // Y_i1, nonempty
    double exposure = 1;                // observation period per subject, > 0
    double dispersion_k = 1;            // k = 1/m, > 0; an input by design
};

/// Raised when either group has zero total events and the variance formula
/// degenerates; the exact rate test stays finite on the same data.
struct DegenerateVarianceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WaldStats {
    double log_rate_diff = 0; // beta1_hat = log(rate1) - log(rate0)
    double variance = 0;      // V
    double sigma = 0;         // sqrt(V / n_control)
};

WaldStats wald_statistic(const WaldInput& input);

/// P(N(0, sigma^2) > beta1_hat).
double wald_p_value(const WaldInput& input);

// ---------------------------------------------------------------------------
// Head-to-head comparison on shared simulated data: each trial draws one
// per-subject dataset per hypothesis and feeds the identical counts to both
// tests. Wald-degenerate trials are excluded from the Wald curve only and
// reported as a fraction of all (trial, hypothesis) pairs.
// ---------------------------------------------------------------------------

struct TestComparison {
    TradeoffCurve wald_curve;
    TradeoffCurve rate_curve;
    double degenerate_fraction = 0;
};

TestComparison compare_tests(const Scenario& scenario, std::span<const double> alpha_hat_grid,
                             long trials, std::uint64_t seed, int workers = 1);

}  // namespace ratelab
