#pragma once

#include "ratelab/dist.hpp"
#include "ratelab/point_process.hpp"

namespace ratelab {

// ---------------------------------------------------------------------------
// Exact one-sided rate comparison. Conditional on the total count
// n = n0 + n1, the treatment count is Binomial(n, t1/(t0+t1)) when both
// groups share a rate, so the p-value is the binomial tail at or beyond the
// observed treatment count. The test is uniformly most powerful for Poisson
// counts and is applied unchanged to any other count process.
// ---------------------------------------------------------------------------

struct RateTestInput {
    CountObservation control;   // (n0, t0)
    CountObservation treatment; // (n1, t1)
};

struct TestOutcome {
    double p_value = 1;
    double threshold_alpha = 0;
    bool reject = false;        // reject  <=>  p_value < threshold_alpha
    long conditional_n = 0;     // n0 + n1
    double null_head_prob = 0;  // t1 / (t0 + t1)
};

/// phi = P(B(n, t1/(t0+t1)) >= n1). Zero events in both groups give phi = 1.
double rate_test_p_value(const RateTestInput& input);

TestOutcome decide(const RateTestInput& input, double alpha_hat);

/// Same tail test with the conditional null replaced by an arbitrary
/// distribution on {0..n}: phi' = P(null_swap >= n1). The swap changes the
/// p-value scale but provably not the beta-vs-realized-alpha trade-off, so
/// swapped tests must be compared at equal realized alpha, never equal
/// alpha_hat. Supports extending beyond {0..n} are rejected.
double null_swap_p_value(const RateTestInput& input, const DiscreteDist& null_swap);

/// Threshold transfer when the data's true null distribution is known:
/// returns S_design(S_true^{-1}(alpha)), the type-1 error rate to set so the
/// realized false positive rate is at most alpha. When alpha falls between
/// attainable tail values of the true null, the smaller (conservative)
/// alpha_hat is returned.
double adjust_alpha_hat(double alpha, const DiscreteDist& null_design,
                        const DiscreteDist& null_true);

/// Companion p-value transform under the same pair: S_design(S_true^{-1}(phi)).
double adjust_p_value(double phi, const DiscreteDist& null_design, const DiscreteDist& null_true);

}  // namespace ratelab
