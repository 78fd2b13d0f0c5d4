#include "ratelab/rate_test.hpp"

#include <stdexcept>

namespace ratelab {

namespace {

void check_input(const RateTestInput& input) {
    if (input.control.events < 0 || input.treatment.events < 0)
        throw std::domain_error("event counts must be >= 0");
    if (!(input.control.exposure > 0.0) || !(input.treatment.exposure > 0.0))
        throw std::domain_error("exposures must be > 0");
}

}  // namespace

double rate_test_p_value(const RateTestInput& input) {
    check_input(input);
    const long n = input.control.events + input.treatment.events;
    const double p = input.treatment.exposure / (input.treatment.exposure + input.control.exposure);
    // P(X >= n1) = P(X > n1 - 1)
    return binom_survival({n, p}, input.treatment.events - 1);
}

TestOutcome decide(const RateTestInput& input, double alpha_hat) {
    if (!(alpha_hat > 0.0 && alpha_hat < 1.0))
        throw std::domain_error("alpha_hat must lie in (0,1)");
    TestOutcome outcome;
    outcome.p_value = rate_test_p_value(input);
    outcome.threshold_alpha = alpha_hat;
    outcome.reject = outcome.p_value < alpha_hat;
    outcome.conditional_n = input.control.events + input.treatment.events;
    outcome.null_head_prob =
        input.treatment.exposure / (input.treatment.exposure + input.control.exposure);
    return outcome;
}

double null_swap_p_value(const RateTestInput& input, const DiscreteDist& null_swap) {
    check_input(input);
    const long n = input.control.events + input.treatment.events;
    if (null_swap.max_support() > n)
        throw std::domain_error("null swap distribution extends beyond {0..n0+n1}");
    return null_swap.survival(input.treatment.events - 1);
}

double adjust_alpha_hat(double alpha, const DiscreteDist& null_design,
                        const DiscreteDist& null_true) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
    if (null_design.max_support() != null_true.max_support())
        throw std::domain_error("design and true nulls must share a support range");
    return null_design.survival(null_true.inverse_survival(alpha));
}

double adjust_p_value(double phi, const DiscreteDist& null_design, const DiscreteDist& null_true) {
    if (!(phi > 0.0 && phi < 1.0)) throw std::domain_error("phi must lie in (0,1)");
    if (null_design.max_support() != null_true.max_support())
        throw std::domain_error("design and true nulls must share a support range");
    return null_design.survival(null_true.inverse_survival(phi));
}

}  // namespace ratelab
