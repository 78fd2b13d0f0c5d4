#include "ratelab/planner.hpp"

#include <algorithm>
#include <cmath>

#include "ratelab/rate_test.hpp"

namespace ratelab {

double air(const AirObservation& obs) {
    if (obs.interruptions < 0) throw std::domain_error("interruptions must be >= 0");
    if (!(obs.uptime_vm_days > 0.0)) throw std::domain_error("uptime must be > 0");
    return static_cast<double>(obs.interruptions) / obs.uptime_vm_days * kVmDaysPer100VmYears;
}

std::vector<RankedSlice> rank_slices(std::vector<Slice> slices, const CountObservation& reference) {
    if (!(reference.exposure > 0.0)) throw std::domain_error("reference exposure must be > 0");
    struct Entry {
        RankedSlice ranked;
        double rate;
    };
    std::vector<Entry> entries;
    entries.reserve(slices.size());
    for (const Slice& slice : slices) {
        const double p = rate_test_p_value({reference, slice.obs});
        entries.push_back({{slice.id, p},
                           static_cast<double>(slice.obs.events) / slice.obs.exposure});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.ranked.p_value != b.ranked.p_value) return a.ranked.p_value < b.ranked.p_value;
        if (a.rate != b.rate) return a.rate > b.rate;
        return a.ranked.id < b.ranked.id;
    });
    std::vector<RankedSlice> ranked;
    ranked.reserve(entries.size());
    for (Entry& e : entries) ranked.push_back(std::move(e.ranked));
    return ranked;
}

namespace {

ProcessModel apply_effect(const ProcessModel& baseline, double effect) {
    if (!(effect > 0.0)) throw std::domain_error("effect must be > 0");
    return std::visit(
        [&](const auto& m) -> ProcessModel {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, NegBinomialProcess>) {
                if (effect >= m.theta)
                    throw std::domain_error("effect must satisfy dtheta < theta");
                return NegBinomialProcess{m.shape, m.theta - effect};
            } else {
                auto shifted = m;
                shifted.rate += effect;
                return shifted;
            }
        },
        baseline);
}

struct BetaEstimate {
    double beta = 1;
    double se = 0;      // zero for closed-form evaluations
    double alpha = 0;   // realized false positive rate at the threshold
};

BetaEstimate evaluate_beta(const PlanRequest& request, double probe, const TruncationPolicy& policy,
                           long mc_trials, std::uint64_t seed) {
    const Scenario scenario = plan_scenario(request, probe);
    if (std::holds_alternative<BinomCompoundProcess>(request.baseline)) {
        // no closed form for binomially compounded counts
        const double grid[] = {request.target_fpr};
        const TradeoffCurve curve = curve_monte_carlo(scenario, grid, mc_trials, seed);
        return {curve.points[0].beta, curve.points[0].beta_se, curve.points[0].alpha};
    }
    BetaEstimate estimate;
    estimate.beta = beta_at_alpha_hat(scenario, request.target_fpr, policy);
    estimate.alpha = alpha_at_alpha_hat(scenario, request.target_fpr, policy);
    return estimate;
}

}  // namespace

Scenario plan_scenario(const PlanRequest& request, double t_or_count) {
    Scenario scenario;
    scenario.control = request.baseline;
    scenario.treatment = apply_effect(request.baseline, request.effect);
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, GrowWindow>) {
                scenario.t0 = scenario.t1 = t_or_count;
            } else {
                if (!(d.interval_length > 0.0))
                    throw std::domain_error("interval length must be > 0");
                scenario.t0 = scenario.t1 = d.interval_length;
                scenario.windows0 = scenario.windows1 = static_cast<long>(t_or_count);
            }
        },
        request.design);
    return scenario;
}

PlanResult time_to_wait(const PlanRequest& request, const TruncationPolicy& policy, long mc_trials,
                        std::uint64_t seed) {
    validate(request.baseline);
    if (!(request.target_fpr > 0.0 && request.target_fpr < 1.0))
        throw std::domain_error("target_fpr must lie in (0,1)");
    if (!(request.target_fnr > 0.0 && request.target_fnr < 1.0))
        throw std::domain_error("target_fnr must lie in (0,1)");

    PlanResult result;
    const auto meets_target = [&](const BetaEstimate& e) {
        // Monte-Carlo probes must clear the target by two standard errors.
        return e.beta + 2.0 * e.se <= request.target_fnr;
    };
    const auto probe = [&](double v) {
        const BetaEstimate e = evaluate_beta(request, v, policy, mc_trials, seed);
        result.trace.push_back({v, e.beta});
        return e;
    };

    const bool grow_window = std::holds_alternative<GrowWindow>(request.design);
    const bool nb_family = std::holds_alternative<NegBinomialProcess>(request.baseline);

    double lo = 0.0, hi = 1.0;
    BetaEstimate at_hi = probe(hi);
    if (meets_target(at_hi) && grow_window) {
        // already passing at t=1: halve toward the smallest passing window
        while (hi > 1e-9) {
            const double candidate = hi / 2.0;
            const BetaEstimate e = probe(candidate);
            if (!meets_target(e)) {
                lo = candidate;
                break;
            }
            hi = candidate;
            at_hi = e;
        }
    } else if (!meets_target(at_hi)) {
        double prev_beta = at_hi.beta;
        int doublings = 0;
        for (;;) {
            if (++doublings > 60)
                throw InfeasiblePlanError(
                    "target false negative rate unreachable within the search budget");
            lo = hi;
            hi *= 2.0;
            at_hi = probe(hi);
            if (meets_target(at_hi)) break;
            if (nb_family && grow_window && prev_beta - at_hi.beta < 1e-3 * request.target_fnr)
                throw InfeasiblePlanError(
                    "infeasible under single-window design: beta has plateaued above the target "
                    "(single-window variance does not vanish); grow the number of intervals "
                    "instead");
            prev_beta = at_hi.beta;
        }
    }

    if (grow_window) {
        // bisect to ~1% of the critical window length
        while (lo > 0.0 && hi / lo > 1.01) {
            const double mid = 0.5 * (lo + hi);
            const BetaEstimate e = probe(mid);
            if (meets_target(e)) {
                hi = mid;
                at_hi = e;
            } else {
                lo = mid;
            }
        }
    } else {
        // integer bisection to the smallest passing window count
        long int_lo = static_cast<long>(lo); // failing (0 = no data)
        long int_hi = static_cast<long>(hi);
        while (int_hi - int_lo > 1) {
            const long mid = int_lo + (int_hi - int_lo) / 2;
            const BetaEstimate e = probe(static_cast<double>(mid));
            if (meets_target(e)) {
                int_hi = mid;
                at_hi = e;
            } else {
                int_lo = mid;
            }
        }
        hi = static_cast<double>(int_hi);
    }

    result.t_or_count = hi;
    result.achieved_alpha = at_hi.alpha;
    result.achieved_beta = at_hi.beta;
    return result;
}

}  // namespace ratelab
