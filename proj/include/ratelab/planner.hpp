#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ratelab/point_process.hpp"
#include "ratelab/tradeoff.hpp"

namespace ratelab {

// ---------------------------------------------------------------------------
// AIR: interruptions per 100 VM-years of up-time. 100 VM-years is fixed at
// 36500 VM-days (365-day year), so air({10, 36500}) == 10.
// ---------------------------------------------------------------------------

inline constexpr double kVmDaysPer100VmYears = 36500.0;

struct AirObservation {
    long interruptions = 0;
    double uptime_vm_days = 0; // > 0; up-time only, downtime excluded
};

double air(const AirObservation& obs);

// ---------------------------------------------------------------------------
// p-value ranking of slices against a reference population. Raw rate
// estimates on small slices are fickle; the exact-test p-value folds in the
// sample size. Ties break by descending estimated rate, then by id.
// ---------------------------------------------------------------------------

struct Slice {
    std::string id;
    CountObservation obs;
};

struct RankedSlice {
    std::string id;
    double p_value = 1;
};

std::vector<RankedSlice> rank_slices(std::vector<Slice> slices, const CountObservation& reference);

// ---------------------------------------------------------------------------
// Time-to-wait planning: smallest observation window (GrowWindow) or window
// count (GrowIntervals) at which the test reaches the target false negative
// rate with the threshold set to the target false positive rate. Closed-form
// beta drives the search where available; the binomial-compound family falls
// back to Monte Carlo and must clear the target by two standard errors.
// ---------------------------------------------------------------------------

struct GrowWindow {};

struct GrowIntervals {
    double interval_length = 1;
};

using PlanDesign = std::variant<GrowWindow, GrowIntervals>;

struct PlanRequest {
    ProcessModel baseline;
    double effect = 0; // added to the arrival rate; for NB, subtracted from theta
    double target_fpr = 0.05;
    double target_fnr = 0.2;
    PlanDesign design;
};

/// A single-window design cannot push beta below the mixing-noise plateau of
/// an over-dispersed process; thrown when the target sits at or below it.
struct InfeasiblePlanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlanProbe {
    double t_or_count = 0;
    double beta = 0;
};

struct PlanResult {
    double t_or_count = 0; // window length, or integral window count
    double achieved_alpha = 0;
    double achieved_beta = 0;
    std::vector<PlanProbe> trace;
};

PlanResult time_to_wait(const PlanRequest& request, const TruncationPolicy& policy = {},
                        long mc_trials = 20000, std::uint64_t seed = 1);

/// The scenario a plan request evaluates at a given probe value.
Scenario plan_scenario(const PlanRequest& request, double t_or_count);

}  // namespace ratelab
