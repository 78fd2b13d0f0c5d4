#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ratelab/dist.hpp"
#include "ratelab/rng.hpp"

namespace ratelab {

// ---------------------------------------------------------------------------
// Process families. All are stationary; counts in a window of length t:
//   Poisson:        N(t) ~ Poisson(rate*t)
//   DetCompound:    every arrival carries exactly `batch` events
//   BinomCompound:  every arrival carries Binomial(tosses, head_prob) events
//   NegBinomial:    rate L ~ Gamma(shape, rate theta), then Poisson(L*t);
//                   counts are NB(shape, theta/(theta+t)).
//
// Gamma parameterization: the mixing density is theta*exp(-theta*x) *
// (theta*x)^(shape-1) / Gamma(shape), i.e. theta is a RATE with units of
// 1/time and the mean event rate is shape/theta. Ecosystems disagree on
// shape/scale conventions; everything in this library uses this one.
// ---------------------------------------------------------------------------

struct PoissonProcess {
    double rate = 0; // events per unit time, >= 0
};

struct DetCompoundProcess {
    double rate = 0;
    long batch = 1; // events per arrival, >= 1
};

struct BinomCompoundProcess {
    double rate = 0;
    long tosses = 1;      // >= 1
    double head_prob = 1; // in [0,1]
};

struct NegBinomialProcess {
    double shape = 1; // m > 0
    double theta = 1; // Gamma rate parameter, time units, > 0
};

using ProcessModel =
    std::variant<PoissonProcess, DetCompoundProcess, BinomCompoundProcess, NegBinomialProcess>;

void validate(const ProcessModel& model);
std::string family_name(const ProcessModel& model);

/// One draw of the window count N(t). Deterministic for a fixed stream state.
long count_in_window(const ProcessModel& model, double t, RngStream& rng);
long count_in_window(const ProcessModel& model, double t, std::uint64_t seed);

double count_pmf(const ProcessModel& model, double t, long k,
                 const TruncationPolicy& policy = {});
double count_mean(const ProcessModel& model, double t);

/// Window-count distribution truncated at the policy's tail mass.
DiscreteDist count_dist(const ProcessModel& model, double t, const TruncationPolicy& policy = {});

// ---------------------------------------------------------------------------
// Rate estimation
// ---------------------------------------------------------------------------

struct CountObservation {
    long events = 0;     // n >= 0
    double exposure = 0; // t > 0
};

/// Pooled MLE rate: sum(events) / sum(exposure).
double estimate_rate(std::span<const CountObservation> observations);

// ---------------------------------------------------------------------------
// Inter-arrival families and hazard rates
// ---------------------------------------------------------------------------

struct ExponentialInterarrival {
    double rate = 1; // > 0
};

struct LomaxInterarrival {
    double shape = 1; // m > 0
    double theta = 1; // > 0, time units
};

using InterarrivalFamily = std::variant<ExponentialInterarrival, LomaxInterarrival>;

/// h(t) = f(t)/S(t). Exponential is the constant rate; Lomax decreases as
/// shape/(theta+t).
double hazard_rate(const InterarrivalFamily& family, double t);

/// One inter-arrival draw; Lomax uses the inverse-CDF path.
double interarrival_sample(const InterarrivalFamily& family, RngStream& rng);

/// Lomax via its gamma-mixture-of-exponentials representation; equal in
/// distribution to the inverse-CDF path (checked in the tests).
double lomax_sample_mixture(const LomaxInterarrival& family, RngStream& rng);

// ---------------------------------------------------------------------------
// Censored-data MTTF (exponential MLE): total up-time, censored plus
// uncensored, divided by the number of completed failures.
// ---------------------------------------------------------------------------

struct CensoredSample {
    std::vector<double> uncensored; // completed failure durations, nonempty
    std::vector<double> censored;   // still-running durations
};

double mttf_censored(const CensoredSample& sample);

// ---------------------------------------------------------------------------
// Monte-Carlo study of the rate estimator's sampling moments
// ---------------------------------------------------------------------------

struct SingleWindow {
    double t = 1;
};

struct ManyWindows {
    long count = 1;
    double t = 1;
};

using ObservationDesign = std::variant<SingleWindow, ManyWindows>;

struct MomentSummary {
    double mean = 0;
    double variance = 0; // sample variance over trials
};

MomentSummary estimator_variance_study(const ProcessModel& model, const ObservationDesign& design,
                                       long trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sampled histogram export (CSV columns: k, count, pmf)
// ---------------------------------------------------------------------------

struct HistogramRow {
    long k = 0;
    long count = 0;
    double pmf = 0;
};

std::vector<HistogramRow> sample_histogram(const ProcessModel& model, double t, long trials,
                                           std::uint64_t seed, const TruncationPolicy& policy = {});

}  // namespace ratelab
