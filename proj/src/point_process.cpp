#include "ratelab/point_process.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ratelab {

namespace {

void check_window(double t) {
    if (!(t > 0.0)) throw std::domain_error("window length t must be > 0");
}

}  // namespace

void validate(const ProcessModel& model) {
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PoissonProcess>) {
                if (!(m.rate >= 0.0)) throw std::domain_error("poisson rate must be >= 0");
            } else if constexpr (std::is_same_v<T, DetCompoundProcess>) {
                if (!(m.rate >= 0.0)) throw std::domain_error("arrival rate must be >= 0");
                if (m.batch < 1) throw std::domain_error("batch must be >= 1");
            } else if constexpr (std::is_same_v<T, BinomCompoundProcess>) {
                if (!(m.rate >= 0.0)) throw std::domain_error("arrival rate must be >= 0");
                if (m.tosses < 1) throw std::domain_error("tosses must be >= 1");
                if (!(m.head_prob >= 0.0 && m.head_prob <= 1.0))
                    throw std::domain_error("head_prob must lie in [0,1]");
            } else {
                if (!(m.shape > 0.0)) throw std::domain_error("shape must be > 0");
                if (!(m.theta > 0.0)) throw std::domain_error("theta must be > 0");
            }
        },
        model);
}

std::string family_name(const ProcessModel& model) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PoissonProcess>) return "poisson";
            else if constexpr (std::is_same_v<T, DetCompoundProcess>) return "det_compound";
            else if constexpr (std::is_same_v<T, BinomCompoundProcess>) return "binom_compound";
            else return "neg_binomial";
        },
        model);
}

long count_in_window(const ProcessModel& model, double t, RngStream& rng) {
    check_window(t);
    validate(model);
    return std::visit(
        [&](const auto& m) -> long {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PoissonProcess>) {
                return rng.poisson(m.rate * t);
            } else if constexpr (std::is_same_v<T, DetCompoundProcess>) {
                return m.batch * rng.poisson(m.rate * t);
            } else if constexpr (std::is_same_v<T, BinomCompoundProcess>) {
                const long arrivals = rng.poisson(m.rate * t);
                return rng.binomial(m.tosses * arrivals, m.head_prob);
            } else {
                const double lambda = rng.gamma(m.shape, m.theta);
                return rng.poisson(lambda * t);
            }
        },
        model);
}

long count_in_window(const ProcessModel& model, double t, std::uint64_t seed) {
    RngStream rng(seed);
    return count_in_window(model, t, rng);
}

double count_pmf(const ProcessModel& model, double t, long k, const TruncationPolicy& policy) {
    check_window(t);
    validate(model);
    if (k < 0) return 0.0;
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PoissonProcess>) {
                return poisson_pmf({m.rate * t}, k);
            } else if constexpr (std::is_same_v<T, DetCompoundProcess>) {
                if (k % m.batch != 0) return 0.0;
                return poisson_pmf({m.rate * t}, k / m.batch);
            } else if constexpr (std::is_same_v<T, BinomCompoundProcess>) {
                // P(M=k) = sum_j P(arrivals=j) * Binom(tosses*j, p)(k),
                // truncated at the Poisson tail.
                const PoissonParams arrivals{m.rate * t};
                long j_hi = poisson_inverse_survival(arrivals, policy.tail_eps);
                j_hi = std::min<long>(j_hi, static_cast<long>(policy.max_terms));
                double acc = 0.0;
                for (long j = 0; j <= j_hi; ++j) {
                    const long trials = m.tosses * j;
                    if (k > trials) continue;
                    acc += poisson_pmf(arrivals, j) * binom_pmf({trials, m.head_prob}, k);
                }
                return acc;
            } else {
                return negbinom_pmf({m.shape, m.theta / (m.theta + t)}, k);
            }
        },
        model);
}

double count_mean(const ProcessModel& model, double t) {
    check_window(t);
    validate(model);
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PoissonProcess>) return m.rate * t;
            else if constexpr (std::is_same_v<T, DetCompoundProcess>) return m.rate * t * m.batch;
            else if constexpr (std::is_same_v<T, BinomCompoundProcess>)
                return m.rate * t * m.tosses * m.head_prob;
            else return t * m.shape / m.theta;
        },
        model);
}

DiscreteDist count_dist(const ProcessModel& model, double t, const TruncationPolicy& policy) {
    check_window(t);
    validate(model);
    return std::visit(
        [&](const auto& m) -> DiscreteDist {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PoissonProcess>) {
                return DiscreteDist::poisson(m.rate * t, policy);
            } else if constexpr (std::is_same_v<T, DetCompoundProcess>) {
                return DiscreteDist::scaled(DiscreteDist::poisson(m.rate * t, policy), m.batch);
            } else if constexpr (std::is_same_v<T, BinomCompoundProcess>) {
                if (m.rate * t == 0.0) return DiscreteDist::point_mass(0);
                const long j_hi = poisson_inverse_survival({m.rate * t}, policy.tail_eps);
                const long upper = m.tosses * j_hi;
                std::vector<double> pmf(static_cast<std::size_t>(upper) + 1);
                for (long k = 0; k <= upper; ++k)
                    pmf[static_cast<std::size_t>(k)] = count_pmf(model, t, k, policy);
                return DiscreteDist::from_pmf(std::move(pmf));
            } else {
                return DiscreteDist::negbinomial(m.shape, m.theta / (m.theta + t), policy);
            }
        },
        model);
}

double estimate_rate(std::span<const CountObservation> observations) {
    if (observations.empty()) throw std::domain_error("estimate_rate requires observations");
    long events = 0;
    double exposure = 0.0;
    for (const auto& obs : observations) {
        if (obs.events < 0) throw std::domain_error("event counts must be >= 0");
        if (!(obs.exposure > 0.0)) throw std::domain_error("exposures must be > 0");
        events += obs.events;
        exposure += obs.exposure;
    }
    return static_cast<double>(events) / exposure;
}

double hazard_rate(const InterarrivalFamily& family, double t) {
    if (!(t >= 0.0)) throw std::domain_error("hazard_rate requires t >= 0");
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ExponentialInterarrival>) {
                if (!(f.rate > 0.0)) throw std::domain_error("rate must be > 0");
                return f.rate;
            } else {
                if (!(f.shape > 0.0 && f.theta > 0.0))
                    throw std::domain_error("lomax parameters must be > 0");
                // f(t) = (m/theta)(1+t/theta)^-(m+1), S(t) = (1+t/theta)^-m
                return f.shape / (f.theta + t);
            }
        },
        family);
}

double interarrival_sample(const InterarrivalFamily& family, RngStream& rng) {
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, ExponentialInterarrival>) {
                if (!(f.rate > 0.0)) throw std::domain_error("rate must be > 0");
                return rng.exponential(f.rate);
            } else {
                if (!(f.shape > 0.0 && f.theta > 0.0))
                    throw std::domain_error("lomax parameters must be > 0");
                // S(t) = (1+t/theta)^-m  =>  t = theta*(u^(-1/m) - 1)
                const double u = rng.uniform_open();
                return f.theta * (std::pow(u, -1.0 / f.shape) - 1.0);
            }
        },
        family);
}

double lomax_sample_mixture(const LomaxInterarrival& family, RngStream& rng) {
    if (!(family.shape > 0.0 && family.theta > 0.0))
        throw std::domain_error("lomax parameters must be > 0");
    const double lambda = rng.gamma(family.shape, family.theta);
    return rng.exponential(lambda);
}

double mttf_censored(const CensoredSample& sample) {
    if (sample.uncensored.empty())
        throw std::domain_error("MTTF requires at least one uncensored observation");
    for (double v : sample.uncensored)
        if (!(v > 0.0)) throw std::domain_error("uncensored durations must be > 0");
    for (double v : sample.censored)
        if (!(v >= 0.0)) throw std::domain_error("censored durations must be >= 0");
    const double total = std::accumulate(sample.uncensored.begin(), sample.uncensored.end(), 0.0) +
                         std::accumulate(sample.censored.begin(), sample.censored.end(), 0.0);
    return total / static_cast<double>(sample.uncensored.size());
}

MomentSummary estimator_variance_study(const ProcessModel& model, const ObservationDesign& design,
                                       long trials, std::uint64_t seed) {
    if (trials < 2) throw std::invalid_argument("variance study requires trials >= 2");
    std::vector<double> estimates(static_cast<std::size_t>(trials));
    for (long i = 0; i < trials; ++i) {
        RngStream rng = RngStream::for_trial(seed, static_cast<std::uint64_t>(i));
        double rate_hat = 0.0;
        std::visit(
            [&](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, SingleWindow>) {
                    rate_hat = static_cast<double>(count_in_window(model, d.t, rng)) / d.t;
                } else {
                    if (d.count < 1) throw std::domain_error("window count must be >= 1");
                    long events = 0;
                    for (long w = 0; w < d.count; ++w) events += count_in_window(model, d.t, rng);
                    rate_hat = static_cast<double>(events) / (static_cast<double>(d.count) * d.t);
                }
            },
            design);
        estimates[static_cast<std::size_t>(i)] = rate_hat;
    }
    const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) /
                        static_cast<double>(trials);
    double ss = 0.0;
    for (double e : estimates) ss += (e - mean) * (e - mean);
    return {mean, ss / static_cast<double>(trials - 1)};
}

std::vector<HistogramRow> sample_histogram(const ProcessModel& model, double t, long trials,
                                           std::uint64_t seed, const TruncationPolicy& policy) {
    if (trials < 1) throw std::invalid_argument("histogram requires trials >= 1");
    std::vector<long> counts;
    for (long i = 0; i < trials; ++i) {
        RngStream rng = RngStream::for_trial(seed, static_cast<std::uint64_t>(i));
        const long k = count_in_window(model, t, rng);
        if (k >= static_cast<long>(counts.size())) counts.resize(static_cast<std::size_t>(k) + 1, 0);
        ++counts[static_cast<std::size_t>(k)];
    }
    std::vector<HistogramRow> rows;
    rows.reserve(counts.size());
    for (long k = 0; k < static_cast<long>(counts.size()); ++k)
        rows.push_back({k, counts[static_cast<std::size_t>(k)], count_pmf(model, t, k, policy)});
    return rows;
}

}  // namespace ratelab
