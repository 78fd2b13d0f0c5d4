#include "ratelab/wald.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ratelab/rate_test.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ratelab {

WaldStats wald_statistic(const WaldInput& input) {
    if (input.control_counts.empty() || input.treatment_counts.empty())
        throw std::invalid_argument("both groups need at least one subject");
    if (!(input.exposure > 0.0)) throw std::domain_error("exposure must be > 0");
    if (!(input.dispersion_k > 0.0)) throw std::domain_error("dispersion k must be > 0");
    for (long c : input.control_counts)
        if (c < 0) throw std::domain_error("counts must be >= 0");
    for (long c : input.treatment_counts)
        if (c < 0) throw std::domain_error("counts must be >= 0");

    const double n0 = static_cast<double>(input.control_counts.size());
    const double n1 = static_cast<double>(input.treatment_counts.size());
    const long sum0 = std::accumulate(input.control_counts.begin(), input.control_counts.end(), 0L);
    const long sum1 =
        std::accumulate(input.treatment_counts.begin(), input.treatment_counts.end(), 0L);
    if (sum0 == 0 || sum1 == 0)
        throw DegenerateVarianceError("degenerate variance: a group has zero events");

    const double rate0 = static_cast<double>(sum0) / n0 / input.exposure;
    const double rate1 = static_cast<double>(sum1) / n1 / input.exposure;
    const double eta = n1 / n0;
    const double mu_t = static_cast<double>(sum0 + sum1) / (n0 + n1); // pooled events per period

    WaldStats stats;
    stats.log_rate_diff = std::log(rate1) - std::log(rate0);
    stats.variance = (1.0 + eta * eta) / (mu_t * (rate0 + eta * rate1)) +
                     (1.0 + eta) * input.dispersion_k / eta;
    stats.sigma = std::sqrt(stats.variance / n0);
    return stats;
}

double wald_p_value(const WaldInput& input) {
    const WaldStats stats = wald_statistic(input);
    return normal_survival(stats.log_rate_diff, stats.sigma);
}

namespace {

struct ComparisonTallies {
    std::vector<long> rate_null_below, rate_alt_below;
    std::vector<long> wald_null_below, wald_alt_below;
    long wald_null_valid = 0, wald_alt_valid = 0;
    long degenerate = 0;
};

}  // namespace

TestComparison compare_tests(const Scenario& scenario, std::span<const double> alpha_hat_grid,
                             long trials, std::uint64_t seed, int workers) {
    validate(scenario);
    const auto* control = std::get_if<NegBinomialProcess>(&scenario.control);
    const auto* treatment = std::get_if<NegBinomialProcess>(&scenario.treatment);
    if (control == nullptr || treatment == nullptr)
        throw std::invalid_argument("compare_tests needs a negative-binomial scenario");
    if (scenario.t0 != scenario.t1)
        throw std::invalid_argument("compare_tests assumes a common per-subject exposure");
    if (trials < 1000) throw std::invalid_argument("monte carlo needs trials >= 1000");
    if (alpha_hat_grid.empty() ||
        !std::is_sorted(alpha_hat_grid.begin(), alpha_hat_grid.end()))
        throw std::invalid_argument("alpha_hat grid must be nonempty and ascending");

    const double t = scenario.t0;
    const long subjects0 = scenario.windows0;
    const long subjects1 = scenario.windows1;
    const double dispersion_k = 1.0 / control->shape;
    const double te0 = total_exposure0(scenario);
    const double te1 = total_exposure1(scenario);
    const std::size_t slots = alpha_hat_grid.size() + 1;

    struct Hists {
        std::vector<long> rate_null, rate_alt, wald_null, wald_alt;
        long wald_null_valid = 0, wald_alt_valid = 0, degenerate = 0;
        explicit Hists(std::size_t slots)
            : rate_null(slots, 0), rate_alt(slots, 0), wald_null(slots, 0), wald_alt(slots, 0) {}
    };

    const auto slot = [&](double p) {
        return static_cast<std::size_t>(
            std::upper_bound(alpha_hat_grid.begin(), alpha_hat_grid.end(), p) -
            alpha_hat_grid.begin());
    };

    const auto draw_subjects = [&](const NegBinomialProcess& m, long subjects, RngStream& rng) {
        std::vector<long> counts(static_cast<std::size_t>(subjects));
        for (auto& c : counts) {
            const double lambda = rng.gamma(m.shape, m.theta);
            c = rng.poisson(lambda * t);
        }
        return counts;
    };

    // One trial draws one dataset per hypothesis and feeds the identical
    // counts to both tests.
    const auto run_trial = [&](long i, Hists& h) {
        RngStream rng = RngStream::for_trial(seed, static_cast<std::uint64_t>(i));
        for (int alt = 0; alt < 2; ++alt) {
            const NegBinomialProcess treated = alt ? *treatment : *control;
            const std::vector<long> counts0 = draw_subjects(*control, subjects0, rng);
            const std::vector<long> counts1 = draw_subjects(treated, subjects1, rng);
            const long sum0 = std::accumulate(counts0.begin(), counts0.end(), 0L);
            const long sum1 = std::accumulate(counts1.begin(), counts1.end(), 0L);
            const double p_rate = rate_test_p_value({{sum0, te0}, {sum1, te1}});
            auto& rate_hist = alt ? h.rate_alt : h.rate_null;
            ++rate_hist[slot(p_rate)];
            try {
                const double p_wald = wald_p_value({counts0, counts1, t, dispersion_k});
                auto& wald_hist = alt ? h.wald_alt : h.wald_null;
                ++wald_hist[slot(p_wald)];
                ++(alt ? h.wald_alt_valid : h.wald_null_valid);
            } catch (const DegenerateVarianceError&) {
                ++h.degenerate;
            }
        }
    };

    Hists total(slots);
#ifdef _OPENMP
    if (workers > 1) {
        #pragma omp parallel num_threads(workers)
        {
            Hists local(slots);
            #pragma omp for schedule(static)
            for (long i = 0; i < trials; ++i) run_trial(i, local);
            #pragma omp critical
            {
                for (std::size_t s = 0; s < slots; ++s) {
                    total.rate_null[s] += local.rate_null[s];
                    total.rate_alt[s] += local.rate_alt[s];
                    total.wald_null[s] += local.wald_null[s];
                    total.wald_alt[s] += local.wald_alt[s];
                }
                total.wald_null_valid += local.wald_null_valid;
                total.wald_alt_valid += local.wald_alt_valid;
                total.degenerate += local.degenerate;
            }
        }
    } else {
        for (long i = 0; i < trials; ++i) run_trial(i, total);
    }
#else
    (void)workers;
    for (long i = 0; i < trials; ++i) run_trial(i, total);
#endif

    const auto curve_from = [&](const std::vector<long>& null_hist,
                                const std::vector<long>& alt_hist, long null_n,
                                long alt_n) {
        TradeoffCurve curve;
        curve.method = "mc";
        curve.trials = trials;
        curve.seed = seed;
        long acc_null = 0, acc_alt = 0;
        for (std::size_t g = 0; g < alpha_hat_grid.size(); ++g) {
            acc_null += null_hist[g];
            acc_alt += alt_hist[g];
            CurvePoint point;
            point.alpha_hat = alpha_hat_grid[g];
            point.alpha = static_cast<double>(acc_null) / static_cast<double>(null_n);
            point.beta = 1.0 - static_cast<double>(acc_alt) / static_cast<double>(alt_n);
            point.alpha_se =
                std::sqrt(point.alpha * (1.0 - point.alpha) / static_cast<double>(null_n));
            point.beta_se =
                std::sqrt(point.beta * (1.0 - point.beta) / static_cast<double>(alt_n));
            curve.points.push_back(point);
        }
        return curve;
    };

    if (total.wald_null_valid == 0 || total.wald_alt_valid == 0)
        throw std::runtime_error("all trials degenerated; scenario has too few events");

    TestComparison comparison;
    comparison.rate_curve = curve_from(total.rate_null, total.rate_alt, trials, trials);
    comparison.wald_curve =
        curve_from(total.wald_null, total.wald_alt, total.wald_null_valid, total.wald_alt_valid);
    comparison.degenerate_fraction =
        static_cast<double>(total.degenerate) / (2.0 * static_cast<double>(trials));
    return comparison;
}

}  // namespace ratelab
