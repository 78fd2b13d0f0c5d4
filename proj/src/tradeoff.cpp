#include "ratelab/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ratelab/rate_test.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ratelab {

namespace {

void check_alpha_hat(double alpha_hat) {
    if (!(alpha_hat > 0.0 && alpha_hat < 1.0))
        throw std::domain_error("alpha_hat must lie in (0,1)");
}

// Window-count PMF for a group aggregated over `windows` windows, truncated
// at the policy tail. Returned as a dense array over 0..K.
std::vector<double> group_pmf_array(const ProcessModel& model, double t, long windows,
                                    const TruncationPolicy& policy) {
    if (windows < 1) throw std::domain_error("window count must be >= 1");
    const ProcessModel aggregate = std::visit(
        [&](const auto& m) -> ProcessModel {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, NegBinomialProcess>)
                return NegBinomialProcess{m.shape * static_cast<double>(windows), m.theta};
            else
                return m;
        },
        model);
    const double t_agg =
        std::holds_alternative<NegBinomialProcess>(model) ? t : t * static_cast<double>(windows);
    DiscreteDist dist = count_dist(aggregate, t_agg, policy);
    std::vector<double> pmf(static_cast<std::size_t>(dist.max_support()) + 1);
    for (long k = 0; k <= dist.max_support(); ++k) pmf[static_cast<std::size_t>(k)] = dist.pmf(k);
    const std::size_t cap = policy.max_terms;
    if (pmf.size() > cap) pmf.resize(cap);
    return pmf;
}

// tail[i] = P(N >= i), i = 0..K+1
std::vector<double> tail_from_pmf(const std::vector<double>& pmf) {
    std::vector<double> tail(pmf.size() + 1, 0.0);
    for (std::size_t i = pmf.size(); i-- > 0;) tail[i] = tail[i + 1] + pmf[i];
    return tail;
}

// x_t(n) = min{k : P(B(n,p_c) > k) <= alpha_hat} for n = 0..n_max.
// Nondecreasing in n, so each step resumes from the previous threshold.
std::vector<long> design_thresholds(long n_max, double p_c, double alpha_hat) {
    std::vector<long> thr(static_cast<std::size_t>(n_max) + 1);
    long x = 0;
    for (long n = 0; n <= n_max; ++n) {
        while (binom_survival({n, p_c}, x) > alpha_hat) ++x;
        thr[static_cast<std::size_t>(n)] = x;
    }
    return thr;
}

// beta = sum_j P(N1=j) P(N0 >= n_min(j) - j), n_min(j) = min{n : thr[n] >= j}.
// Equivalent to the double sum over (n, j <= thr[n]) with the inner index as
// the treatment count, but linear in the truncated support.
double beta_from_threshold(const std::vector<double>& pmf1, const std::vector<double>& tail0,
                           const std::vector<long>& thr) {
    const long n_max = static_cast<long>(thr.size()) - 1;
    const long k0 = static_cast<long>(tail0.size()) - 2;
    double beta = 0.0;
    long q = 0;
    for (long j = 0; j < static_cast<long>(pmf1.size()); ++j) {
        while (q <= n_max && thr[static_cast<std::size_t>(q)] < j) ++q;
        if (q > n_max) break;
        const long i_min = q - j;
        if (i_min <= 0)
            beta += pmf1[static_cast<std::size_t>(j)];
        else if (i_min <= k0)
            beta += pmf1[static_cast<std::size_t>(j)] * tail0[static_cast<std::size_t>(i_min)];
    }
    return beta;
}

struct ScenarioArrays {
    std::vector<double> pmf1;
    std::vector<double> tail0;
    long n_max = 0;
    double p_c = 0;
};

ScenarioArrays build_arrays(const Scenario& scenario, const TruncationPolicy& policy) {
    validate(scenario);
    ScenarioArrays arrays;
    const std::vector<double> pmf0 =
        group_pmf_array(scenario.control, scenario.t0, scenario.windows0, policy);
    arrays.pmf1 = group_pmf_array(scenario.treatment, scenario.t1, scenario.windows1, policy);
    arrays.tail0 = tail_from_pmf(pmf0);
    arrays.n_max = static_cast<long>(pmf0.size()) - 1 + static_cast<long>(arrays.pmf1.size()) - 1;
    const double te0 = total_exposure0(scenario);
    const double te1 = total_exposure1(scenario);
    arrays.p_c = te1 / (te0 + te1);
    return arrays;
}

long batch_of(const ProcessModel& model) {
    if (const auto* dc = std::get_if<DetCompoundProcess>(&model)) return dc->batch;
    return 1;
}

}  // namespace

void validate(const Scenario& scenario) {
    validate(scenario.control);
    validate(scenario.treatment);
    if (!(scenario.t0 > 0.0 && scenario.t1 > 0.0))
        throw std::domain_error("scenario exposures must be > 0");
    if (scenario.windows0 < 1 || scenario.windows1 < 1)
        throw std::domain_error("scenario window counts must be >= 1");
    if (scenario.control.index() != scenario.treatment.index())
        throw std::invalid_argument("control and treatment must come from the same family");
    if (const auto* c = std::get_if<DetCompoundProcess>(&scenario.control)) {
        if (c->batch != std::get<DetCompoundProcess>(scenario.treatment).batch)
            throw std::invalid_argument("batch sizes must match across groups");
    } else if (const auto* b = std::get_if<BinomCompoundProcess>(&scenario.control)) {
        const auto& tr = std::get<BinomCompoundProcess>(scenario.treatment);
        if (b->tosses != tr.tosses || b->head_prob != tr.head_prob)
            throw std::invalid_argument("compounding parameters must match across groups");
    } else if (const auto* nb = std::get_if<NegBinomialProcess>(&scenario.control)) {
        if (nb->shape != std::get<NegBinomialProcess>(scenario.treatment).shape)
            throw std::invalid_argument("negative binomial shapes must match across groups");
    }
}

Scenario null_scenario(const Scenario& scenario) {
    Scenario null = scenario;
    null.treatment = scenario.control;
    return null;
}

double total_exposure0(const Scenario& scenario) {
    return scenario.t0 * static_cast<double>(scenario.windows0);
}

double total_exposure1(const Scenario& scenario) {
    return scenario.t1 * static_cast<double>(scenario.windows1);
}

long draw_group_count(const ProcessModel& model, double t, long windows, RngStream& rng) {
    if (windows < 1) throw std::domain_error("window count must be >= 1");
    return std::visit(
        [&](const auto& m) -> long {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, NegBinomialProcess>) {
                const NegBinomialProcess agg{m.shape * static_cast<double>(windows), m.theta};
                return count_in_window(ProcessModel{agg}, t, rng);
            } else {
                return count_in_window(model, t * static_cast<double>(windows), rng);
            }
        },
        model);
}

double beta_at_alpha_hat(const Scenario& scenario, double alpha_hat,
                         const TruncationPolicy& policy) {
    check_alpha_hat(alpha_hat);
    const ScenarioArrays arrays = build_arrays(scenario, policy);
    const std::vector<long> thr = design_thresholds(arrays.n_max, arrays.p_c, alpha_hat);
    return beta_from_threshold(arrays.pmf1, arrays.tail0, thr);
}

double beta_at_alpha(const Scenario& scenario, double alpha, const TruncationPolicy& policy) {
    check_alpha_hat(alpha);
    if (!std::holds_alternative<PoissonProcess>(scenario.control) &&
        !std::holds_alternative<DetCompoundProcess>(scenario.control))
        throw std::invalid_argument(
            "beta_at_alpha needs the true conditional null in closed form; only the Poisson and "
            "batch-compounded families have it");
    const ScenarioArrays arrays = build_arrays(scenario, policy);
    const long batch = batch_of(scenario.control);
    // True conditional null of the statistic: batch-scaled binomial on the
    // arrival total. thr(n) = batch * x_t(n/batch); totals that are not
    // multiples carry zero probability.
    const long arrival_max = arrays.n_max / batch;
    const std::vector<long> arrival_thr = design_thresholds(arrival_max, arrays.p_c, alpha);
    std::vector<long> thr(static_cast<std::size_t>(arrays.n_max) + 1);
    for (long n = 0; n <= arrays.n_max; ++n)
        thr[static_cast<std::size_t>(n)] = batch * arrival_thr[static_cast<std::size_t>(n / batch)];
    return beta_from_threshold(arrays.pmf1, arrays.tail0, thr);
}

double alpha_at_alpha_hat(const Scenario& scenario, double alpha_hat,
                          const TruncationPolicy& policy) {
    return 1.0 - beta_at_alpha_hat(null_scenario(scenario), alpha_hat, policy);
}

double alpha_detcompound(double lambda, long batch, double t0, double t1, double alpha_hat,
                         const TruncationPolicy& policy) {
    check_alpha_hat(alpha_hat);
    if (batch < 1) throw std::domain_error("batch must be >= 1");
    if (!(lambda >= 0.0)) throw std::domain_error("rate must be >= 0");
    if (!(t0 > 0.0 && t1 > 0.0)) throw std::domain_error("exposures must be > 0");
    const double p_c = t1 / (t0 + t1);
    const PoissonParams arrivals{lambda * (t0 + t1)};
    long m_hi = arrivals.mean == 0.0 ? 0 : poisson_inverse_survival(arrivals, policy.tail_eps);
    m_hi = std::min<long>(m_hi, static_cast<long>(policy.max_terms));
    double keep = 0.0; // P(fail to reject)
    long x = 0;        // x_t(m*batch), nondecreasing in m
    for (long m = 0; m <= m_hi; ++m) {
        const long n_events = m * batch;
        while (binom_survival({n_events, p_c}, x) > alpha_hat) ++x;
        keep += poisson_pmf(arrivals, m) * (1.0 - binom_survival({m, p_c}, x / batch));
    }
    return 1.0 - keep;
}

double beta_negbinomial(double m, double theta, double dtheta, double t, long a, long b,
                        double alpha_hat, const TruncationPolicy& policy) {
    if (!(dtheta >= 0.0) || dtheta >= theta)
        throw std::domain_error("effect must satisfy 0 <= dtheta < theta");
    if (a < 1 || b < 1) throw std::domain_error("window counts must be >= 1");
    Scenario scenario;
    scenario.control = NegBinomialProcess{m, theta};
    scenario.treatment = NegBinomialProcess{m, theta - dtheta};
    scenario.t0 = t;
    scenario.t1 = t;
    scenario.windows0 = a;
    scenario.windows1 = b;
    return beta_at_alpha_hat(scenario, alpha_hat, policy);
}

std::vector<double> logit_grid(std::size_t count, double lo, double hi) {
    if (count < 2) throw std::invalid_argument("grid needs at least two points");
    if (!(lo > 0.0 && hi < 1.0 && lo < hi)) throw std::invalid_argument("grid bounds must satisfy 0 < lo < hi < 1");
    const auto logit = [](double p) { return std::log(p / (1.0 - p)); };
    const double a = logit(lo);
    const double step = (logit(hi) - a) / static_cast<double>(count - 1);
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double z = a + step * static_cast<double>(i);
        grid[i] = 1.0 / (1.0 + std::exp(-z));
    }
    return grid;
}

TradeoffCurve curve_closed_form(const Scenario& scenario, std::span<const double> alpha_hat_grid,
                                const TruncationPolicy& policy) {
    const ScenarioArrays alt = build_arrays(scenario, policy);
    const ScenarioArrays null = build_arrays(null_scenario(scenario), policy);
    TradeoffCurve curve;
    curve.method = "closed";
    curve.points.reserve(alpha_hat_grid.size());
    for (double alpha_hat : alpha_hat_grid) {
        check_alpha_hat(alpha_hat);
        const std::vector<long> thr_alt = design_thresholds(alt.n_max, alt.p_c, alpha_hat);
        const std::vector<long> thr_null = design_thresholds(null.n_max, null.p_c, alpha_hat);
        CurvePoint point;
        point.alpha_hat = alpha_hat;
        point.beta = beta_from_threshold(alt.pmf1, alt.tail0, thr_alt);
        point.alpha = 1.0 - beta_from_threshold(null.pmf1, null.tail0, thr_null);
        curve.points.push_back(point);
    }
    return curve;
}

namespace {

struct McTallies {
    std::vector<long> null_below; // per grid index: trials with p_null < grid[g]
    std::vector<long> alt_below;  // per grid index: trials with p_alt  < grid[g]
};

template <typename PValueFn>
McTallies mc_run(const Scenario& scenario, std::span<const double> grid, long trials,
                 std::uint64_t seed, const PValueFn& p_value, int workers) {
    validate(scenario);
    if (trials < 1000) throw std::invalid_argument("monte carlo needs trials >= 1000");
    if (grid.empty()) throw std::invalid_argument("alpha_hat grid must be nonempty");
    for (double g : grid) check_alpha_hat(g);
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw std::invalid_argument("alpha_hat grid must be ascending");

    const std::size_t slots = grid.size() + 1;
    std::vector<long> hist_null(slots, 0), hist_alt(slots, 0);

    // One trial: independent count pairs under the no-effect and effect
    // hypotheses, p-values binned against the grid. Trial i's stream does not
    // depend on which worker runs it.
    const auto run_trial = [&](long i, std::vector<long>& h_null, std::vector<long>& h_alt) {
        RngStream rng = RngStream::for_trial(seed, static_cast<std::uint64_t>(i));
        const long null0 = draw_group_count(scenario.control, scenario.t0, scenario.windows0, rng);
        const long null1 = draw_group_count(scenario.control, scenario.t1, scenario.windows1, rng);
        const long alt0 = draw_group_count(scenario.control, scenario.t0, scenario.windows0, rng);
        const long alt1 = draw_group_count(scenario.treatment, scenario.t1, scenario.windows1, rng);
        const auto slot = [&](double p) {
            return std::upper_bound(grid.begin(), grid.end(), p) - grid.begin();
        };
        ++h_null[static_cast<std::size_t>(slot(p_value(null0, null1)))];
        ++h_alt[static_cast<std::size_t>(slot(p_value(alt0, alt1)))];
    };

#ifdef _OPENMP
    if (workers > 1) {
        #pragma omp parallel num_threads(workers)
        {
            std::vector<long> local_null(slots, 0), local_alt(slots, 0);
            #pragma omp for schedule(static)
            for (long i = 0; i < trials; ++i) run_trial(i, local_null, local_alt);
            #pragma omp critical
            {
                for (std::size_t s = 0; s < slots; ++s) {
                    hist_null[s] += local_null[s];
                    hist_alt[s] += local_alt[s];
                }
            }
        }
    } else {
        for (long i = 0; i < trials; ++i) run_trial(i, hist_null, hist_alt);
    }
#else
    (void)workers;
    for (long i = 0; i < trials; ++i) run_trial(i, hist_null, hist_alt);
#endif

    McTallies tallies;
    tallies.null_below.assign(grid.size(), 0);
    tallies.alt_below.assign(grid.size(), 0);
    long acc_null = 0, acc_alt = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        acc_null += hist_null[g];
        acc_alt += hist_alt[g];
        tallies.null_below[g] = acc_null;
        tallies.alt_below[g] = acc_alt;
    }
    return tallies;
}

TradeoffCurve curve_from_tallies(const McTallies& tallies, std::span<const double> grid,
                                 long trials, std::uint64_t seed) {
    TradeoffCurve curve;
    curve.method = "mc";
    curve.trials = trials;
    curve.seed = seed;
    const double n = static_cast<double>(trials);
    curve.points.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        CurvePoint point;
        point.alpha_hat = grid[g];
        point.alpha = static_cast<double>(tallies.null_below[g]) / n;
        point.beta = 1.0 - static_cast<double>(tallies.alt_below[g]) / n;
        point.alpha_se = std::sqrt(point.alpha * (1.0 - point.alpha) / n);
        point.beta_se = std::sqrt(point.beta * (1.0 - point.beta) / n);
        curve.points.push_back(point);
    }
    return curve;
}

}  // namespace

TradeoffCurve curve_monte_carlo(const Scenario& scenario, std::span<const double> alpha_hat_grid,
                                long trials, std::uint64_t seed, int workers) {
    const double te0 = total_exposure0(scenario);
    const double te1 = total_exposure1(scenario);
    const auto p_value = [&](long n0, long n1) {
        return rate_test_p_value({{n0, te0}, {n1, te1}});
    };
    const McTallies tallies = mc_run(scenario, alpha_hat_grid, trials, seed, p_value, workers);
    return curve_from_tallies(tallies, alpha_hat_grid, trials, seed);
}

TradeoffCurve curve_monte_carlo_swapped(const Scenario& scenario,
                                        std::span<const double> alpha_hat_grid, long trials,
                                        std::uint64_t seed, const NullSwapFactory& factory,
                                        int workers) {
    if (!factory) throw std::invalid_argument("null swap factory must be callable");
    const double te0 = total_exposure0(scenario);
    const double te1 = total_exposure1(scenario);
    const auto p_value = [&](long n0, long n1) {
        const DiscreteDist swap = factory(n0 + n1);
        return null_swap_p_value({{n0, te0}, {n1, te1}}, swap);
    };
    const McTallies tallies = mc_run(scenario, alpha_hat_grid, trials, seed, p_value, workers);
    return curve_from_tallies(tallies, alpha_hat_grid, trials, seed);
}

InterpPoint interp_beta_at_alpha(const TradeoffCurve& curve, double alpha) {
    if (curve.points.empty()) throw std::invalid_argument("empty curve");
    // collapse exact alpha ties (steps of the discrete test) to their mean beta
    std::vector<CurvePoint> pts;
    for (const CurvePoint& p : curve.points) {
        if (!pts.empty() && pts.back().alpha == p.alpha) {
            CurvePoint& last = pts.back();
            last.beta = 0.5 * (last.beta + p.beta);
            last.beta_se = std::max(last.beta_se, p.beta_se);
        } else {
            pts.push_back(p);
        }
    }
    std::sort(pts.begin(), pts.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.alpha < b.alpha; });
    if (alpha < pts.front().alpha || alpha > pts.back().alpha)
        throw std::domain_error("alpha outside the curve's attained range");
    const auto hi = std::lower_bound(pts.begin(), pts.end(), alpha,
                                     [](const CurvePoint& p, double a) { return p.alpha < a; });
    if (hi->alpha == alpha || hi == pts.begin()) return {hi->beta, hi->beta_se};
    const auto lo = hi - 1;
    const double w = (alpha - lo->alpha) / (hi->alpha - lo->alpha);
    return {lo->beta + w * (hi->beta - lo->beta), std::max(lo->beta_se, hi->beta_se)};
}

std::vector<QqPoint> qq_data(const DiscreteDist& dist_x, const DiscreteDist& dist_y,
                             std::span<const double> q_grid) {
    std::vector<QqPoint> points;
    points.reserve(q_grid.size());
    for (double q : q_grid) {
        if (!(q > 0.0 && q < 1.0)) throw std::domain_error("qq grid values must lie in (0,1)");
        points.push_back({q, dist_x.quantile(q), dist_y.quantile(q)});
    }
    return points;
}

}  // namespace ratelab
