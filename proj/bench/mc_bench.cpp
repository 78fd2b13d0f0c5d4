// Times the serial reference Monte-Carlo kernel against the OpenMP one on a
// fixed scenario and verifies the tallies agree bit for bit.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ratelab/tradeoff.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    long trials = 400000;
    if (argc > 1) trials = std::atol(argv[1]);

    ratelab::Scenario scenario;
    scenario.control = ratelab::NegBinomialProcess{2.0, 4.0};
    scenario.treatment = ratelab::NegBinomialProcess{2.0, 2.0};
    scenario.t0 = scenario.t1 = 10.0;
    scenario.windows0 = scenario.windows1 = 4;

    const std::vector<double> grid = ratelab::logit_grid(99);
    constexpr std::uint64_t seed = 42;

    auto start = std::chrono::steady_clock::now();
    const ratelab::TradeoffCurve serial =
        ratelab::curve_monte_carlo(scenario, grid, trials, seed, 1);
    const double t_serial = seconds_since(start);
    std::printf("serial   : %8.3f s  (%ld trials)\n", t_serial, trials);

    int max_workers = 2;
#ifdef _OPENMP
    max_workers = omp_get_max_threads();
#endif
    for (int workers = 2; workers <= max_workers; workers *= 2) {
        start = std::chrono::steady_clock::now();
        const ratelab::TradeoffCurve parallel =
            ratelab::curve_monte_carlo(scenario, grid, trials, seed, workers);
        const double t_parallel = seconds_since(start);
        bool identical = parallel.points.size() == serial.points.size();
        for (std::size_t i = 0; identical && i < serial.points.size(); ++i)
            identical = serial.points[i].alpha == parallel.points[i].alpha &&
                        serial.points[i].beta == parallel.points[i].beta;
        std::printf("workers %2d: %8.3f s  speedup %.2fx  tallies %s\n", workers, t_parallel,
                    t_serial / t_parallel, identical ? "identical" : "DIFFER");
        if (!identical) return 1;
    }
    return 0;
}
