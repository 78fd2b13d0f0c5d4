// ratelab command-line surface: exact rate test, trade-off curves, QQ data,
// planning, and simulation. Exit codes: 0 success, 2 validation error,
// 3 infeasible plan.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ratelab/io.hpp"
#include "ratelab/planner.hpp"
#include "ratelab/rate_test.hpp"
#include "ratelab/tradeoff.hpp"
#include "ratelab/wald.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;

struct OutFile {
    explicit OutFile(const std::string& path) {
        if (path != "-") {
            file.open(path, std::ios::binary);
            if (!file) throw std::invalid_argument("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file.is_open() ? file : std::cout; }
    std::ofstream file;
};

nlohmann::json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("invalid " + what + " JSON: " + e.what());
    }
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("invalid JSON in " + path + ": " + e.what());
    }
}

void emit_json(std::ostream& out, const ratelab::ordered_json& j) { out << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ratelab: failure-rate hypothesis testing and trade-off analysis"};
    app.require_subcommand(1);

    // --- test ---
    auto* cmd_test = app.add_subcommand("test", "exact one-sided rate comparison");
    long n0 = 0, n1 = 0;
    double t0 = 0, t1 = 0, alpha_hat = 0.05;
    cmd_test->add_option("--n0", n0, "control events")->required()->check(CLI::NonNegativeNumber);
    cmd_test->add_option("--t0", t0, "control exposure")->required()
        ->check(CLI::PositiveNumber);
    cmd_test->add_option("--n1", n1, "treatment events")->required()->check(CLI::NonNegativeNumber);
    cmd_test->add_option("--t1", t1, "treatment exposure")->required()
        ->check(CLI::PositiveNumber);
    cmd_test->add_option("--alpha-hat", alpha_hat, "type-1 error rate")
        ->check(CLI::Range(0.0, 1.0));

    // --- curve ---
    auto* cmd_curve = app.add_subcommand("curve", "false positive/negative trade-off curve");
    std::string scenario_path, method = "mc", curve_out = "-";
    long curve_trials = 100000;
    std::uint64_t curve_seed = 1;
    std::size_t grid_count = 199;
    int workers = 1;
    bool compare_wald = false;
    cmd_curve->add_option("--scenario", scenario_path, "scenario config JSON file")->required();
    cmd_curve->add_option("--method", method, "closed | mc")
        ->check(CLI::IsMember({"closed", "mc"}));
    cmd_curve->add_option("--trials", curve_trials, "monte carlo trials")
        ->check(CLI::Range(1000L, 1000000000L));
    cmd_curve->add_option("--seed", curve_seed, "master seed");
    cmd_curve->add_option("--grid", grid_count, "alpha_hat grid size")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
    cmd_curve->add_option("--workers", workers, "worker threads (output identical at any count)")
        ->check(CLI::Range(1, 256));
    cmd_curve->add_flag("--compare-wald", compare_wald,
                        "also run the NB-customized Wald test on the shared data");
    cmd_curve->add_option("--out", curve_out, "output CSV path ('-' = stdout)");

    // --- qq ---
    auto* cmd_qq = app.add_subcommand("qq", "quantile-quantile data for two count models");
    std::string model_x_text, model_y_text, qq_out = "-";
    double qq_t = 1;
    std::size_t qq_grid = 99;
    cmd_qq->add_option("--model-x", model_x_text, "process model JSON")->required();
    cmd_qq->add_option("--model-y", model_y_text, "process model JSON")->required();
    cmd_qq->add_option("--t", qq_t, "window length")->required()->check(CLI::PositiveNumber);
    cmd_qq->add_option("--grid-size", qq_grid, "number of quantiles")
        ->required()
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
    cmd_qq->add_option("--out", qq_out, "output CSV path ('-' = stdout)");

    // --- plan ---
    auto* cmd_plan = app.add_subcommand("plan", "time-to-wait recommendation or slice ranking");
    std::string request_path, rank_path, plan_out = "-";
    long ref_events = 0;
    double ref_exposure = 0;
    std::uint64_t plan_seed = 1;
    long plan_trials = 20000;
    auto* opt_request = cmd_plan->add_option("--request", request_path, "PlanRequest JSON file");
    auto* opt_rank = cmd_plan->add_option("--rank", rank_path, "ranking CSV (id,events,exposure)");
    cmd_plan->add_option("--reference-events", ref_events, "reference group events")
        ->check(CLI::NonNegativeNumber);
    cmd_plan->add_option("--reference-exposure", ref_exposure, "reference group exposure")
        ->check(CLI::PositiveNumber);
    cmd_plan->add_option("--trials", plan_trials, "monte carlo trials for simulated searches");
    cmd_plan->add_option("--seed", plan_seed, "master seed");
    cmd_plan->add_option("--out", plan_out, "output JSON path ('-' = stdout)");
    opt_request->excludes(opt_rank);

    // --- simulate ---
    auto* cmd_simulate = app.add_subcommand("simulate", "sampled count histogram with exact PMF");
    std::string sim_model_text, sim_out = "-";
    double sim_t = 1;
    long sim_trials = 100000;
    std::uint64_t sim_seed = 1;
    cmd_simulate->add_option("--model", sim_model_text, "process model JSON")->required();
    cmd_simulate->add_option("--t", sim_t, "window length")->required()->check(CLI::PositiveNumber);
    cmd_simulate->add_option("--trials", sim_trials, "samples")->check(CLI::Range(1L, 100000000L));
    cmd_simulate->add_option("--seed", sim_seed, "master seed");
    cmd_simulate->add_option("--out", sim_out, "output CSV path ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (cmd_test->parsed()) {
            if (!(alpha_hat > 0.0 && alpha_hat < 1.0))
                throw std::domain_error("--alpha-hat must lie strictly inside (0,1)");
            const ratelab::TestOutcome outcome =
                ratelab::decide({{n0, t0}, {n1, t1}}, alpha_hat);
            emit_json(std::cout, ratelab::to_json(outcome));
        } else if (cmd_curve->parsed()) {
            const ratelab::Scenario scenario =
                ratelab::scenario_from_json(load_json_file(scenario_path));
            const std::vector<double> grid = ratelab::logit_grid(grid_count);
            OutFile out(curve_out);
            if (compare_wald) {
                const ratelab::TestComparison comparison =
                    ratelab::compare_tests(scenario, grid, curve_trials, curve_seed, workers);
                ratelab::write_comparison_csv(out.stream(), comparison);
            } else if (method == "closed") {
                ratelab::write_curve_csv(out.stream(), ratelab::curve_closed_form(scenario, grid));
            } else {
                ratelab::write_curve_csv(
                    out.stream(),
                    ratelab::curve_monte_carlo(scenario, grid, curve_trials, curve_seed, workers));
            }
        } else if (cmd_qq->parsed()) {
            const ratelab::ProcessModel model_x =
                ratelab::process_model_from_json(parse_json_text(model_x_text, "model-x"));
            const ratelab::ProcessModel model_y =
                ratelab::process_model_from_json(parse_json_text(model_y_text, "model-y"));
            std::vector<double> q_grid(qq_grid);
            for (std::size_t i = 0; i < qq_grid; ++i)
                q_grid[i] = static_cast<double>(i + 1) / static_cast<double>(qq_grid + 1);
            const auto points = ratelab::qq_data(ratelab::count_dist(model_x, qq_t),
                                                 ratelab::count_dist(model_y, qq_t), q_grid);
            OutFile out(qq_out);
            ratelab::write_qq_csv(out.stream(), points);
        } else if (cmd_plan->parsed()) {
            if (!rank_path.empty()) {
                if (!(ref_exposure > 0.0))
                    throw std::domain_error("--reference-exposure must be > 0 for ranking");
                std::ifstream in(rank_path);
                if (!in) throw std::invalid_argument("cannot open file: " + rank_path);
                const auto ranking =
                    ratelab::rank_slices(ratelab::slices_from_csv(in), {ref_events, ref_exposure});
                OutFile out(plan_out);
                emit_json(out.stream(), ratelab::to_json(ranking));
            } else if (!request_path.empty()) {
                const ratelab::PlanRequest request =
                    ratelab::plan_request_from_json(load_json_file(request_path));
                const ratelab::PlanResult result =
                    ratelab::time_to_wait(request, {}, plan_trials, plan_seed);
                OutFile out(plan_out);
                emit_json(out.stream(), ratelab::plan_report_json(request, result));
            } else {
                throw std::invalid_argument("plan needs --request or --rank");
            }
        } else if (cmd_simulate->parsed()) {
            const ratelab::ProcessModel model =
                ratelab::process_model_from_json(parse_json_text(sim_model_text, "model"));
            const auto rows = ratelab::sample_histogram(model, sim_t, sim_trials, sim_seed);
            OutFile out(sim_out);
            ratelab::write_histogram_csv(out.stream(), rows);
        }
    } catch (const ratelab::InfeasiblePlanError& e) {
        std::cerr << "infeasible plan: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
