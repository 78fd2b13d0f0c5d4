#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratelab/planner.hpp"
#include "ratelab/point_process.hpp"
#include "ratelab/rate_test.hpp"
#include "ratelab/tradeoff.hpp"
#include "ratelab/wald.hpp"

namespace ratelab {

using ordered_json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; identical doubles print identically, so
/// fixed-seed runs emit byte-identical files at any worker count.
std::string format_double(double value);

ordered_json to_json(const TestOutcome& outcome);
ordered_json to_json(const ProcessModel& model);
ordered_json to_json(const std::vector<RankedSlice>& ranking);
ordered_json plan_report_json(const PlanRequest& request, const PlanResult& result);

ProcessModel process_model_from_json(const nlohmann::json& j);
Scenario scenario_from_json(const nlohmann::json& j);
PlanRequest plan_request_from_json(const nlohmann::json& j);

/// Ranking input rows: header "id,events,exposure".
std::vector<Slice> slices_from_csv(std::istream& in);

// CSV writers; '\n' line ends, header row mandatory.
void write_curve_csv(std::ostream& out, const TradeoffCurve& curve);
void write_comparison_csv(std::ostream& out, const TestComparison& comparison);
void write_qq_csv(std::ostream& out, const std::vector<QqPoint>& points);
void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows);

}  // namespace ratelab
