#include "ratelab/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ratelab {

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw std::runtime_error("double formatting failed");
    return std::string(buf, ptr);
}

ordered_json to_json(const TestOutcome& outcome) {
    return ordered_json{{"p_value", outcome.p_value},
                        {"threshold_alpha", outcome.threshold_alpha},
                        {"reject", outcome.reject},
                        {"conditional_n", outcome.conditional_n},
                        {"null_head_prob", outcome.null_head_prob}};
}

ordered_json to_json(const ProcessModel& model) {
    return std::visit(
        [](const auto& m) -> ordered_json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PoissonProcess>) {
                return {{"family", "poisson"}, {"rate", m.rate}};
            } else if constexpr (std::is_same_v<T, DetCompoundProcess>) {
                return {{"family", "det_compound"}, {"rate", m.rate}, {"batch", m.batch}};
            } else if constexpr (std::is_same_v<T, BinomCompoundProcess>) {
                return {{"family", "binom_compound"},
                        {"rate", m.rate},
                        {"tosses", m.tosses},
                        {"head_prob", m.head_prob}};
            } else {
                return {{"family", "neg_binomial"}, {"shape", m.shape}, {"theta", m.theta}};
            }
        },
        model);
}

ordered_json to_json(const std::vector<RankedSlice>& ranking) {
    ordered_json out = ordered_json::array();
    for (const RankedSlice& r : ranking) out.push_back({{"id", r.id}, {"p_value", r.p_value}});
    return out;
}

ordered_json plan_report_json(const PlanRequest& request, const PlanResult& result) {
    ordered_json design;
    ordered_json recommendation;
    if (std::holds_alternative<GrowWindow>(request.design)) {
        design = {{"type", "grow_window"}};
        recommendation = {{"window_length", result.t_or_count}};
    } else {
        design = {{"type", "grow_intervals"},
                  {"interval_length", std::get<GrowIntervals>(request.design).interval_length}};
        recommendation = {{"interval_count", static_cast<long>(result.t_or_count)}};
    }
    ordered_json trace = ordered_json::array();
    for (const PlanProbe& p : result.trace)
        trace.push_back({{"t_or_count", p.t_or_count}, {"beta", p.beta}});
    return ordered_json{{"request",
                         {{"baseline", to_json(request.baseline)},
                          {"effect", request.effect},
                          {"target_fpr", request.target_fpr},
                          {"target_fnr", request.target_fnr},
                          {"design", design}}},
                        {"recommendation", recommendation},
                        {"achieved", {{"alpha", result.achieved_alpha}, {"beta", result.achieved_beta}}},
                        {"trace", trace}};
}

ProcessModel process_model_from_json(const nlohmann::json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "poisson") return PoissonProcess{j.at("rate").get<double>()};
    if (family == "det_compound")
        return DetCompoundProcess{j.at("rate").get<double>(), j.at("batch").get<long>()};
    if (family == "binom_compound")
        return BinomCompoundProcess{j.at("rate").get<double>(), j.at("tosses").get<long>(),
                                    j.at("head_prob").get<double>()};
    if (family == "neg_binomial")
        return NegBinomialProcess{j.at("shape").get<double>(), j.at("theta").get<double>()};
    throw std::invalid_argument("unknown process family: " + family);
}

Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario scenario;
    scenario.control = process_model_from_json(j.at("control"));
    scenario.treatment = process_model_from_json(j.at("treatment"));
    scenario.t0 = j.at("t0").get<double>();
    scenario.t1 = j.at("t1").get<double>();
    scenario.windows0 = j.value("windows0", 1L);
    scenario.windows1 = j.value("windows1", 1L);
    validate(scenario);
    return scenario;
}

PlanRequest plan_request_from_json(const nlohmann::json& j) {
    PlanRequest request;
    request.baseline = process_model_from_json(j.at("baseline"));
    request.effect = j.at("effect").get<double>();
    request.target_fpr = j.at("target_fpr").get<double>();
    request.target_fnr = j.at("target_fnr").get<double>();
    const auto& design = j.at("design");
    const std::string type = design.at("type").get<std::string>();
    if (type == "grow_window")
        request.design = GrowWindow{};
    else if (type == "grow_intervals")
        request.design = GrowIntervals{design.at("interval_length").get<double>()};
    else
        throw std::invalid_argument("unknown plan design: " + type);
    return request;
}

std::vector<Slice> slices_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty ranking CSV");
    if (line == "id,events,exposure\r") line.pop_back();
    if (line != "id,events,exposure")
        throw std::invalid_argument("ranking CSV header must be: id,events,exposure");
    std::vector<Slice> slices;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        Slice slice;
        std::string field;
        if (!std::getline(row, slice.id, ',')) throw std::invalid_argument("bad ranking row");
        if (!std::getline(row, field, ',')) throw std::invalid_argument("bad ranking row");
        slice.obs.events = std::stol(field);
        if (!std::getline(row, field, ',')) throw std::invalid_argument("bad ranking row");
        slice.obs.exposure = std::stod(field);
        slices.push_back(std::move(slice));
    }
    return slices;
}

namespace {

void write_curve_rows(std::ostream& out, const TradeoffCurve& curve, const std::string& method,
                      const double* degenerate_fraction) {
    for (const CurvePoint& p : curve.points) {
        out << format_double(p.alpha_hat) << ',' << format_double(p.alpha) << ','
            << format_double(p.beta) << ',' << format_double(p.alpha_se) << ','
            << format_double(p.beta_se) << ',' << method;
        if (degenerate_fraction != nullptr) out << ',' << format_double(*degenerate_fraction);
        out << '\n';
    }
}

}  // namespace

void write_curve_csv(std::ostream& out, const TradeoffCurve& curve) {
    out << "alpha_hat,alpha,beta,alpha_se,beta_se,method\n";
    write_curve_rows(out, curve, curve.method, nullptr);
}

void write_comparison_csv(std::ostream& out, const TestComparison& comparison) {
    out << "alpha_hat,alpha,beta,alpha_se,beta_se,method,degenerate_fraction\n";
    const double zero = 0.0;
    write_curve_rows(out, comparison.rate_curve, "rate_mc", &zero);
    write_curve_rows(out, comparison.wald_curve, "wald_mc", &comparison.degenerate_fraction);
}

void write_qq_csv(std::ostream& out, const std::vector<QqPoint>& points) {
    out << "q,x_quantile,y_quantile\n";
    for (const QqPoint& p : points)
        out << format_double(p.q) << ',' << p.x_quantile << ',' << p.y_quantile << '\n';
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows) {
    out << "k,count,pmf\n";
    for (const HistogramRow& r : rows)
        out << r.k << ',' << r.count << ',' << format_double(r.pmf) << '\n';
}

}  // namespace ratelab
