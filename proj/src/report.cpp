#include "aerq/report.hpp"

#include <cmath>

namespace aerq {

namespace {

nlohmann::ordered_json number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

nlohmann::ordered_json array(const Vector& v) {
    auto out = nlohmann::ordered_json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
    return out;
}

nlohmann::ordered_json one_based(const std::vector<Index>& idx) {
    auto out = nlohmann::ordered_json::array();
    for (Index i : idx) out.push_back(i + 1);
    return out;
}

} // namespace

nlohmann::ordered_json report_to_json(const AerqReport& rep, std::optional<std::uint64_t> instance) {
    nlohmann::ordered_json j;
    j["record"] = "report";
    if (instance) j["instance"] = *instance;
    j["n"] = rep.n;
    j["p"] = rep.p;
    j["b_primal"] = number(rep.b_primal);
    j["b_weights"] = number(rep.b_weights);
    j["b_restimator"] = number(rep.b_restimator);
    j["b_scores"] = number(rep.b_scores);
    j["b_scores_lp"] = number(rep.b_scores_lp);
    j["weights"] = array(rep.weights.weights);
    j["base_indices"] = one_based(rep.weights.indices);
    j["shortfall"] = number(rep.shortfall);
    j["shortfall_from_residuals"] = number(rep.shortfall_from_residuals);
    j["mean_y"] = number(rep.mean_y);
    j["max_y"] = number(rep.max_y);
    j["discrepancies"] = {
        {"primal_weights", number(rep.discrepancies.primal_weights)},
        {"primal_restimator", number(rep.discrepancies.primal_restimator)},
        {"weights_restimator", number(rep.discrepancies.weights_restimator)},
        {"primal_scores", number(rep.discrepancies.primal_scores)},
    };
    j["derivative_identity_gap"] = number(rep.derivative_identity_gap);
    j["truth_bound"] = rep.truth_bound ? number(*rep.truth_bound) : nlohmann::ordered_json(nullptr);
    j["verdict"] = to_string(rep.verdict);
    j["notes"] = rep.notes;
    return j;
}

nlohmann::ordered_json fit_to_json(const QuantileFit& fit, double averaged) {
    nlohmann::ordered_json j;
    j["alpha"] = fit.alpha;
    j["coefficients"] = array(fit.coefficients());
    j["objective"] = number(fit.objective);
    j["averaged"] = number(averaged);
    j["active_set"] = one_based(fit.active_set);
    j["degenerate"] = fit.degenerate;
    return j;
}

nlohmann::ordered_json rank_scores_to_json(const RankScoreSolution& s) {
    nlohmann::ordered_json j;
    j["alpha"] = s.alpha;
    j["scores"] = array(s.scores);
    j["dual_objective"] = number(s.dual_objective);
    j["coefficients"] = array(s.coefficients);
    j["degenerate"] = s.degenerate;
    return j;
}

void VerifySummary::add(Verdict v) {
    ++instances;
    switch (v) {
    case Verdict::Pass: ++pass; break;
    case Verdict::Fail: ++fail; break;
    case Verdict::SkippedDegenerate: ++skipped; break;
    }
}

nlohmann::ordered_json summary_to_json(const VerifySummary& s) {
    nlohmann::ordered_json j;
    j["record"] = "summary";
    j["instances"] = s.instances;
    j["pass"] = s.pass;
    j["fail"] = s.fail;
    j["skipped"] = s.skipped;
    return j;
}

std::string dump_line(const nlohmann::ordered_json& j) {
    return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

} // namespace aerq
