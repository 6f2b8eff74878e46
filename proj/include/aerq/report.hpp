#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "aerq/aerq.hpp"
#include "aerq/rankscores.hpp"

namespace aerq {

/// Stable field set: b_primal, b_weights, b_restimator, weights,
/// base_indices (1-based), shortfall, mean_y, max_y, verdict, notes, plus
/// diagnostics. NaN values serialise as null.
nlohmann::ordered_json report_to_json(const AerqReport& rep,
                                      std::optional<std::uint64_t> instance = std::nullopt);

nlohmann::ordered_json fit_to_json(const QuantileFit& fit, double averaged);
nlohmann::ordered_json rank_scores_to_json(const RankScoreSolution& s);

struct VerifySummary {
    std::size_t instances = 0;
    std::size_t pass = 0;
    std::size_t fail = 0;
    std::size_t skipped = 0;
    void add(Verdict v);
};

nlohmann::ordered_json summary_to_json(const VerifySummary& s);

/// One line, no trailing newline.
std::string dump_line(const nlohmann::ordered_json& j);

} // namespace aerq
