#include "aerq/aerq.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "aerq/rankscores.hpp"
#include "aerq/restimator.hpp"

namespace aerq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* what, double a, double b) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " (" << a << " vs " << b << ")";
    return msg.str();
}

} // namespace

double averaged_rq(const QuantileFit& fit, const Dataset& data) {
    return data.design_mean().dot(fit.coefficients());
}

WeightsRoute aerq_via_weights(const Dataset& data, std::span<const Index> base,
                              const Tolerances& tol) {
    const std::vector<Index> rows(base.begin(), base.end());
    if (static_cast<Index>(rows.size()) != data.p() + 1) {
        throw DegeneracyError("aerq_via_weights: base must have exactly p+1 indices");
    }
    WeightsRoute out;
    out.weights.indices = rows;
    out.weights.base_matrix = select_rows(data.design(), rows);
    // w = n^{-1} (X*_base)^{-T} X*'1.
    out.weights.weights = solve_or_throw(out.weights.base_matrix.transpose(),
                                         data.design_mean(), tol, "aerq_via_weights");
    const double sum = out.weights.weights.sum();
    if (std::abs(sum - 1.0) > tol.weight_sum) {
        throw NumericalError(fmt("base weights do not sum to one", sum, 1.0));
    }
    out.weights.all_positive = (out.weights.weights.array() > 0.0).all();
    double value = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        value += out.weights.weights(static_cast<Index>(k)) * data.y()(rows[k]);
    }
    out.value = value;
    return out;
}

double aerq_via_restimator(const Dataset& data, const Tolerances& tol) {
    return fit_r_estimator(data, tol).minimax_value;
}

Shortfall shortfall(const Dataset& data, const ExtremeFit& fit) {
    Shortfall out;
    out.value = data.mean_y() - averaged_rq(fit.fit, data);
    double neg = 0.0;
    for (Index i = 0; i < data.n(); ++i) neg += std::max(0.0, -fit.fit.residuals(i));
    out.from_residuals = -neg / static_cast<double>(data.n());
    return out;
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::SkippedDegenerate: return "skipped-degenerate";
    }
    return "unknown";
}

AerqReport verify_identities(const Dataset& data, const VerifyOptions& options,
                             const GeneratorTruth* truth) {
    const Tolerances& tol = options.tol;
    AerqReport rep;
    rep.n = data.n();
    rep.p = data.p();
    rep.max_y = data.max_y();
    rep.mean_y = data.mean_y();
    rep.b_weights = kNaN;
    rep.b_scores = kNaN;
    rep.b_scores_lp = kNaN;

    bool degenerate = false;
    std::vector<std::string> failures;

    try {
        const ExtremeFit ext = fit_extreme_rq(data, tol);
        rep.b_primal = averaged_rq(ext.fit, data);
        const Shortfall sf = shortfall(data, ext);
        rep.shortfall = sf.value;
        rep.shortfall_from_residuals = sf.from_residuals;
        rep.b_restimator = aerq_via_restimator(data, tol);

        try {
            const BaseCandidate base = extract_base(ext, data, tol);
            const WeightsRoute wr = aerq_via_weights(data, base.indices, tol);
            rep.weights = wr.weights;
            rep.b_weights = wr.value;
            const ScoreDerivativeAtOne deriv = derivative_at_one(data, base.indices, tol);
            rep.b_scores = averaged_extreme_from_derivative(data, deriv);
            rep.derivative_identity_gap = derivative_identity_gap(data, deriv);
            if (base.exact_fit) rep.notes.emplace_back("exact fit: n = p + 1");
            if (!wr.weights.all_positive) {
                degenerate = true;
                rep.notes.emplace_back("nonpositive base weight (dual degenerate optimum)");
            }
        } catch (const DegeneracyError& e) {
            degenerate = true;
            rep.notes.emplace_back(e.what());
        } catch (const SingularMatrixError& e) {
            degenerate = true;
            rep.notes.emplace_back(e.what());
        }

        if (options.lp_score_route && !degenerate) {
            const double one = 1.0;
            const auto pts = averaged_rq_via_scores(data, std::span<const double>(&one, 1),
                                                    options.score_step, tol);
            if (pts.front().linear) {
                rep.b_scores_lp = pts.front().value;
            } else {
                rep.notes.emplace_back("rank-score difference straddles a breakpoint near 1");
            }
        }
    } catch (const NumericalError& e) {
        rep.verdict = Verdict::Fail;
        rep.b_primal = rep.b_restimator = rep.shortfall = kNaN;
        rep.notes.emplace_back(std::string("numerical error: ") + e.what());
        return rep;
    }

    const double scale = 1.0 + std::abs(rep.b_primal);
    const double gap_tol = tol.cross_route * scale;
    auto gap = [](double a, double b) { return std::isnan(a) || std::isnan(b) ? 0.0 : std::abs(a - b); };
    rep.discrepancies.primal_weights = gap(rep.b_primal, rep.b_weights);
    rep.discrepancies.primal_restimator = gap(rep.b_primal, rep.b_restimator);
    rep.discrepancies.weights_restimator = gap(rep.b_weights, rep.b_restimator);
    rep.discrepancies.primal_scores = gap(rep.b_primal, rep.b_scores);

    if (rep.discrepancies.primal_weights > gap_tol) {
        failures.push_back(fmt("primal and weights routes disagree", rep.b_primal, rep.b_weights));
    }
    if (rep.discrepancies.primal_restimator > gap_tol) {
        failures.push_back(fmt("primal and R-estimator routes disagree", rep.b_primal, rep.b_restimator));
    }
    if (rep.discrepancies.weights_restimator > gap_tol) {
        failures.push_back(fmt("weights and R-estimator routes disagree", rep.b_weights, rep.b_restimator));
    }
    if (rep.discrepancies.primal_scores > gap_tol) {
        failures.push_back(fmt("score-derivative route disagrees", rep.b_primal, rep.b_scores));
    }
    if (gap(rep.b_primal, rep.b_scores_lp) > gap_tol) {
        failures.push_back(fmt("finite-difference rank-score route disagrees", rep.b_primal, rep.b_scores_lp));
    }
    if (rep.derivative_identity_gap > 1e-8 * (1.0 + data.design_sum().cwiseAbs().maxCoeff())) {
        failures.push_back(fmt("score derivative summation identities violated", rep.derivative_identity_gap, 0.0));
    }
    if (rep.b_primal < rep.mean_y - 1e-10 * (1.0 + std::abs(rep.mean_y))) {
        failures.push_back(fmt("averaged extreme quantile below mean(y)", rep.b_primal, rep.mean_y));
    }
    if (data.is_location()) {
        if (std::abs(rep.b_primal - rep.max_y) > 1e-12 * (1.0 + std::abs(rep.max_y))) {
            failures.push_back(fmt("location case should give max(y)", rep.b_primal, rep.max_y));
        }
    } else if (!(rep.b_primal < rep.max_y) && !degenerate) {
        failures.push_back(fmt("averaged extreme quantile not strictly below max(y)", rep.b_primal, rep.max_y));
    }
    if (rep.shortfall > tol.absolute * scale) {
        failures.push_back(fmt("shortfall is positive", rep.shortfall, 0.0));
    }
    if (gap(rep.shortfall, rep.shortfall_from_residuals) > gap_tol) {
        failures.push_back(fmt("shortfall forms disagree", rep.shortfall, rep.shortfall_from_residuals));
    }
    if (truth != nullptr) {
        const double bound = truth->errors.maxCoeff() + truth->beta0 +
                             (data.is_location() ? 0.0 : data.x_mean().dot(truth->slopes));
        rep.truth_bound = bound;
        if (rep.b_primal > bound + 1e-9) {
            failures.push_back(fmt("averaged extreme quantile exceeds max error bound", rep.b_primal, bound));
        }
    }

    for (auto& f : failures) rep.notes.push_back(std::move(f));
    if (degenerate) {
        rep.verdict = Verdict::SkippedDegenerate;
    } else {
        rep.verdict = failures.empty() ? Verdict::Pass : Verdict::Fail;
    }
    return rep;
}

} // namespace aerq
