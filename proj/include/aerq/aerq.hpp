#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aerq/core.hpp"
#include "aerq/rq.hpp"

namespace aerq {

/// B_n(alpha) = x_mean*' beta(alpha): the fitted hyperplane evaluated at the
/// regressor means.
double averaged_rq(const QuantileFit& fit, const Dataset& data);

struct WeightsRoute {
    double value = 0.0;
    BaseWeights weights;
};

/// sum_k w_k y_{i_k} with w' = n^{-1} 1'X* (X*_base)^{-1}. Throws
/// SingularMatrixError for a singular base and NumericalError when the
/// weights do not sum to one within tol.weight_sum.
WeightsRoute aerq_via_weights(const Dataset& data, std::span<const Index> base,
                              const Tolerances& tol = {});

/// Minimax value max_i { y_i - (x_i - x_mean)' slope } of the R-estimator.
double aerq_via_restimator(const Dataset& data, const Tolerances& tol = {});

struct Shortfall {
    /// mean(y) - B_n(1).
    double value = 0.0;
    /// -(1/n) sum_i (y_i - x_i*' beta(1))^-, the same quantity from residuals.
    double from_residuals = 0.0;
};

Shortfall shortfall(const Dataset& data, const ExtremeFit& fit);

enum class Verdict { Pass, Fail, SkippedDegenerate };

const char* to_string(Verdict v);

/// Parameters and realised errors of a synthetic dataset.
struct GeneratorTruth {
    double beta0 = 0.0;
    Vector slopes;
    Vector errors;
};

struct Discrepancies {
    double primal_weights = 0.0;
    double primal_restimator = 0.0;
    double weights_restimator = 0.0;
    double primal_scores = 0.0;
};

struct AerqReport {
    Index n = 0;
    Index p = 0;
    double b_primal = 0.0;
    /// NaN when no regular base exists.
    double b_weights = 0.0;
    double b_restimator = 0.0;
    /// -(1/n) sum y_i a'_i(1) from the closed-form derivative; NaN without a base.
    double b_scores = 0.0;
    /// One-sided finite difference of LP rank scores at alpha = 1; NaN if skipped.
    double b_scores_lp = 0.0;
    BaseWeights weights;
    double shortfall = 0.0;
    double shortfall_from_residuals = 0.0;
    double max_y = 0.0;
    double mean_y = 0.0;
    Discrepancies discrepancies;
    double derivative_identity_gap = 0.0;
    /// max_i e_i + beta0 + x_mean' beta when the generator truth is known.
    std::optional<double> truth_bound;
    Verdict verdict = Verdict::Fail;
    std::vector<std::string> notes;
};

struct VerifyOptions {
    Tolerances tol;
    /// Also evaluate the finite-difference rank-score route at alpha = 1.
    bool lp_score_route = true;
    double score_step = 1e-6;
};

/// Runs every route on one dataset and checks the identities that tie them
/// together. Degenerate instances are reported as SkippedDegenerate.
AerqReport verify_identities(const Dataset& data, const VerifyOptions& options = {},
                             const GeneratorTruth* truth = nullptr);

} // namespace aerq
