#pragma once

#include <span>
#include <vector>

#include "aerq/core.hpp"

namespace aerq {

/// Regression rank scores: maximiser of y'a subject to X*'a = (1 - alpha) X*'1
/// and a in [0, 1]^n.
struct RankScoreSolution {
    double alpha = 0.0;
    Vector scores;
    double dual_objective = 0.0;
    /// Row multipliers of the program; they form a regression alpha-quantile.
    Vector coefficients;
    /// Some basic score sits at 0 or 1 (possible non-uniqueness).
    bool degenerate = false;
};

/// Left derivative of the rank scores at alpha = 1. Nonzero only on the
/// optimal base of the extreme fit.
struct ScoreDerivativeAtOne {
    Vector derivative;
    std::vector<Index> base;
};

/// alpha = 0 and alpha = 1 return 1_n and 0_n exactly (the only feasible
/// points there). Other levels are solved by the simplex.
RankScoreSolution solve_rank_scores(const Dataset& data, double alpha, const Tolerances& tol = {});

/// Ranks 1..n of v; equal values are ordered by index.
std::vector<int> ranks_of(const Vector& v);

/// Location-model rank scores evaluated coordinatewise from the ranks:
/// 1 for alpha <= (R-1)/n, R - n alpha up to R/n, 0 beyond.
/// Throws InputError unless ranks is a permutation of 1..n.
Vector hajek_scores(std::span<const int> ranks, double alpha);

/// -1'X* (X*_base)^{-1} placed at the base indices, zero elsewhere.
/// Throws SingularMatrixError when the base rows are singular.
ScoreDerivativeAtOne derivative_at_one(const Dataset& data, std::span<const Index> base,
                                       const Tolerances& tol = {});

/// Largest deviation from sum_i a'_i(1) = -n and sum_i x_ij a'_i(1) = -sum_i x_ij.
double derivative_identity_gap(const Dataset& data, const ScoreDerivativeAtOne& d);

/// -(1/n) sum_i y_i a'_i(1).
double averaged_extreme_from_derivative(const Dataset& data, const ScoreDerivativeAtOne& d);

/// Largest violation of complementary slackness between rank scores and a
/// fitted coefficient vector at the same level: a_i must be 1 where the
/// residual is positive and 0 where it is negative.
double complementary_slackness_gap(const Dataset& data, const RankScoreSolution& scores,
                                   const Vector& coefficients, const Tolerances& tol = {});

struct ScoreRoutePoint {
    double alpha = 0.0;
    /// -(1/n) sum_i y_i a'_i(alpha) by finite differences.
    double value = 0.0;
    /// False when the difference stencil straddles a breakpoint.
    bool linear = true;
};

/// Averaged regression quantile from finite differences of the rank scores
/// (central inside (0,1), one-sided at the ends) with step h.
std::vector<ScoreRoutePoint> averaged_rq_via_scores(const Dataset& data,
                                                    std::span<const double> alpha_grid,
                                                    double h = 1e-6,
                                                    const Tolerances& tol = {});

} // namespace aerq
