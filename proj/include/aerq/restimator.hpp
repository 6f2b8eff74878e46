#pragma once

#include "aerq/core.hpp"

namespace aerq {

/// Rank-dispersion R-estimator with the extreme score function, plus the
/// intercept that completes it to a (p+1)-vector.
struct RFit {
    Vector slope;
    /// max_i { y_i - x_i' slope }.
    double intercept = 0.0;
    /// max_i { y_i - (x_i - x_mean)' slope }.
    double minimax_value = 0.0;
    /// Rank dispersion at the optimum, minimax_value - mean(y).
    double dispersion_at_opt = 0.0;
};

/// max_i { y_i - (x_i - x_mean)' b }.
double centered_max_residual(const Dataset& data, const Vector& b);

/// Jaeckel rank dispersion with the extreme score, in its closed max form:
/// max_i { y_i - (x_i - x_mean)' b } - mean(y).
double dispersion(const Dataset& data, const Vector& b);

/// phi_n(u) = 1[u >= 1 - 1/n] - 1/n on [0, 1].
double extreme_score(double u, Index n);

struct RankFormDispersion {
    double value = 0.0;
    /// The two largest residuals coincide, so the top rank is a tie-break.
    bool top_tie = false;
};

/// The same dispersion evaluated from its rank definition,
/// sum_i r_i(b) phi_n(R_i / (n + 1)), with r_i(b) = y_i - x_i' b and ranks
/// assigned by strict order (lowest index first among equals).
RankFormDispersion dispersion_rank_form(const Dataset& data, const Vector& b);

/// Minimises the dispersion by the LP  min t  s.t.  t + (x_i - x_mean)'b >= y_i.
/// With p = 0 there is no slope and the intercept is max y.
RFit fit_r_estimator(const Dataset& data, const Tolerances& tol = {});

/// (intercept, slope) stacked.
Vector assemble_extended(const RFit& fit);

} // namespace aerq
