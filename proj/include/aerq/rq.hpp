#pragma once

#include <vector>

#include "aerq/core.hpp"
#include "aerq/simplex.hpp"

namespace aerq {

/// Extreme (alpha = 1) regression quantile: the lowest hyperplane on or
/// above every response, i.e. argmin sum_i x_i*' b subject to y_i <= x_i*' b.
struct ExtremeFit {
    QuantileFit fit;
    /// Active indices when exactly p+1 of them exist, otherwise empty.
    std::vector<Index> base;
};

ExtremeFit fit_extreme_rq(const Dataset& data, const Tolerances& tol = {});

/// Regression alpha-quantile for 0 < alpha < 1 (Koenker-Bassett check loss).
/// The result is certified by the LP duality check and, when the active set
/// has exactly p+1 members, by the subgradient condition.
QuantileFit fit_rq(const Dataset& data, double alpha, const Tolerances& tol = {});

struct BaseCandidate {
    /// 0-based indices, ascending.
    std::vector<Index> indices;
    /// n == p+1: every observation is interpolated.
    bool exact_fit = false;
};

/// The p+1 active observations of a non-degenerate extreme fit. Throws
/// DegeneracyError when the active count differs from p+1 or the base rows
/// are numerically singular.
BaseCandidate extract_base(const ExtremeFit& fit, const Dataset& data,
                           const Tolerances& tol = {});

/// sum_i [alpha r_i^+ + (1 - alpha) r_i^-] with r = y - X* coef.
double check_loss(const Dataset& data, double alpha, const Vector& coefficients);

/// One-sided derivative of check_loss at coef along direction.
double check_loss_directional_derivative(const Dataset& data, double alpha,
                                         const Vector& coefficients, const Vector& direction,
                                         const Tolerances& tol = {});

struct RqCertificate {
    bool passed = false;
    /// Smallest one-sided derivative along +/- each coordinate axis.
    double min_axis_derivative = 0.0;
    bool subgradient_checked = false;
    /// Multipliers of the active observations; optimality requires them in
    /// [alpha - 1, alpha].
    Vector base_multipliers;
};

RqCertificate certify_rq(const QuantileFit& fit, const Dataset& data,
                         const Tolerances& tol = {});

/// Indices with |r_i| <= tol.active_set * (1 + |y_i|).
std::vector<Index> active_indices(const Dataset& data, const Vector& residuals,
                                  const Tolerances& tol);

} // namespace aerq
