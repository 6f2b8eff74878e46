#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "aerq/error.hpp"

namespace aerq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Numerical tolerances shared by every solver. One record is threaded
/// through all routines so that a caller can tighten or loosen them
/// uniformly.
struct Tolerances {
    double absolute = 1e-9;
    double relative = 1e-9;
    /// Relative pivot cutoff for rank decisions and square solves.
    double rank_pivot = 1e-10;
    /// |r_i| <= active_set * (1 + |y_i|) marks observation i as active.
    double active_set = 1e-8;
    /// Cross-route agreement for the averaged extreme quantile.
    double cross_route = 1e-8;
    /// Sum-to-one check for the base weights.
    double weight_sum = 1e-10;
    /// Simplex pivot / reduced-cost tolerances.
    double lp_pivot = 1e-9;
    double lp_optimality = 1e-10;
    double lp_feasibility = 1e-9;

    /// a <= b within the combined absolute/relative slack.
    [[nodiscard]] bool leq(double a, double b) const;
    [[nodiscard]] bool close(double a, double b) const;
};

/// Whether a dataset with exactly p+1 observations is acceptable.
enum class SizeMode {
    Strict,        ///< n >= p + 2
    AllowExactFit, ///< n >= p + 1 (square design; degenerate-size use only)
};

/// Responses and regressors of a linear model y_i = b0 + x_i' b + e_i.
/// Instances are created only through validate_dataset and are immutable.
class Dataset {
public:
    [[nodiscard]] Index n() const { return y_.size(); }
    [[nodiscard]] Index p() const { return x_.cols(); }
    [[nodiscard]] const Vector& y() const { return y_; }
    /// n x p regressors (no intercept column).
    [[nodiscard]] const Matrix& x() const { return x_; }
    /// n x (p+1) design with a leading column of ones.
    [[nodiscard]] const Matrix& design() const { return design_; }
    [[nodiscard]] bool is_location() const { return p() == 0; }

    [[nodiscard]] double mean_y() const { return mean_y_; }
    [[nodiscard]] double max_y() const { return max_y_; }
    /// Column means of x (length p).
    [[nodiscard]] const Vector& x_mean() const { return x_mean_; }
    /// Column means of the design, (1, x_mean) (length p+1).
    [[nodiscard]] const Vector& design_mean() const { return design_mean_; }
    /// Column sums of the design, n * design_mean computed exactly.
    [[nodiscard]] const Vector& design_sum() const { return design_sum_; }

    [[nodiscard]] SizeMode size_mode() const { return mode_; }

    friend bool operator==(const Dataset& a, const Dataset& b);

private:
    friend Dataset validate_dataset(Vector y, Matrix x, SizeMode mode,
                                    const Tolerances& tol);
    Dataset() = default;

    Vector y_;
    Matrix x_;
    Matrix design_;
    Vector x_mean_;
    Vector design_mean_;
    Vector design_sum_;
    double mean_y_ = 0.0;
    double max_y_ = 0.0;
    SizeMode mode_ = SizeMode::Strict;
};

/// Checks dimensions, finiteness, sample size and full column rank of the
/// intercept-augmented design (column-pivoted QR, pivot ratio cutoff
/// tol.rank_pivot). Throws InputError on any violation.
Dataset validate_dataset(Vector y, Matrix x, SizeMode mode = SizeMode::Strict,
                         const Tolerances& tol = {});

/// Re-runs validation on an existing dataset.
Dataset revalidate(const Dataset& data, const Tolerances& tol = {});

/// A fitted regression quantile at level alpha.
struct QuantileFit {
    double alpha = 0.0;
    double beta0 = 0.0;
    Vector slopes;
    /// Optimal value of the program that produced the fit: the check loss
    /// for 0 < alpha < 1, and sum_i x_i*' b for the extreme (alpha = 1) fit.
    double objective = 0.0;
    /// 0-based indices of observations with zero residual, ascending.
    std::vector<Index> active_set;
    bool degenerate = false;
    Vector fitted;
    Vector residuals;

    /// (beta0, slopes) stacked.
    [[nodiscard]] Vector coefficients() const;
};

/// The optimal base of the extreme fit with its regressor-based weights.
struct BaseWeights {
    /// 0-based observation indices, ascending.
    std::vector<Index> indices;
    Vector weights;
    /// Rows of the design at `indices`.
    Matrix base_matrix;
    /// Every weight is strictly positive.
    bool all_positive = false;
};

struct LinearSolveResult {
    std::optional<Vector> solution;
    /// Reciprocal condition estimate of A (0 when singular).
    double rcond = 0.0;
    /// Ratio of smallest to largest pivot magnitude.
    double pivot_ratio = 0.0;

    [[nodiscard]] bool singular() const { return !solution.has_value(); }
};

/// Solves a small dense square system with a fully pivoted LU. A pivot
/// ratio below tol.rank_pivot is reported as singular.
LinearSolveResult solve_square_system(const Matrix& a, const Vector& b,
                                      const Tolerances& tol = {});

/// Same as solve_square_system but throws SingularMatrixError.
Vector solve_or_throw(const Matrix& a, const Vector& b, const Tolerances& tol,
                      const char* what);

/// Rows of the design selected by (0-based) indices.
Matrix select_rows(const Matrix& m, const std::vector<Index>& rows);

} // namespace aerq
