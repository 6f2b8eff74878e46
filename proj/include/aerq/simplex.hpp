#pragma once

#include <limits>
#include <string>
#include <vector>

#include "aerq/core.hpp"

namespace aerq {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, Equal, GreaterEqual };
enum class Direction { Minimize, Maximize };

/// optimize c'x  subject to  A_i x (<=|=|>=) rhs_i,  lower <= x <= upper.
/// Bounds may be infinite; a variable with both bounds infinite is free.
struct LpProblem {
    Direction direction = Direction::Minimize;
    Vector objective;
    Matrix constraints;
    Vector rhs;
    std::vector<Sense> senses;
    Vector lower;
    Vector upper;

    [[nodiscard]] Index num_rows() const { return constraints.rows(); }
    [[nodiscard]] Index num_vars() const { return objective.size(); }

    /// Throws InputError when dimensions or bounds are inconsistent.
    void validate() const;

    /// Convenience: a problem with `vars` free variables and no rows.
    static LpProblem with_free_vars(Index vars, Direction dir = Direction::Minimize);
    void add_row(const Vector& coeffs, Sense sense, double rhs_value);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Vector x;
    /// Basic columns at the final vertex, ascending. Index j < num_vars is a
    /// structural variable; num_vars + i is the slack of row i.
    std::vector<Index> basis;
    double objective = 0.0;
    /// Row multipliers for the stated direction: c = A'y + reduced_costs.
    Vector duals;
    Vector reduced_costs;
    /// Some basic variable sits at one of its bounds at the final vertex.
    bool degenerate = false;
    int iterations = 0;
    bool bland_engaged = false;
};

struct SimplexOptions {
    Tolerances tol;
    /// 0 selects 50 * (rows + cols).
    int max_iterations = 0;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    int degenerate_streak = 10;
    /// Pivots between basis refactorizations.
    int refactor_every = 64;
};

/// Bounded-variable two-phase primal simplex on a dense tableau. The pivot
/// rule is fixed (Dantzig, Bland under degeneracy streaks; ratio-test ties go
/// to the lowest row), so identical inputs give identical outputs.
/// Throws IterationLimitError when the iteration budget is exhausted.
LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options = {});

struct LpCertificate {
    bool passed = false;
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    double complementarity = 0.0;
    double duality_gap = 0.0;
    double dual_objective = 0.0;
    std::vector<std::string> violations;
};

/// Rechecks an optimal solution from scratch: primal feasibility, dual sign
/// conditions, complementary slackness and the duality gap, all using only
/// the problem data and the reported x and duals.
LpCertificate certify_solution(const LpProblem& problem, const LpSolution& solution,
                               const Tolerances& tol = {});

} // namespace aerq
