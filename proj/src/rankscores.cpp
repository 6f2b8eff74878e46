#include "aerq/rankscores.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "aerq/simplex.hpp"

namespace aerq {

RankScoreSolution solve_rank_scores(const Dataset& data, double alpha, const Tolerances& tol) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        std::ostringstream msg;
        msg << "solve_rank_scores: alpha must lie in [0, 1], got " << alpha;
        throw InputError(msg.str());
    }
    const Index n = data.n();
    RankScoreSolution out;
    out.alpha = alpha;
    if (alpha == 0.0 || alpha == 1.0) {
        // The first constraint, sum a = (1 - alpha) n, pins a to a corner.
        out.scores = Vector::Constant(n, alpha == 0.0 ? 1.0 : 0.0);
        out.dual_objective = data.y().dot(out.scores);
        return out;
    }

    LpProblem lp;
    lp.direction = Direction::Maximize;
    lp.objective = data.y();
    lp.constraints = data.design().transpose();
    lp.rhs = (1.0 - alpha) * data.design_sum();
    lp.senses.assign(static_cast<std::size_t>(data.p() + 1), Sense::Equal);
    lp.lower = Vector::Zero(n);
    lp.upper = Vector::Ones(n);

    SimplexOptions opt;
    opt.tol = tol;
    const LpSolution sol = solve_lp(lp, opt);
    if (sol.status != LpStatus::Optimal) {
        std::ostringstream msg;
        msg << "rank-score LP at alpha = " << alpha << " returned status " << to_string(sol.status)
            << " although (1 - alpha) 1_n is feasible (internal inconsistency)";
        throw NumericalError(msg.str());
    }
    out.scores = sol.x.cwiseMax(0.0).cwiseMin(1.0);
    out.dual_objective = data.y().dot(out.scores);
    out.coefficients = sol.duals;
    out.degenerate = sol.degenerate;
    return out;
}

std::vector<int> ranks_of(const Vector& v) {
    std::vector<Index> order(static_cast<std::size_t>(v.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return v(a) < v(b); });
    std::vector<int> ranks(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        ranks[static_cast<std::size_t>(order[k])] = static_cast<int>(k) + 1;
    }
    return ranks;
}

Vector hajek_scores(std::span<const int> ranks, double alpha) {
    const int n = static_cast<int>(ranks.size());
    std::vector<bool> seen(ranks.size(), false);
    for (int r : ranks) {
        if (r < 1 || r > n || seen[static_cast<std::size_t>(r - 1)]) {
            throw InputError("hajek_scores: ranks must be a permutation of 1..n");
        }
        seen[static_cast<std::size_t>(r - 1)] = true;
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw InputError("hajek_scores: alpha must lie in [0, 1]");
    }
    Vector out(n);
    for (int i = 0; i < n; ++i) {
        const int r = ranks[static_cast<std::size_t>(i)];
        if (alpha <= static_cast<double>(r - 1) / n) {
            out(i) = 1.0;
        } else if (alpha <= static_cast<double>(r) / n) {
            out(i) = r - n * alpha;
        } else {
            out(i) = 0.0;
        }
    }
    return out;
}

ScoreDerivativeAtOne derivative_at_one(const Dataset& data, std::span<const Index> base,
                                       const Tolerances& tol) {
    const std::vector<Index> rows(base.begin(), base.end());
    if (static_cast<Index>(rows.size()) != data.p() + 1) {
        throw DegeneracyError("derivative_at_one: base must have exactly p+1 indices");
    }
    const Matrix base_matrix = select_rows(data.design(), rows);
    // z' = 1'X* (X*_base)^{-1}  <=>  X*_base' z = X*'1.
    const Vector z = solve_or_throw(base_matrix.transpose(), data.design_sum(), tol,
                                    "derivative_at_one");
    ScoreDerivativeAtOne out;
    out.base = rows;
    out.derivative = Vector::Zero(data.n());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.derivative(rows[k]) = -z(static_cast<Index>(k));
    }
    return out;
}

double derivative_identity_gap(const Dataset& data, const ScoreDerivativeAtOne& d) {
    const Vector lhs = data.design().transpose() * d.derivative;
    return (lhs + data.design_sum()).cwiseAbs().maxCoeff();
}

double averaged_extreme_from_derivative(const Dataset& data, const ScoreDerivativeAtOne& d) {
    return -data.y().dot(d.derivative) / static_cast<double>(data.n());
}

double complementary_slackness_gap(const Dataset& data, const RankScoreSolution& scores,
                                   const Vector& coefficients, const Tolerances& tol) {
    const Vector r = data.y() - data.design() * coefficients;
    double gap = 0.0;
    for (Index i = 0; i < data.n(); ++i) {
        const double thr = tol.active_set * (1.0 + std::abs(data.y()(i)));
        if (r(i) > thr) gap = std::max(gap, 1.0 - scores.scores(i));
        if (r(i) < -thr) gap = std::max(gap, scores.scores(i));
    }
    return gap;
}

std::vector<ScoreRoutePoint> averaged_rq_via_scores(const Dataset& data,
                                                    std::span<const double> alpha_grid, double h,
                                                    const Tolerances& tol) {
    if (!(h > 0.0 && h < 0.25)) throw InputError("averaged_rq_via_scores: step must lie in (0, 0.25)");
    const double n = static_cast<double>(data.n());
    const double lin_tol = 1e-9;
    auto scores = [&](double a) { return solve_rank_scores(data, a, tol).scores; };

    std::vector<ScoreRoutePoint> out;
    out.reserve(alpha_grid.size());
    for (double alpha : alpha_grid) {
        if (!(alpha >= 0.0 && alpha <= 1.0)) {
            throw InputError("averaged_rq_via_scores: grid levels must lie in [0, 1]");
        }
        ScoreRoutePoint pt;
        pt.alpha = alpha;
        Vector slope;
        if (alpha + h > 1.0) {
            const Vector a1 = scores(alpha - h);
            const Vector a2 = scores(alpha - 2.0 * h);
            const Vector a0 = scores(alpha);
            slope = (a0 - a1) / h;
            pt.linear = (a2 - 2.0 * a1 + a0).cwiseAbs().maxCoeff() <= lin_tol;
        } else if (alpha - h < 0.0) {
            const Vector a0 = scores(alpha);
            const Vector a1 = scores(alpha + h);
            const Vector a2 = scores(alpha + 2.0 * h);
            slope = (a1 - a0) / h;
            pt.linear = (a2 - 2.0 * a1 + a0).cwiseAbs().maxCoeff() <= lin_tol;
        } else {
            const Vector lo = scores(alpha - h);
            const Vector mid = scores(alpha);
            const Vector hi = scores(alpha + h);
            slope = (hi - lo) / (2.0 * h);
            pt.linear = (lo - 2.0 * mid + hi).cwiseAbs().maxCoeff() <= lin_tol;
        }
        pt.value = -data.y().dot(slope) / n;
        out.push_back(pt);
    }
    return out;
}

} // namespace aerq
