#include "aerq/restimator.hpp"

#include <algorithm>
#include <sstream>

#include "aerq/rankscores.hpp"
#include "aerq/simplex.hpp"

namespace aerq {

namespace {

void check_slope(const Dataset& data, const Vector& b) {
    if (b.size() != data.p()) {
        std::ostringstream msg;
        msg << "slope vector has length " << b.size() << ", expected " << data.p();
        throw InputError(msg.str());
    }
    if (!b.allFinite()) throw InputError("slope vector has a non-finite entry");
}

} // namespace

double centered_max_residual(const Dataset& data, const Vector& b) {
    check_slope(data, b);
    if (data.is_location()) return data.max_y();
    const Vector centered_fit = data.x() * b - Vector::Constant(data.n(), data.x_mean().dot(b));
    return (data.y() - centered_fit).maxCoeff();
}

double dispersion(const Dataset& data, const Vector& b) {
    return centered_max_residual(data, b) - data.mean_y();
}

double extreme_score(double u, Index n) {
    const double nn = static_cast<double>(n);
    return (u >= 1.0 - 1.0 / nn ? 1.0 : 0.0) - 1.0 / nn;
}

RankFormDispersion dispersion_rank_form(const Dataset& data, const Vector& b) {
    check_slope(data, b);
    const Index n = data.n();
    const Vector r = data.is_location() ? data.y() : Vector(data.y() - data.x() * b);
    const std::vector<int> ranks = ranks_of(r);
    RankFormDispersion out;
    for (Index i = 0; i < n; ++i) {
        const double u = static_cast<double>(ranks[static_cast<std::size_t>(i)]) /
                         static_cast<double>(n + 1);
        out.value += r(i) * extreme_score(u, n);
    }
    Vector sorted = r;
    std::sort(sorted.begin(), sorted.end());
    out.top_tie = n >= 2 && sorted(n - 1) == sorted(n - 2);
    return out;
}

RFit fit_r_estimator(const Dataset& data, const Tolerances& tol) {
    const Index n = data.n();
    const Index p = data.p();
    RFit fit;
    if (data.is_location()) {
        fit.slope = Vector(0);
    } else {
        Matrix centered = data.x();
        centered.rowwise() -= data.x_mean().transpose();

        LpProblem lp = LpProblem::with_free_vars(p + 1);
        lp.objective(0) = 1.0;
        lp.constraints = Matrix(n, p + 1);
        lp.constraints.col(0).setOnes();
        lp.constraints.rightCols(p) = centered;
        lp.rhs = data.y();
        lp.senses.assign(static_cast<std::size_t>(n), Sense::GreaterEqual);

        SimplexOptions opt;
        opt.tol = tol;
        const LpSolution sol = solve_lp(lp, opt);
        if (sol.status != LpStatus::Optimal) {
            std::ostringstream msg;
            msg << "minimax slope LP returned status " << to_string(sol.status)
                << " on a full-rank design (internal inconsistency)";
            throw NumericalError(msg.str());
        }
        fit.slope = sol.x.tail(p);
    }
    fit.minimax_value = centered_max_residual(data, fit.slope);
    fit.intercept = data.is_location() ? data.max_y() : (data.y() - data.x() * fit.slope).maxCoeff();
    fit.dispersion_at_opt = fit.minimax_value - data.mean_y();
    return fit;
}

Vector assemble_extended(const RFit& fit) {
    Vector out(fit.slope.size() + 1);
    out(0) = fit.intercept;
    out.tail(fit.slope.size()) = fit.slope;
    return out;
}

} // namespace aerq
