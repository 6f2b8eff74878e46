#include "aerq/rq.hpp"

#include <cmath>
#include <sstream>

namespace aerq {

namespace {

bool base_is_regular(const Dataset& data, const std::vector<Index>& rows, const Tolerances& tol) {
    if (static_cast<Index>(rows.size()) != data.p() + 1) return false;
    const Matrix base = select_rows(data.design(), rows);
    return !solve_square_system(base, Vector::Zero(base.rows()), tol).singular();
}

QuantileFit make_fit(const Dataset& data, double alpha, const Vector& coef, const Tolerances& tol) {
    QuantileFit fit;
    fit.alpha = alpha;
    fit.beta0 = coef(0);
    fit.slopes = coef.tail(data.p());
    fit.fitted = data.design() * coef;
    fit.residuals = data.y() - fit.fitted;
    fit.active_set = active_indices(data, fit.residuals, tol);
    fit.degenerate = !base_is_regular(data, fit.active_set, tol);
    return fit;
}

} // namespace

std::vector<Index> active_indices(const Dataset& data, const Vector& residuals,
                                  const Tolerances& tol) {
    std::vector<Index> out;
    for (Index i = 0; i < data.n(); ++i) {
        if (std::abs(residuals(i)) <= tol.active_set * (1.0 + std::abs(data.y()(i)))) {
            out.push_back(i);
        }
    }
    return out;
}

double check_loss(const Dataset& data, double alpha, const Vector& coefficients) {
    const Vector r = data.y() - data.design() * coefficients;
    double total = 0.0;
    for (Index i = 0; i < r.size(); ++i) {
        total += r(i) > 0.0 ? alpha * r(i) : (alpha - 1.0) * r(i);
    }
    return total;
}

double check_loss_directional_derivative(const Dataset& data, double alpha,
                                         const Vector& coefficients, const Vector& direction,
                                         const Tolerances& tol) {
    const Vector r = data.y() - data.design() * coefficients;
    const Vector g = data.design() * direction;
    double total = 0.0;
    for (Index i = 0; i < r.size(); ++i) {
        const bool zero = std::abs(r(i)) <= tol.active_set * (1.0 + std::abs(data.y()(i)));
        if (!zero) {
            total += r(i) > 0.0 ? -alpha * g(i) : (1.0 - alpha) * g(i);
        } else {
            total += g(i) < 0.0 ? -alpha * g(i) : (1.0 - alpha) * g(i);
        }
    }
    return total;
}

RqCertificate certify_rq(const QuantileFit& fit, const Dataset& data, const Tolerances& tol) {
    RqCertificate cert;
    const Vector coef = fit.coefficients();
    const Index k = coef.size();
    double min_dd = kInfinity;
    for (Index j = 0; j < k; ++j) {
        for (double sgn : {1.0, -1.0}) {
            Vector dir = Vector::Zero(k);
            dir(j) = sgn;
            min_dd = std::min(min_dd, check_loss_directional_derivative(data, fit.alpha, coef, dir, tol));
        }
    }
    cert.min_axis_derivative = min_dd;
    bool ok = min_dd >= -1e-8;

    if (static_cast<Index>(fit.active_set.size()) == k && fit.alpha < 1.0) {
        Vector xi = Vector::Zero(k);
        std::vector<bool> in_base(static_cast<std::size_t>(data.n()), false);
        for (Index i : fit.active_set) in_base[static_cast<std::size_t>(i)] = true;
        for (Index i = 0; i < data.n(); ++i) {
            if (in_base[static_cast<std::size_t>(i)]) continue;
            const double psi = fit.residuals(i) < 0.0 ? fit.alpha - 1.0 : fit.alpha;
            xi += psi * data.design().row(i).transpose();
        }
        const Matrix base = select_rows(data.design(), fit.active_set);
        auto sol = solve_square_system(base.transpose(), -xi, tol);
        if (!sol.singular()) {
            cert.subgradient_checked = true;
            cert.base_multipliers = *sol.solution;
            const double slack = 1e-9 * (1.0 + xi.cwiseAbs().maxCoeff());
            for (Index j = 0; j < k; ++j) {
                const double v = cert.base_multipliers(j);
                if (v < fit.alpha - 1.0 - slack || v > fit.alpha + slack) ok = false;
            }
        }
    }
    cert.passed = ok;
    return cert;
}

ExtremeFit fit_extreme_rq(const Dataset& data, const Tolerances& tol) {
    const Index n = data.n();
    const Index k = data.p() + 1;
    Vector coef(k);
    if (data.is_location()) {
        coef(0) = data.max_y();
    } else {
        LpProblem lp = LpProblem::with_free_vars(k);
        lp.objective = data.design_sum();
        lp.constraints = data.design();
        lp.rhs = data.y();
        lp.senses.assign(static_cast<std::size_t>(n), Sense::GreaterEqual);
        SimplexOptions opt;
        opt.tol = tol;
        const LpSolution sol = solve_lp(lp, opt);
        if (sol.status != LpStatus::Optimal) {
            std::ostringstream msg;
            msg << "extreme quantile LP returned status " << to_string(sol.status)
                << " on a full-rank design (internal inconsistency)";
            throw NumericalError(msg.str());
        }
        coef = sol.x;
    }

    ExtremeFit out;
    out.fit = make_fit(data, 1.0, coef, tol);
    out.fit.objective = data.design_sum().dot(coef);
    const double worst = out.fit.residuals.maxCoeff();
    const double scale = 1.0 + data.y().cwiseAbs().maxCoeff();
    if (worst > 1e-9 * scale) {
        std::ostringstream msg;
        msg << "extreme quantile fit violates y_i <= x_i*'b by " << worst;
        throw NumericalError(msg.str());
    }
    if (!out.fit.degenerate) out.base = out.fit.active_set;
    return out;
}

QuantileFit fit_rq(const Dataset& data, double alpha, const Tolerances& tol) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        std::ostringstream msg;
        msg << "fit_rq: alpha must lie in (0, 1), got " << alpha;
        throw InputError(msg.str());
    }
    const Index n = data.n();
    const Index k = data.p() + 1;

    // With u_i = r_i^+ the check loss equals sum u_i - (1 - alpha) sum r_i, so
    //   min sum u + (1 - alpha) s'b   s.t.  x_i*'b + u_i >= y_i,  u >= 0
    // (s = column sums of X*) has the same minimisers as the check loss.
    LpProblem lp = LpProblem::with_free_vars(k + n);
    lp.objective.head(k) = (1.0 - alpha) * data.design_sum();
    lp.objective.tail(n).setOnes();
    lp.lower.tail(n).setZero();
    lp.constraints = Matrix::Zero(n, k + n);
    lp.constraints.leftCols(k) = data.design();
    lp.constraints.rightCols(n).setIdentity();
    lp.rhs = data.y();
    lp.senses.assign(static_cast<std::size_t>(n), Sense::GreaterEqual);

    SimplexOptions opt;
    opt.tol = tol;
    const LpSolution sol = solve_lp(lp, opt);
    if (sol.status != LpStatus::Optimal) {
        std::ostringstream msg;
        msg << "quantile LP at alpha = " << alpha << " returned status " << to_string(sol.status);
        throw NumericalError(msg.str());
    }
    const LpCertificate lp_cert = certify_solution(lp, sol, tol);
    if (!lp_cert.passed) {
        throw NumericalError("quantile LP solution failed certification: " +
                             lp_cert.violations.front());
    }

    QuantileFit fit = make_fit(data, alpha, sol.x.head(k), tol);
    fit.objective = check_loss(data, alpha, fit.coefficients());
    const RqCertificate cert = certify_rq(fit, data, tol);
    if (!cert.passed) {
        std::ostringstream msg;
        msg << "quantile fit at alpha = " << alpha
            << " failed the subgradient check (min axis derivative " << cert.min_axis_derivative
            << ")";
        throw NumericalError(msg.str());
    }
    return fit;
}

BaseCandidate extract_base(const ExtremeFit& fit, const Dataset& data, const Tolerances& tol) {
    const auto& active = fit.fit.active_set;
    const Index k = data.p() + 1;
    if (static_cast<Index>(active.size()) != k) {
        std::ostringstream msg;
        msg << "degenerate extreme fit: " << active.size() << " active observations, expected "
            << k;
        throw DegeneracyError(msg.str());
    }
    if (!base_is_regular(data, active, tol)) {
        throw DegeneracyError("degenerate extreme fit: base rows are numerically singular");
    }
    BaseCandidate out;
    out.indices = active;
    out.exact_fit = data.n() == k;
    return out;
}

} // namespace aerq
