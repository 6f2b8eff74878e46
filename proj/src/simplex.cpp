#include "aerq/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aerq {

void LpProblem::validate() const {
    const Index m = constraints.rows();
    const Index nv = objective.size();
    if (constraints.cols() != nv && m > 0) {
        throw InputError("LpProblem: constraint matrix column count differs from objective length");
    }
    if (rhs.size() != m || static_cast<Index>(senses.size()) != m) {
        throw InputError("LpProblem: rhs/senses length differs from constraint rows");
    }
    if (lower.size() != nv || upper.size() != nv) {
        throw InputError("LpProblem: bound vectors must match the number of variables");
    }
    if (!objective.allFinite() || !constraints.allFinite() || !rhs.allFinite()) {
        throw InputError("LpProblem: non-finite coefficient");
    }
    for (Index j = 0; j < nv; ++j) {
        const double lo = lower(j);
        const double up = upper(j);
        if (std::isnan(lo) || std::isnan(up) || lo > up || lo == kInfinity || up == -kInfinity) {
            std::ostringstream msg;
            msg << "LpProblem: invalid bounds for variable " << j << ": [" << lo << ", " << up << "]";
            throw InputError(msg.str());
        }
    }
}

LpProblem LpProblem::with_free_vars(Index vars, Direction dir) {
    LpProblem lp;
    lp.direction = dir;
    lp.objective = Vector::Zero(vars);
    lp.constraints = Matrix(0, vars);
    lp.rhs = Vector(0);
    lp.lower = Vector::Constant(vars, -kInfinity);
    lp.upper = Vector::Constant(vars, kInfinity);
    return lp;
}

void LpProblem::add_row(const Vector& coeffs, Sense sense, double rhs_value) {
    const Index m = constraints.rows();
    constraints.conservativeResize(m + 1, objective.size());
    constraints.row(m) = coeffs.transpose();
    rhs.conservativeResize(m + 1);
    rhs(m) = rhs_value;
    senses.push_back(sense);
}

const char* to_string(LpStatus s) {
    switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

enum class VarState : unsigned char { Basic, AtLower, AtUpper, Free, Fixed };

enum class PhaseResult { Optimal, Unbounded };

class Tableau {
public:
    Tableau(const LpProblem& prob, const SimplexOptions& opt) : prob_(prob), opt_(opt) {
        setup();
    }

    LpSolution run();

private:
    void setup();
    void set_phase_costs(bool phase_one);
    PhaseResult iterate();
    Vector reduced_costs() const;
    Index choose_entering(const Vector& d, int& dir) const;
    void pivot(Index row, Index col);
    void refactor();
    void drive_out_artificials();
    bool push_free_variables();
    double pivot_tolerance(Index col) const;
    VarState state_at(Index j, double value) const;

    // Returns the blocking row (or -1 for a bound flip, -2 for unbounded).
    Index ratio_test(Index col, int dir, double& step, bool& to_upper) const;
    void apply_step(Index col, int dir, double step, Index row, bool to_upper);

    [[nodiscard]] bool is_artificial(Index j) const { return j >= nv_ + m_; }

    const LpProblem& prob_;
    const SimplexOptions& opt_;

    Index m_ = 0;
    Index nv_ = 0;
    Index ntot_ = 0;
    Index nart_ = 0;
    Matrix a_;
    Vector b_;
    Vector lo_;
    Vector up_;
    Vector cost_;
    Matrix t_;
    Vector x_;
    std::vector<Index> head_;
    std::vector<VarState> state_;

    int iterations_ = 0;
    int limit_ = 0;
    int streak_ = 0;
    int since_refactor_ = 0;
    bool bland_ = false;
    bool bland_ever_ = false;
    double dtol_ = 0.0;
};

VarState Tableau::state_at(Index j, double value) const {
    if (lo_(j) == up_(j)) return VarState::Fixed;
    if (value == lo_(j)) return VarState::AtLower;
    if (value == up_(j)) return VarState::AtUpper;
    return VarState::Free;
}

void Tableau::setup() {
    m_ = prob_.num_rows();
    nv_ = prob_.num_vars();
    limit_ = opt_.max_iterations > 0 ? opt_.max_iterations : static_cast<int>(50 * (m_ + nv_));
    limit_ = std::max(limit_, 50);

    Vector xs(nv_);
    for (Index j = 0; j < nv_; ++j) {
        const double lo = prob_.lower(j);
        const double up = prob_.upper(j);
        xs(j) = std::isfinite(lo) ? lo : (std::isfinite(up) ? up : 0.0);
    }
    const Vector resid = m_ > 0 ? Vector(prob_.rhs - prob_.constraints * xs) : Vector(0);

    Vector slo(m_), sup(m_), sval(m_), sign(m_);
    std::vector<bool> needs_art(static_cast<std::size_t>(m_), false);
    for (Index i = 0; i < m_; ++i) {
        switch (prob_.senses[static_cast<std::size_t>(i)]) {
        case Sense::LessEqual: slo(i) = 0.0; sup(i) = kInfinity; break;
        case Sense::GreaterEqual: slo(i) = -kInfinity; sup(i) = 0.0; break;
        case Sense::Equal: slo(i) = 0.0; sup(i) = 0.0; break;
        }
        sval(i) = std::clamp(resid(i), slo(i), sup(i));
        sign(i) = resid(i) >= sval(i) ? 1.0 : -1.0;
        if (resid(i) != sval(i)) {
            needs_art[static_cast<std::size_t>(i)] = true;
            ++nart_;
        }
    }

    ntot_ = nv_ + m_ + nart_;
    a_ = Matrix::Zero(m_, ntot_);
    if (m_ > 0) a_.leftCols(nv_) = prob_.constraints;
    a_.block(0, nv_, m_, m_).setIdentity();
    b_ = prob_.rhs;
    lo_.resize(ntot_);
    up_.resize(ntot_);
    x_ = Vector::Zero(ntot_);
    state_.assign(static_cast<std::size_t>(ntot_), VarState::AtLower);
    head_.assign(static_cast<std::size_t>(m_), 0);

    lo_.head(nv_) = prob_.lower;
    up_.head(nv_) = prob_.upper;
    x_.head(nv_) = xs;
    for (Index j = 0; j < nv_; ++j) state_[static_cast<std::size_t>(j)] = state_at(j, xs(j));

    t_ = a_;
    Index art = nv_ + m_;
    for (Index i = 0; i < m_; ++i) {
        const Index s = nv_ + i;
        lo_(s) = slo(i);
        up_(s) = sup(i);
        if (!needs_art[static_cast<std::size_t>(i)]) {
            x_(s) = resid(i);
            state_[static_cast<std::size_t>(s)] = VarState::Basic;
            head_[static_cast<std::size_t>(i)] = s;
            continue;
        }
        x_(s) = sval(i);
        state_[static_cast<std::size_t>(s)] = state_at(s, sval(i));
        a_(i, art) = sign(i);
        t_(i, art) = sign(i);
        t_.row(i) *= sign(i);
        lo_(art) = 0.0;
        up_(art) = kInfinity;
        x_(art) = std::abs(resid(i) - sval(i));
        state_[static_cast<std::size_t>(art)] = VarState::Basic;
        head_[static_cast<std::size_t>(i)] = art;
        ++art;
    }
    cost_ = Vector::Zero(ntot_);
}

void Tableau::set_phase_costs(bool phase_one) {
    cost_.setZero();
    if (phase_one) {
        cost_.tail(nart_).setOnes();
        dtol_ = opt_.tol.lp_optimality;
    } else {
        const double sgn = prob_.direction == Direction::Minimize ? 1.0 : -1.0;
        cost_.head(nv_) = sgn * prob_.objective;
        const double scale = nv_ > 0 ? prob_.objective.cwiseAbs().maxCoeff() : 0.0;
        dtol_ = opt_.tol.lp_optimality * (1.0 + scale);
    }
}

Vector Tableau::reduced_costs() const {
    Vector cb(m_);
    for (Index r = 0; r < m_; ++r) cb(r) = cost_(head_[static_cast<std::size_t>(r)]);
    return cost_ - t_.transpose() * cb;
}

Index Tableau::choose_entering(const Vector& d, int& dir) const {
    Index best = -1;
    double best_mag = 0.0;
    for (Index j = 0; j < ntot_; ++j) {
        int cand = 0;
        switch (state_[static_cast<std::size_t>(j)]) {
        case VarState::Basic:
        case VarState::Fixed: continue;
        case VarState::AtLower: if (d(j) < -dtol_) cand = 1; break;
        case VarState::AtUpper: if (d(j) > dtol_) cand = -1; break;
        case VarState::Free:
            if (std::abs(d(j)) > dtol_) cand = d(j) < 0.0 ? 1 : -1;
            break;
        }
        if (cand == 0) continue;
        if (bland_) {
            dir = cand;
            return j;
        }
        if (std::abs(d(j)) > best_mag) {
            best_mag = std::abs(d(j));
            best = j;
            dir = cand;
        }
    }
    return best;
}

double Tableau::pivot_tolerance(Index col) const {
    const double colmax = m_ > 0 ? t_.col(col).cwiseAbs().maxCoeff() : 0.0;
    return opt_.tol.lp_pivot * std::max(1.0, colmax);
}

Index Tableau::ratio_test(Index col, int dir, double& step, bool& to_upper) const {
    const double ptol = pivot_tolerance(col);
    Index leave = -2;
    step = kInfinity;
    if (std::isfinite(lo_(col)) && std::isfinite(up_(col))) {
        step = up_(col) - lo_(col);
        leave = -1;
    }
    for (Index r = 0; r < m_; ++r) {
        const double alpha = t_(r, col);
        if (std::abs(alpha) <= ptol) continue;
        const double delta = -dir * alpha;
        const Index h = head_[static_cast<std::size_t>(r)];
        double lim;
        bool upper_hit;
        if (delta < 0.0) {
            if (!std::isfinite(lo_(h))) continue;
            lim = std::max(0.0, x_(h) - lo_(h)) / -delta;
            upper_hit = false;
        } else {
            if (!std::isfinite(up_(h))) continue;
            lim = std::max(0.0, up_(h) - x_(h)) / delta;
            upper_hit = true;
        }
        const double tie = 1e-12 * (1.0 + (std::isfinite(step) ? step : 0.0));
        bool take = false;
        if (lim < step - tie) {
            take = true;
        } else if (std::abs(lim - step) <= tie && leave >= 0 && bland_ &&
                   h < head_[static_cast<std::size_t>(leave)]) {
            take = true;
        }
        if (take) {
            step = lim;
            leave = r;
            to_upper = upper_hit;
        }
    }
    return leave;
}

void Tableau::pivot(Index row, Index col) {
    const double piv = t_(row, col);
    t_.row(row) /= piv;
    Vector factor = t_.col(col);
    factor(row) = 0.0;
    const Eigen::RowVectorXd prow = t_.row(row);
    t_.noalias() -= factor * prow;
    t_.col(col).setZero();
    t_(row, col) = 1.0;

    const Index leaving = head_[static_cast<std::size_t>(row)];
    head_[static_cast<std::size_t>(row)] = col;
    state_[static_cast<std::size_t>(col)] = VarState::Basic;
    // The caller places the leaving variable on its bound.
    state_[static_cast<std::size_t>(leaving)] = state_at(leaving, x_(leaving));
    ++since_refactor_;
}

void Tableau::apply_step(Index col, int dir, double step, Index row, bool to_upper) {
    if (step > 0.0) {
        x_(col) += dir * step;
        for (Index r = 0; r < m_; ++r) {
            x_(head_[static_cast<std::size_t>(r)]) -= dir * step * t_(r, col);
        }
    }
    if (row == -1) {
        x_(col) = dir > 0 ? up_(col) : lo_(col);
        state_[static_cast<std::size_t>(col)] = state_at(col, x_(col));
        return;
    }
    const Index leaving = head_[static_cast<std::size_t>(row)];
    x_(leaving) = to_upper ? up_(leaving) : lo_(leaving);
    pivot(row, col);
}

void Tableau::refactor() {
    since_refactor_ = 0;
    if (m_ == 0) return;
    Matrix basis(m_, m_);
    for (Index r = 0; r < m_; ++r) basis.col(r) = a_.col(head_[static_cast<std::size_t>(r)]);
    Eigen::FullPivLU<Matrix> lu(basis);
    if (!lu.isInvertible()) {
        throw NumericalError("simplex: basis matrix became singular");
    }
    t_ = lu.solve(a_);
    Vector xn = x_;
    for (Index r = 0; r < m_; ++r) xn(head_[static_cast<std::size_t>(r)]) = 0.0;
    const Vector xb = lu.solve(Vector(b_ - a_ * xn));
    for (Index r = 0; r < m_; ++r) x_(head_[static_cast<std::size_t>(r)]) = xb(r);
}

PhaseResult Tableau::iterate() {
    bool fresh = false;
    for (;;) {
        if (since_refactor_ >= opt_.refactor_every) {
            refactor();
            fresh = true;
        }
        const Vector d = reduced_costs();
        int dir = 0;
        const Index enter = choose_entering(d, dir);
        if (enter < 0) {
            if (fresh) return PhaseResult::Optimal;
            refactor();
            fresh = true;
            continue;
        }
        fresh = false;

        double step = 0.0;
        bool to_upper = false;
        const Index row = ratio_test(enter, dir, step, to_upper);
        if (row == -2) return PhaseResult::Unbounded;

        apply_step(enter, dir, step, row, to_upper);

        if (step <= 1e-12) {
            if (++streak_ > opt_.degenerate_streak) {
                bland_ = true;
                bland_ever_ = true;
            }
        } else {
            streak_ = 0;
            bland_ = false;
        }
        if (++iterations_ > limit_) {
            std::ostringstream msg;
            msg << "simplex: iteration limit " << limit_ << " reached (" << m_ << " rows, "
                << nv_ << " variables)";
            throw IterationLimitError(msg.str());
        }
    }
}

void Tableau::drive_out_artificials() {
    for (Index r = 0; r < m_; ++r) {
        if (!is_artificial(head_[static_cast<std::size_t>(r)])) continue;
        Index best = -1;
        double best_mag = 0.0;
        for (Index j = 0; j < nv_ + m_; ++j) {
            if (state_[static_cast<std::size_t>(j)] == VarState::Basic) continue;
            const double mag = std::abs(t_(r, j));
            if (mag > pivot_tolerance(j) && mag > best_mag) {
                best_mag = mag;
                best = j;
            }
        }
        if (best < 0) continue; // redundant row; the artificial stays basic at zero
        x_(head_[static_cast<std::size_t>(r)]) = 0.0;
        pivot(r, best);
    }
    refactor();
}

bool Tableau::push_free_variables() {
    bool moved = false;
    const Vector d = reduced_costs();
    for (Index j = 0; j < nv_; ++j) {
        if (state_[static_cast<std::size_t>(j)] != VarState::Free) continue;
        const int first = d(j) > 0.0 ? -1 : 1;
        for (int dir : {first, -first}) {
            double step = 0.0;
            bool to_upper = false;
            const Index row = ratio_test(j, dir, step, to_upper);
            if (row < 0) continue;
            apply_step(j, dir, step, row, to_upper);
            moved = true;
            break;
        }
    }
    if (moved) refactor();
    return moved;
}

LpSolution Tableau::run() {
    LpSolution sol;
    const Vector bscale = b_.cwiseAbs();
    const double feas_scale = 1.0 + (m_ > 0 ? bscale.maxCoeff() : 0.0);

    if (nart_ > 0) {
        set_phase_costs(true);
        if (iterate() == PhaseResult::Unbounded) {
            throw NumericalError("simplex: phase one reported unbounded");
        }
        const double infeas = x_.tail(nart_).sum();
        if (infeas > opt_.tol.lp_feasibility * feas_scale) {
            sol.status = LpStatus::Infeasible;
            sol.x = x_.head(nv_);
            sol.objective = std::numeric_limits<double>::quiet_NaN();
            sol.iterations = iterations_;
            return sol;
        }
        for (Index j = nv_ + m_; j < ntot_; ++j) {
            up_(j) = 0.0;
            if (state_[static_cast<std::size_t>(j)] != VarState::Basic) {
                x_(j) = 0.0;
                state_[static_cast<std::size_t>(j)] = VarState::Fixed;
            }
        }
        drive_out_artificials();
    }

    set_phase_costs(false);
    streak_ = 0;
    bland_ = false;
    for (;;) {
        if (iterate() == PhaseResult::Unbounded) {
            sol.status = LpStatus::Unbounded;
            sol.x = x_.head(nv_);
            sol.objective = prob_.direction == Direction::Minimize ? -kInfinity : kInfinity;
            sol.iterations = iterations_;
            sol.bland_engaged = bland_ever_;
            return sol;
        }
        if (!push_free_variables()) break;
    }
    refactor();

    sol.status = LpStatus::Optimal;
    sol.x = x_.head(nv_);
    sol.objective = nv_ > 0 ? prob_.objective.dot(sol.x) : 0.0;
    sol.iterations = iterations_;
    sol.bland_engaged = bland_ever_;

    Vector cb(m_);
    for (Index r = 0; r < m_; ++r) {
        const Index h = head_[static_cast<std::size_t>(r)];
        cb(r) = cost_(h);
        if (!is_artificial(h)) sol.basis.push_back(h);
        if (is_artificial(h)) continue;
        const double v = x_(h);
        const double ftol = opt_.tol.lp_feasibility;
        if ((std::isfinite(lo_(h)) && std::abs(v - lo_(h)) <= ftol * (1.0 + std::abs(lo_(h)))) ||
            (std::isfinite(up_(h)) && std::abs(v - up_(h)) <= ftol * (1.0 + std::abs(up_(h))))) {
            sol.degenerate = true;
        }
    }
    std::sort(sol.basis.begin(), sol.basis.end());

    Vector y = Vector::Zero(m_);
    if (m_ > 0) {
        Matrix basis(m_, m_);
        for (Index r = 0; r < m_; ++r) basis.col(r) = a_.col(head_[static_cast<std::size_t>(r)]);
        y = Eigen::FullPivLU<Matrix>(basis.transpose()).solve(cb);
    }
    const double sgn = prob_.direction == Direction::Minimize ? 1.0 : -1.0;
    sol.duals = sgn * y;
    sol.reduced_costs = m_ > 0 ? Vector(prob_.objective - prob_.constraints.transpose() * sol.duals)
                               : Vector(prob_.objective);
    return sol;
}

} // namespace

LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options) {
    problem.validate();
    Tableau tableau(problem, options);
    return tableau.run();
}

LpCertificate certify_solution(const LpProblem& problem, const LpSolution& solution,
                               const Tolerances& tol) {
    problem.validate();
    LpCertificate cert;
    const Index m = problem.num_rows();
    const Index nv = problem.num_vars();
    if (solution.status != LpStatus::Optimal) {
        cert.violations.emplace_back(std::string("solution status is ") + to_string(solution.status));
        return cert;
    }
    if (solution.x.size() != nv || solution.duals.size() != m) {
        cert.violations.emplace_back("solution dimensions do not match the problem");
        return cert;
    }
    const Vector& x = solution.x;
    const double sgn = problem.direction == Direction::Minimize ? 1.0 : -1.0;
    const Vector c = sgn * problem.objective;
    const Vector y = sgn * solution.duals;
    const Vector activity = m > 0 ? Vector(problem.constraints * x) : Vector(0);
    const Vector d = m > 0 ? Vector(c - problem.constraints.transpose() * y) : c;

    const double cscale = 1.0 + (nv > 0 ? c.cwiseAbs().maxCoeff() : 0.0);
    const double dtol = tol.lp_optimality * 10.0 * cscale;
    auto report = [&](const std::string& what, Index k, double amount) {
        std::ostringstream msg;
        msg << what << " " << k << " by " << amount;
        cert.violations.push_back(msg.str());
    };

    for (Index i = 0; i < m; ++i) {
        const double slack = problem.rhs(i) - activity(i);
        const double ftol = tol.lp_feasibility * (1.0 + std::abs(problem.rhs(i)));
        double viol = 0.0;
        double dual_viol = 0.0;
        switch (problem.senses[static_cast<std::size_t>(i)]) {
        case Sense::LessEqual: viol = std::max(0.0, -slack); dual_viol = std::max(0.0, y(i)); break;
        case Sense::GreaterEqual: viol = std::max(0.0, slack); dual_viol = std::max(0.0, -y(i)); break;
        case Sense::Equal: viol = std::abs(slack); break;
        }
        cert.primal_infeasibility = std::max(cert.primal_infeasibility, viol);
        if (viol > ftol) report("row infeasible:", i, viol);
        cert.dual_infeasibility = std::max(cert.dual_infeasibility, dual_viol);
        if (dual_viol > dtol) report("row multiplier has wrong sign:", i, dual_viol);
        const double comp = std::abs(y(i) * slack);
        cert.complementarity = std::max(cert.complementarity, comp);
        if (comp > dtol * (1.0 + std::abs(problem.rhs(i)))) report("row complementarity:", i, comp);
    }

    double dual_obj = m > 0 ? problem.rhs.dot(y) : 0.0;
    for (Index j = 0; j < nv; ++j) {
        const double lo = problem.lower(j);
        const double up = problem.upper(j);
        const double ftol = tol.lp_feasibility * (1.0 + std::abs(x(j)));
        const double bviol = std::max({0.0, lo - x(j), x(j) - up});
        cert.primal_infeasibility = std::max(cert.primal_infeasibility, bviol);
        if (bviol > ftol) report("bound violated for variable", j, bviol);

        if (d(j) > dtol) {
            if (!std::isfinite(lo)) {
                cert.dual_infeasibility = std::max(cert.dual_infeasibility, d(j));
                report("positive reduced cost without lower bound, variable", j, d(j));
                continue;
            }
            const double comp = d(j) * (x(j) - lo);
            cert.complementarity = std::max(cert.complementarity, std::abs(comp));
            if (std::abs(comp) > dtol * (1.0 + std::abs(lo))) report("variable complementarity:", j, comp);
            dual_obj += d(j) * lo;
        } else if (d(j) < -dtol) {
            if (!std::isfinite(up)) {
                cert.dual_infeasibility = std::max(cert.dual_infeasibility, -d(j));
                report("negative reduced cost without upper bound, variable", j, -d(j));
                continue;
            }
            const double comp = d(j) * (x(j) - up);
            cert.complementarity = std::max(cert.complementarity, std::abs(comp));
            if (std::abs(comp) > dtol * (1.0 + std::abs(up))) report("variable complementarity:", j, comp);
            dual_obj += d(j) * up;
        } else {
            dual_obj += d(j) * x(j);
        }
    }
    const double primal_obj = nv > 0 ? c.dot(x) : 0.0;
    cert.dual_objective = sgn * dual_obj;
    cert.duality_gap = std::abs(primal_obj - dual_obj);
    if (cert.duality_gap > tol.lp_optimality * 10.0 * (1.0 + std::abs(primal_obj))) {
        std::ostringstream msg;
        msg << "duality gap " << cert.duality_gap << " (primal " << sgn * primal_obj
            << ", dual " << cert.dual_objective << ")";
        cert.violations.push_back(msg.str());
    }
    cert.passed = cert.violations.empty();
    return cert;
}

} // namespace aerq
