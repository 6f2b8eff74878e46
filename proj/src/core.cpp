#include "aerq/core.hpp"

#include <cmath>
#include <sstream>

namespace aerq {

bool Tolerances::leq(double a, double b) const {
    return a <= b + absolute + relative * std::max(std::abs(a), std::abs(b));
}

bool Tolerances::close(double a, double b) const {
    return leq(a, b) && leq(b, a);
}

Vector QuantileFit::coefficients() const {
    Vector out(slopes.size() + 1);
    out(0) = beta0;
    out.tail(slopes.size()) = slopes;
    return out;
}

bool operator==(const Dataset& a, const Dataset& b) {
    return a.y_.size() == b.y_.size() && a.x_.rows() == b.x_.rows() &&
           a.x_.cols() == b.x_.cols() && a.y_ == b.y_ && a.x_ == b.x_;
}

Dataset validate_dataset(Vector y, Matrix x, SizeMode mode, const Tolerances& tol) {
    const Index n = y.size();
    if (x.rows() != n) {
        std::ostringstream msg;
        msg << "dimension mismatch: " << n << " responses but " << x.rows()
            << " regressor rows";
        throw InputError(msg.str());
    }
    const Index p = x.cols();
    if (!y.allFinite()) {
        throw InputError("non-finite entry in responses");
    }
    if (!x.allFinite()) {
        throw InputError("non-finite entry in regressors");
    }
    const Index min_n = mode == SizeMode::Strict ? p + 2 : p + 1;
    if (n < min_n) {
        std::ostringstream msg;
        msg << "need at least " << min_n << " observations for p = " << p
            << ", got " << n;
        throw InputError(msg.str());
    }

    Matrix design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = x;

    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    qr.setThreshold(tol.rank_pivot);
    if (qr.rank() < p + 1) {
        std::ostringstream msg;
        msg << "rank-deficient design: rank " << qr.rank() << " < " << p + 1
            << " (intercept column included)";
        throw InputError(msg.str());
    }

    Dataset d;
    d.design_sum_ = design.colwise().sum().transpose();
    d.design_mean_ = d.design_sum_ / static_cast<double>(n);
    d.design_mean_(0) = 1.0;
    d.x_mean_ = d.design_mean_.tail(p);
    d.mean_y_ = y.mean();
    d.max_y_ = y.maxCoeff();
    d.y_ = std::move(y);
    d.x_ = std::move(x);
    d.design_ = std::move(design);
    d.mode_ = mode;
    return d;
}

Dataset revalidate(const Dataset& data, const Tolerances& tol) {
    return validate_dataset(data.y(), data.x(), data.size_mode(), tol);
}

LinearSolveResult solve_square_system(const Matrix& a, const Vector& b,
                                      const Tolerances& tol) {
    if (a.rows() != a.cols() || a.rows() != b.size()) {
        throw InputError("solve_square_system: expected a square matrix and a matching vector");
    }
    if (!a.allFinite() || !b.allFinite()) {
        throw InputError("solve_square_system: non-finite entry");
    }
    LinearSolveResult out;
    if (a.rows() == 0) {
        out.solution = Vector(0);
        out.rcond = 1.0;
        out.pivot_ratio = 1.0;
        return out;
    }
    Eigen::FullPivLU<Matrix> lu(a);
    const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double largest = pivots.maxCoeff();
    out.pivot_ratio = largest > 0.0 ? pivots.minCoeff() / largest : 0.0;
    if (!(out.pivot_ratio >= tol.rank_pivot)) {
        out.pivot_ratio = largest > 0.0 ? out.pivot_ratio : 0.0;
        return out;
    }
    out.rcond = lu.rcond();
    out.solution = lu.solve(b);
    return out;
}

Vector solve_or_throw(const Matrix& a, const Vector& b, const Tolerances& tol,
                      const char* what) {
    auto res = solve_square_system(a, b, tol);
    if (res.singular()) {
        std::ostringstream msg;
        msg << what << ": singular matrix (pivot ratio " << res.pivot_ratio << ")";
        throw SingularMatrixError(msg.str());
    }
    return *std::move(res.solution);
}

Matrix select_rows(const Matrix& m, const std::vector<Index>& rows) {
    Matrix out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.row(static_cast<Index>(k)) = m.row(rows[k]);
    }
    return out;
}

} // namespace aerq
