#include "dcurv/quadric_fit.hpp"

#include "dcurv/error.hpp"

#include <cmath>

namespace dcurv {

Matrix quadric_features(const Matrix& xs) {
    const Eigen::Index k = xs.cols();
    Matrix a(xs.rows(), k * (k + 1) / 2);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i; j < k; ++j) a.col(col++) = xs.col(i).cwiseProduct(xs.col(j));
    return a;
}

Quadric ls_quadric_fit(const Matrix& xs, const Vector& ys, double ridge) {
    require(xs.cols() >= 1, ErrorKind::InvalidInput, "quadric fit needs at least one coordinate");
    require(xs.rows() == ys.size(), ErrorKind::ShapeMismatch, "xs and ys disagree on the number of samples");
    require(std::isfinite(ridge) && ridge >= 0.0, ErrorKind::InvalidInput, "ridge must be >= 0");
    require(xs.allFinite() && ys.allFinite(), ErrorKind::NonFiniteValue, "non-finite sample");
    const auto k = static_cast<Index>(xs.cols());
    const auto p = static_cast<Eigen::Index>(triangle_size(k));
    require(ridge > 0.0 || xs.rows() >= p, ErrorKind::InvalidInput, "fewer samples than monomials");

    const Matrix a = quadric_features(xs);
    Vector coef;
    if (ridge > 0.0) {
        Matrix normal = a.transpose() * a;
        normal.diagonal().array() += ridge;
        coef = normal.ldlt().solve(a.transpose() * ys);
    } else {
        Eigen::ColPivHouseholderQR<Matrix> qr(a);
        if (qr.rank() < p) fail(ErrorKind::RankDeficient, "monomial design has rank " + std::to_string(qr.rank()) +
                                                             " < " + std::to_string(p));
        coef = qr.solve(ys);
    }

    Quadric out{Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)), k};
    Eigen::Index pos = 0;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k); ++i) {
        for (Eigen::Index j = i; j < static_cast<Eigen::Index>(k); ++j) {
            const double v = i == j ? coef(pos) : 0.5 * coef(pos);
            out.q(i, j) = v;
            out.q(j, i) = v;
            ++pos;
        }
    }
    return out;
}

}  // namespace dcurv
