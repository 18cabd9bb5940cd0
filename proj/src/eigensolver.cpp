#include "dcurv/eigensolver.hpp"

#include "dcurv/error.hpp"
#include "dcurv/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <vector>

namespace dcurv {

namespace {

SymmetricEigenpairs sorted_descending(const Vector& values, const Matrix& vectors, Index count) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values[a] > values[b]; });
    SymmetricEigenpairs out;
    const auto m = static_cast<Eigen::Index>(count);
    out.values.resize(m);
    out.vectors.resize(vectors.rows(), m);
    for (Eigen::Index j = 0; j < m; ++j) {
        out.values[j] = values[order[static_cast<std::size_t>(j)]];
        out.vectors.col(j) = vectors.col(order[static_cast<std::size_t>(j)]);
    }
    return out;
}

void orthogonalize(Eigen::Ref<Vector> v, const Matrix& basis, Eigen::Index cols) {
    if (cols == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
        const Vector coeffs = basis.leftCols(cols).transpose() * v;
        v -= basis.leftCols(cols) * coeffs;
    }
}

}  // namespace

SymmetricEigenpairs dense_symmetric_eigenpairs(const Matrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
    require(solver.info() == Eigen::Success, ErrorKind::ConvergenceFailure, "dense symmetric eigensolver failed");
    return sorted_descending(solver.eigenvalues(), solver.eigenvectors(), static_cast<Index>(s.rows()));
}

SymmetricEigenpairs lanczos_top_eigenpairs(const Matrix& s, Index count, double tolerance, Index max_restarts,
                                           Index basis_size) {
    const Eigen::Index n = s.rows();
    require(s.rows() == s.cols(), ErrorKind::InvalidInput, "matrix must be square");
    require(count >= 1 && count <= static_cast<Index>(n), ErrorKind::InvalidInput, "eigenpair count out of range");
    const auto m = static_cast<Eigen::Index>(count);
    Eigen::Index ncv = basis_size ? static_cast<Eigen::Index>(basis_size) : std::max(2 * m + 1, m + 20);
    ncv = std::min(ncv, n);
    if (ncv >= n || ncv <= m) {
        SymmetricEigenpairs full = dense_symmetric_eigenpairs(s);
        return {full.values.head(m), full.vectors.leftCols(m)};
    }

    const double scale = std::max(s.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
    Rng rng = make_rng(0x1a2c705);
    auto random_vector = [&] {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng, -1.0, 1.0);
        return v;
    };

    Matrix basis(n, ncv);
    Matrix image(n, ncv);
    Eigen::Index kept = 0;
    Vector next = random_vector();
    double worst = 0.0;

    for (Index restart = 0; restart <= max_restarts; ++restart) {
        for (Eigen::Index col = kept; col < ncv; ++col) {
            orthogonalize(next, basis, col);
            double norm = next.norm();
            for (int attempt = 0; norm < 1e-10 * scale && attempt < 8; ++attempt) {
                // invariant subspace reached; continue from a fresh direction
                next = random_vector();
                orthogonalize(next, basis, col);
                norm = next.norm();
            }
            basis.col(col) = next / norm;
            image.col(col) = s * basis.col(col);
            next = image.col(col);
        }

        Matrix projected = basis.transpose() * image;
        projected = 0.5 * (projected + projected.transpose());
        const SymmetricEigenpairs ritz = dense_symmetric_eigenpairs(projected);

        worst = 0.0;
        Eigen::Index first_unconverged = -1;
        Matrix residuals(n, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            residuals.col(j) = image * ritz.vectors.col(j) - ritz.values[j] * (basis * ritz.vectors.col(j));
            const double r = residuals.col(j).norm();
            worst = std::max(worst, r);
            if (r > tolerance * scale && first_unconverged < 0) first_unconverged = j;
        }
        if (first_unconverged < 0) {
            return {ritz.values.head(m), basis * ritz.vectors.leftCols(m)};
        }

        kept = std::min<Eigen::Index>(ncv - 1, m + (ncv - m) / 2);
        const Matrix y = ritz.vectors.leftCols(kept);
        const Matrix new_basis = basis * y;
        const Matrix new_image = image * y;
        basis.leftCols(kept) = new_basis;
        image.leftCols(kept) = new_image;
        next = residuals.col(first_unconverged);
    }
    fail(ErrorKind::ConvergenceFailure,
         "Lanczos did not converge; worst residual norm " + std::to_string(worst));
}

}  // namespace dcurv
