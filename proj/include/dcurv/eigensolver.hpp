#pragma once

#include "dcurv/types.hpp"

namespace dcurv {

/// Eigenpairs of a symmetric matrix, values in descending order.
struct SymmetricEigenpairs {
    Vector values;
    Matrix vectors;  ///< orthonormal columns
};

/// Full decomposition. Ties in value keep the solver's original order.
SymmetricEigenpairs dense_symmetric_eigenpairs(const Matrix& s);

/// Leading `count` eigenpairs (largest algebraic) by thick-restart Lanczos with full
/// reorthogonalization. Throws ConvergenceFailure with the worst residual norm when
/// `max_restarts` restarts do not bring every residual below tolerance * ||s||.
SymmetricEigenpairs lanczos_top_eigenpairs(const Matrix& s, Index count, double tolerance = 1e-10,
                                           Index max_restarts = 500, Index basis_size = 0);

}  // namespace dcurv
