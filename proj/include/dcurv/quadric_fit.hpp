#pragma once

#include "dcurv/manifold_gen.hpp"
#include "dcurv/types.hpp"

namespace dcurv {

/// Least-squares fit of y = x^T Q x over the monomials x_a x_b (a <= b).
/// Off-diagonal coefficients are halved into Q so the form is reproduced exactly.
/// ridge > 0 adds Tikhonov regularization; with ridge = 0 a rank-deficient
/// design throws RankDeficient.
Quadric ls_quadric_fit(const Matrix& xs, const Vector& ys, double ridge = 0.0);

/// Design matrix with one column per monomial, ordered as upper_triangle().
Matrix quadric_features(const Matrix& xs);

}  // namespace dcurv
