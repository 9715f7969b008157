#pragma once

#include "dropgp/matrix.hpp"

namespace dropgp {

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
// Throws std::invalid_argument when a pivot falls below 1e-12 times the
// largest diagonal entry (matrix treated as singular).
Matrix cholesky(const Matrix& a);

// log |A| via the Cholesky factor.
double logdet_spd(const Matrix& a);

// Solve L y = b with L lower triangular.
Vec forward_solve(const Matrix& l, const Vec& b);

} // namespace dropgp
