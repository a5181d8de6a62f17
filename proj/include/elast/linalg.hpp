#pragma once

// Dense symmetric linear algebra used by every closed-form expression:
// eigendecomposition, matrix exponentials e^{-At} of symmetric A, SPD
// solves and positive-definiteness checks. All matrices that occur here
// are symmetric (Gram-plus-ridge style), so the exponential is computed
// by eigendecomposition rather than general Pade machinery.

#include <Eigen/Dense>

#include "elast/errors.hpp"

namespace elast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative tolerance for accepting a matrix as symmetric; inputs within
// this tolerance are symmetrized as (A + A^T)/2 before decomposition.
inline constexpr double kSymmetryTol = 1e-10;

// Eigenvalue floor below which a symmetric matrix is treated as singular.
inline constexpr double kPdEigenvalueFloor = 1e-12;

struct SymEig {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthogonal, columns match eigenvalues
};

// Eigendecomposition of a symmetric matrix. A = Q diag(lambda) Q^T.
// Throws ShapeError if `a` is non-square, asymmetric beyond kSymmetryTol,
// or contains non-finite entries.
SymEig sym_eig(const Matrix& a);

// e^{-a t} for symmetric `a` and t >= 0, via Q diag(e^{-lambda t}) Q^T.
// The result is exactly symmetrized.
Matrix sym_expm_neg(const Matrix& a, double t);

// Solves a x = b for symmetric positive definite `a`. Throws
// SingularityError (naming the minimum eigenvalue) if the smallest
// eigenvalue is <= kPdEigenvalueFloor.
Vector solve_spd(const Matrix& a, const Vector& b);

// True iff the minimum eigenvalue of symmetric `a` exceeds kPdEigenvalueFloor.
bool is_pd(const Matrix& a);

// Throws ShapeError when any entry is NaN/Inf. `what` names the argument.
void require_finite(const Matrix& a, const char* what);
void require_finite(const Vector& v, const char* what);

}  // namespace elast
