#include "elast/linalg.hpp"

#include <cmath>
#include <sstream>

namespace elast {

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw ShapeError(std::string(what) + ": non-finite entries");
  }
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw ShapeError(std::string(what) + ": non-finite entries");
  }
}

namespace {

// Validates squareness/symmetry and returns the symmetrized matrix.
Matrix checked_symmetric(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << who << ": expected square matrix, got " << a.rows() << "x" << a.cols();
    throw ShapeError(msg.str());
  }
  require_finite(a, who);
  const double scale = std::max(1.0, a.norm());
  const double skew = (a - a.transpose()).norm();
  if (skew > kSymmetryTol * scale) {
    std::ostringstream msg;
    msg << who << ": matrix asymmetric, |A - A^T| = " << skew << " exceeds " << kSymmetryTol
        << " relative";
    throw ShapeError(msg.str());
  }
  return 0.5 * (a + a.transpose());
}

}  // namespace

SymEig sym_eig(const Matrix& a) {
  const Matrix sym = checked_symmetric(a, "sym_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw SingularityError("sym_eig: eigendecomposition failed to converge");
  }
  return SymEig{solver.eigenvalues(), solver.eigenvectors()};
}

Matrix sym_expm_neg(const Matrix& a, double t) {
  if (t < 0.0 || !std::isfinite(t)) {
    throw ParameterError("sym_expm_neg: time must be finite and >= 0");
  }
  const SymEig eig = sym_eig(a);
  const Vector scaled = (-t * eig.eigenvalues.array()).exp().matrix();
  Matrix result = eig.eigenvectors * scaled.asDiagonal() * eig.eigenvectors.transpose();
  return 0.5 * (result + result.transpose());
}

Vector solve_spd(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) {
    throw ShapeError("solve_spd: rhs dimension does not match matrix");
  }
  require_finite(b, "solve_spd rhs");
  const SymEig eig = sym_eig(a);
  const double min_eig = eig.eigenvalues(0);
  if (min_eig <= kPdEigenvalueFloor) {
    std::ostringstream msg;
    msg << "solve_spd: matrix not positive definite, minimum eigenvalue " << min_eig;
    throw SingularityError(msg.str());
  }
  const Vector projected = eig.eigenvectors.transpose() * b;
  return eig.eigenvectors * (projected.array() / eig.eigenvalues.array()).matrix();
}

bool is_pd(const Matrix& a) {
  const SymEig eig = sym_eig(a);
  return eig.eigenvalues(0) > kPdEigenvalueFloor;
}

}  // namespace elast
