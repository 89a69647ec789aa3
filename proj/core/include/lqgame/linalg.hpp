#pragma once

#include <Eigen/Dense>

#include "lqgame/errors.hpp"

namespace lqgame {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Throws InvalidInput if any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

/// Symmetric matrix with enforced symmetry and cheap spectral queries.
///
/// Construction averages the input with its transpose, so the stored matrix
/// is exactly symmetric. The asymmetry defect ||X - X^T||_inf of the raw
/// input is recorded; a defect above 1e-8 is rejected, since that magnitude
/// no longer looks like accumulated round-off.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& raw, double max_defect = 1e-8);

  static SymMatrix Zero(Eigen::Index n);
  static SymMatrix Identity(Eigen::Index n);
  /// Wraps a matrix that is already exactly symmetric by construction.
  static SymMatrix FromSymmetric(Matrix m);

  Eigen::Index dim() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }
  double asymmetry_defect() const { return defect_; }

  double min_eigenvalue() const;
  double max_eigenvalue() const;
  /// Eigenvalues in increasing order.
  Vector eigenvalues() const;

  double norm_inf() const { return mat_.size() == 0 ? 0.0 : mat_.cwiseAbs().maxCoeff(); }

 private:
  Matrix mat_;
  double defect_ = 0.0;
};

/// Moore-Penrose pseudo-inverse via SVD.
///
/// Singular values sigma_i <= tol * max(sigma_max, 1) are treated as zero.
/// The floor at 1 makes a matrix whose entries are all numerically zero
/// come out as exactly rank 0 instead of inverting round-off; data here is
/// O(1)-scaled, so below tol the entries are indistinguishable from zero.
Matrix pseudo_inverse(const Matrix& m, double tol = 1e-9);

/// Pseudo-inverse of a symmetric matrix through its eigendecomposition;
/// the result is symmetric to machine precision and commutes with the input.
Matrix pseudo_inverse(const SymMatrix& m, double tol = 1e-9);

/// Rank of a symmetric matrix under the same cutoff as pseudo_inverse.
int symmetric_rank(const SymMatrix& m, double tol = 1e-9);

/// Kronecker product A (x) B.
Matrix kron(const Matrix& a, const Matrix& b);

/// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

/// Matrix K of the vectorized map X -> XA + A^T X + C^T X C, i.e.
/// K vec(X) = vec(XA + A^T X + C^T X C) under column stacking:
/// K = A^T (x) I + I (x) A^T + C^T (x) C^T.
Matrix lyapunov_operator_matrix(const Matrix& a, const Matrix& c);

/// lambda_min(X) >= -tol.
bool is_psd(const SymMatrix& x, double tol = 1e-8);
/// lambda_min(X) > tol.
bool is_pd(const SymMatrix& x, double tol = 1e-8);

/// Positive semidefiniteness of the block matrix [[M, L], [L^T, N]].
/// Equivalent to: M - L N^+ L^T >= 0, N >= 0 and L(I - N N^+) = 0.
bool extended_schur_holds(const SymMatrix& m, const Matrix& l,
                          const SymMatrix& n, double tol = 1e-8);

/// Max real part of the eigenvalues of a general square matrix.
double spectral_abscissa(const Matrix& k);

}  // namespace lqgame
