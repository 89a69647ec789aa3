#include "lqgame/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

namespace lqgame {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidInput(std::string(what) + ": non-finite entries");
  }
}

SymMatrix::SymMatrix(const Matrix& raw, double max_defect) {
  if (raw.rows() != raw.cols()) {
    throw InvalidInput("SymMatrix: input is not square");
  }
  require_finite(raw, "SymMatrix");
  defect_ = raw.size() == 0 ? 0.0 : (raw - raw.transpose()).cwiseAbs().maxCoeff();
  if (defect_ > max_defect) {
    throw InvalidInput("SymMatrix: asymmetry defect " + std::to_string(defect_) +
                       " exceeds " + std::to_string(max_defect));
  }
  mat_ = 0.5 * (raw + raw.transpose());
}

SymMatrix SymMatrix::Zero(Eigen::Index n) { return FromSymmetric(Matrix::Zero(n, n)); }

SymMatrix SymMatrix::Identity(Eigen::Index n) {
  return FromSymmetric(Matrix::Identity(n, n));
}

SymMatrix SymMatrix::FromSymmetric(Matrix m) {
  SymMatrix s;
  s.mat_ = std::move(m);
  s.defect_ = 0.0;
  return s;
}

double SymMatrix::min_eigenvalue() const {
  if (dim() == 0) return 0.0;
  return eigenvalues().minCoeff();
}

double SymMatrix::max_eigenvalue() const {
  if (dim() == 0) return 0.0;
  return eigenvalues().maxCoeff();
}

Vector SymMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Matrix pseudo_inverse(const Matrix& m, double tol) {
  if (tol <= 0) throw InvalidInput("pseudo_inverse: tol must be positive");
  require_finite(m, "pseudo_inverse");
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = tol * std::max(sigma.size() > 0 ? sigma(0) : 0.0, 1.0);
  Vector inv = Vector::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) inv(i) = 1.0 / sigma(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix pseudo_inverse(const SymMatrix& m, double tol) {
  if (tol <= 0) throw InvalidInput("pseudo_inverse: tol must be positive");
  if (m.dim() == 0) return Matrix(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  const Vector& lam = es.eigenvalues();
  const double cutoff = tol * std::max(lam.cwiseAbs().maxCoeff(), 1.0);
  Vector inv = Vector::Zero(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (std::abs(lam(i)) > cutoff) inv(i) = 1.0 / lam(i);
  }
  Matrix p = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (p + p.transpose());
}

int symmetric_rank(const SymMatrix& m, double tol) {
  if (m.dim() == 0) return 0;
  Vector lam = m.eigenvalues();
  const double cutoff = tol * std::max(lam.cwiseAbs().maxCoeff(), 1.0);
  int r = 0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (std::abs(lam(i)) > cutoff) ++r;
  }
  return r;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return k;
}

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw InvalidInput("unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix lyapunov_operator_matrix(const Matrix& a, const Matrix& c) {
  if (a.rows() != a.cols() || c.rows() != c.cols() || a.rows() != c.rows()) {
    throw InvalidInput("lyapunov_operator_matrix: A, C must be square with equal dims");
  }
  const Eigen::Index n = a.rows();
  const Matrix eye = Matrix::Identity(n, n);
  return kron(a.transpose(), eye) + kron(eye, a.transpose()) +
         kron(c.transpose(), c.transpose());
}

bool is_psd(const SymMatrix& x, double tol) {
  if (tol < 0) throw InvalidInput("is_psd: tol must be nonnegative");
  if (x.dim() == 0) return true;
  return x.min_eigenvalue() >= -tol;
}

bool is_pd(const SymMatrix& x, double tol) {
  if (tol < 0) throw InvalidInput("is_pd: tol must be nonnegative");
  if (x.dim() == 0) return true;
  return x.min_eigenvalue() > tol;
}

bool extended_schur_holds(const SymMatrix& m, const Matrix& l,
                          const SymMatrix& n, double tol) {
  if (l.rows() != m.dim() || l.cols() != n.dim()) {
    throw InvalidInput("extended_schur_holds: block dims do not conform");
  }
  const Eigen::Index nn = m.dim() + n.dim();
  Matrix block(nn, nn);
  block.topLeftCorner(m.dim(), m.dim()) = m.mat();
  block.topRightCorner(m.dim(), n.dim()) = l;
  block.bottomLeftCorner(n.dim(), m.dim()) = l.transpose();
  block.bottomRightCorner(n.dim(), n.dim()) = n.mat();
  return is_psd(SymMatrix(block), tol);
}

double spectral_abscissa(const Matrix& k) {
  if (k.rows() != k.cols()) throw InvalidInput("spectral_abscissa: matrix not square");
  if (k.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Matrix> es(k, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

}  // namespace lqgame
