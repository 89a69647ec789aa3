#include "support/oracles.hpp"

#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "lqgame/linalg.hpp"

namespace lqgame::testing {

std::vector<double> charpoly_eigenvalues(const SymMatrix& x) {
  const Eigen::Index n = x.dim();
  std::vector<double> roots;
  if (n == 1) {
    roots = {x(0, 0)};
  } else if (n == 2) {
    const double tr = x(0, 0) + x(1, 1);
    const double det = x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0);
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    roots = {(tr - disc) / 2.0, (tr + disc) / 2.0};
  } else if (n == 3) {
    // lambda^3 - c2 lambda^2 + c1 lambda - c0, all roots real (symmetric);
    // trigonometric solution of the depressed cubic
    const Matrix& a = x.mat();
    const double c2 = a.trace();
    const double c1 = 0.5 * (c2 * c2 - (a * a).trace());
    const double c0 = a.determinant();
    const double p = c1 - c2 * c2 / 3.0;
    const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    const double shift = c2 / 3.0;
    if (std::abs(p) < 1e-14) {
      const double r = std::cbrt(-q);
      roots = {r + shift, r + shift, r + shift};
    } else {
      const double mfac = 2.0 * std::sqrt(-p / 3.0);
      double arg = 3.0 * q / (p * mfac);
      arg = std::min(1.0, std::max(-1.0, arg));
      const double acos_v = std::acos(arg);
      for (int k = 0; k < 3; ++k) {
        roots.push_back(mfac * std::cos((acos_v - 2.0 * M_PI * k) / 3.0) + shift);
      }
    }
  } else {
    throw std::runtime_error("charpoly_eigenvalues: dim must be <= 3");
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

namespace {

using ComplexMatrix = Eigen::MatrixXcd;

struct ExpCache {
  ComplexMatrix v;
  ComplexMatrix v_inv;
  Eigen::VectorXcd lam;

  explicit ExpCache(const Matrix& m) {
    Eigen::EigenSolver<Matrix> es(m);
    v = es.eigenvectors();
    lam = es.eigenvalues();
    v_inv = v.inverse();
  }

  Matrix exp_at(double tau) const {
    Eigen::VectorXcd e(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) e(i) = std::exp(lam(i) * tau);
    const ComplexMatrix r = v * e.asDiagonal() * v_inv;
    return r.real();
  }
};

}  // namespace

Vector stable_integral_quadrature(const Matrix& m, const ExpPoly& phi, double t,
                                  double span, int intervals) {
  if (intervals % 2 == 1) ++intervals;
  const ExpCache cache(m);
  const double h = span / intervals;
  Vector acc = Vector::Zero(m.rows());
  for (int j = 0; j <= intervals; ++j) {
    const double tau = j * h;
    const double w = (j == 0 || j == intervals) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    acc += w * (cache.exp_at(tau) * phi.eval(t + tau));
  }
  return acc * (h / 3.0);
}

double simpson_scalar(const ExpPoly& f, double span, int intervals) {
  if (intervals % 2 == 1) ++intervals;
  const double h = span / intervals;
  double acc = 0.0;
  for (int j = 0; j <= intervals; ++j) {
    const double w = (j == 0 || j == intervals) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    acc += w * f.eval_scalar(j * h);
  }
  return acc * (h / 3.0);
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                     double scale) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * gauss(rng);
  return m;
}

SymMatrix random_symmetric(std::mt19937_64& rng, Eigen::Index n, double scale) {
  const Matrix m = random_matrix(rng, n, n, scale);
  return SymMatrix::FromSymmetric(0.5 * (m + m.transpose()));
}

Matrix random_low_rank(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                       Eigen::Index rank) {
  return random_matrix(rng, rows, rank) * random_matrix(rng, rank, cols);
}

UncontrolledSystem random_stable_pair(std::mt19937_64& rng, Eigen::Index n,
                                      double margin) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Matrix a = random_matrix(rng, n, n);
    const Matrix c = random_matrix(rng, n, n, 0.3);
    // shift the drift until the mean-square generator clears the margin
    for (int shift = 0; shift < 60; ++shift) {
      const double abscissa = spectral_abscissa(lyapunov_operator_matrix(a, c));
      if (abscissa <= -margin) return UncontrolledSystem(a, c);
      a -= 0.5 * Matrix::Identity(n, n);
    }
  }
  throw std::runtime_error("random_stable_pair: rejection sampling failed");
}

double penrose_defect(const Matrix& m, const Matrix& pinv) {
  const auto inf_norm = [](const Matrix& x) {
    return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
  };
  double d = inf_norm(m * pinv * m - m);
  d = std::max(d, inf_norm(pinv * m * pinv - pinv));
  d = std::max(d, inf_norm(((m * pinv).transpose() - m * pinv).eval()));
  d = std::max(d, inf_norm(((pinv * m).transpose() - pinv * m).eval()));
  return d;
}

bool schur_condition_explicit(const SymMatrix& m, const Matrix& l, const SymMatrix& n,
                              double tol) {
  const Matrix w = pseudo_inverse(n);
  const Matrix complement =
      Matrix::Identity(n.dim(), n.dim()) - n.mat() * w;
  const bool range_ok =
      l.cols() == 0 || (l * complement).cwiseAbs().maxCoeff() <= tol;
  const bool n_psd = is_psd(n, tol);
  const Matrix schur = m.mat() - l * w * l.transpose();
  const bool schur_psd = is_psd(SymMatrix(schur), tol);
  return range_ok && n_psd && schur_psd;
}

}  // namespace lqgame::testing
