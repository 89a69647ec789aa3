#include "lqgame/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqgame/nelder_mead.hpp"
#include "lqgame/noise.hpp"

namespace lqgame {

UncontrolledSystem::UncontrolledSystem(Matrix a, Matrix c)
    : A(std::move(a)), C(std::move(c)) {
  if (A.rows() != A.cols() || C.rows() != C.cols() || A.rows() != C.rows()) {
    throw InvalidInput("UncontrolledSystem: A, C must be square with equal dims");
  }
  require_finite(A, "UncontrolledSystem.A");
  require_finite(C, "UncontrolledSystem.C");
}

ControlledSystem::ControlledSystem(Matrix a, Matrix c, Matrix b, Matrix d)
    : A(std::move(a)), C(std::move(c)), B(std::move(b)), D(std::move(d)) {
  if (A.rows() != A.cols() || C.rows() != C.cols() || A.rows() != C.rows() ||
      B.rows() != A.rows() || D.rows() != A.rows() || B.cols() != D.cols()) {
    throw InvalidInput("ControlledSystem: dimensions do not conform");
  }
  require_finite(A, "ControlledSystem.A");
  require_finite(C, "ControlledSystem.C");
  require_finite(B, "ControlledSystem.B");
  require_finite(D, "ControlledSystem.D");
}

UncontrolledSystem ControlledSystem::closed_loop(const Matrix& theta) const {
  if (theta.rows() != m() || theta.cols() != n()) {
    throw InvalidInput("closed_loop: Theta must be m x n");
  }
  return UncontrolledSystem(A + B * theta, C + D * theta);
}

SymMatrix solve_lyapunov(const UncontrolledSystem& sys, const SymMatrix& lambda) {
  if (lambda.dim() != sys.n()) {
    throw InvalidInput("solve_lyapunov: Lambda dim mismatch");
  }
  const Matrix k = lyapunov_operator_matrix(sys.A, sys.C);
  Eigen::FullPivLU<Matrix> lu(k);
  if (!lu.isInvertible()) {
    throw SingularOperator("solve_lyapunov: vectorized operator is rank-deficient");
  }
  const Vector p_vec = lu.solve(-vec(lambda.mat()));
  // Solve the full n^2 system, then symmetrize and re-check the residual.
  const Matrix p_raw = unvec(p_vec, sys.n(), sys.n());
  SymMatrix p = SymMatrix::FromSymmetric(0.5 * (p_raw + p_raw.transpose()));
  const Matrix residual =
      p.mat() * sys.A + sys.A.transpose() * p.mat() +
      sys.C.transpose() * p.mat() * sys.C + lambda.mat();
  const double res_norm = residual.cwiseAbs().maxCoeff();
  if (res_norm > 1e-9 * (1.0 + lambda.norm_inf())) {
    throw SingularOperator("solve_lyapunov: operator too ill-conditioned, residual " +
                           std::to_string(res_norm));
  }
  return p;
}

StabilityReport is_l2_stable(const UncontrolledSystem& sys) {
  StabilityReport report;
  const Matrix k = lyapunov_operator_matrix(sys.A, sys.C);
  report.spectral_abscissa = spectral_abscissa(k);
  report.boundary = std::abs(report.spectral_abscissa) <= kStabilityBoundaryBand;

  try {
    SymMatrix p = solve_lyapunov(sys, SymMatrix::Identity(sys.n()));
    report.residual_norm =
        (p.mat() * sys.A + sys.A.transpose() * p.mat() +
         sys.C.transpose() * p.mat() * sys.C + Matrix::Identity(sys.n(), sys.n()))
            .cwiseAbs()
            .maxCoeff();
    report.lyapunov_P = std::move(p);
  } catch (const SingularOperator&) {
    report.lyapunov_P.reset();
    report.residual_norm = std::numeric_limits<double>::quiet_NaN();
  }

  const bool positive = report.lyapunov_P.has_value() &&
                        report.lyapunov_P->min_eigenvalue() >
                            1e-12 * std::max(1.0, report.lyapunov_P->max_eigenvalue());

  if (!report.boundary) {
    const bool stable_by_abscissa = report.spectral_abscissa < 0.0;
    if (stable_by_abscissa != positive) {
      throw InconsistentRoutes(
          "is_l2_stable: Lyapunov route and spectral-abscissa route disagree "
          "(abscissa " + std::to_string(report.spectral_abscissa) + ")");
    }
    report.stable = stable_by_abscissa;
  } else {
    report.stable = false;  // strict decay required
  }
  return report;
}

bool is_stabilizer(const Matrix& theta, const ControlledSystem& sys) {
  return is_l2_stable(sys.closed_loop(theta)).stable;
}

std::optional<Matrix> synthesize_stabilizer(const ControlledSystem& sys, int budget,
                                            std::uint64_t seed) {
  if (budget < 1) throw InvalidInput("synthesize_stabilizer: budget must be >= 1");
  const Eigen::Index n = sys.n(), m = sys.m();
  if (m == 0) return std::nullopt;

  auto abscissa_of = [&](const Vector& theta_vec) {
    const Matrix theta = unvec(theta_vec, m, n);
    const UncontrolledSystem loop = sys.closed_loop(theta);
    return spectral_abscissa(lyapunov_operator_matrix(loop.A, loop.C));
  };

  constexpr double kAccept = -1e-6;
  const double scales[] = {0.5, 1.0, 2.0, 4.0};
  int remaining = budget;
  for (int restart = 0; remaining > 0; ++restart) {
    Vector x0 = Vector::Zero(m * n);
    if (restart > 0) {
      NoiseStream rng(seed, static_cast<std::uint64_t>(restart));
      const double scale = scales[(restart - 1) % 4];
      for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = scale * rng.gaussian();
    }
    NelderMeadOptions opts;
    opts.target = kAccept;
    opts.initial_step = 0.5;
    opts.max_evals = std::min<int>(remaining, 80 * static_cast<int>(m * n) + 40);
    NelderMeadResult r = nelder_mead(abscissa_of, x0, opts);
    remaining -= r.evals;
    if (r.f < kAccept) {
      const Matrix theta = unvec(r.x, m, n);
      if (is_stabilizer(theta, sys)) return theta;
    }
  }
  return std::nullopt;
}

}  // namespace lqgame
