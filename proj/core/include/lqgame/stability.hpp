#pragma once

#include <cstdint>
#include <optional>

#include "lqgame/linalg.hpp"

namespace lqgame {

/// Uncontrolled system dX = A X dt + C X dW.
struct UncontrolledSystem {
  Matrix A;
  Matrix C;

  UncontrolledSystem(Matrix a, Matrix c);
  Eigen::Index n() const { return A.rows(); }
};

/// Controlled system dX = (A X + B u) dt + (C X + D u) dW.
struct ControlledSystem {
  Matrix A;
  Matrix C;
  Matrix B;
  Matrix D;

  ControlledSystem(Matrix a, Matrix c, Matrix b, Matrix d);
  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
  UncontrolledSystem closed_loop(const Matrix& theta) const;
};

/// Spectral abscissae within this band of zero are treated as "on the
/// boundary" and reported as not stable; mean-square stability requires
/// strict exponential decay.
inline constexpr double kStabilityBoundaryBand = 1e-8;

struct StabilityReport {
  bool stable = false;
  bool boundary = false;
  /// Solution of the Lyapunov equation with identity right-hand side,
  /// absent when the vectorized operator is singular.
  std::optional<SymMatrix> lyapunov_P;
  double residual_norm = 0.0;
  /// Max real part of the eigenvalues of the vectorized generator.
  double spectral_abscissa = 0.0;
};

/// Solves P A + A^T P + C^T P C + Lambda = 0 for symmetric P.
/// Does not require P > 0; positivity is the caller's test.
/// Throws SingularOperator when the vectorized operator is rank-deficient
/// or too ill-conditioned to meet the residual bound 1e-9 (1 + |Lambda|).
SymMatrix solve_lyapunov(const UncontrolledSystem& sys, const SymMatrix& lambda);

/// Mean-square (L2) stability test. Runs two independent routes, the
/// Lyapunov-positivity route and the spectral-abscissa route, and throws
/// InconsistentRoutes if they disagree beyond the boundary band.
StabilityReport is_l2_stable(const UncontrolledSystem& sys);

/// True iff [A + B Theta, C + D Theta] is L2-stable.
bool is_stabilizer(const Matrix& theta, const ControlledSystem& sys);

/// Searches for a stabilizing feedback by minimizing the closed-loop
/// spectral abscissa with restarted Nelder-Mead. Accepts the first Theta
/// with abscissa below -1e-6. Deterministic for a fixed seed. An empty
/// result means the budget ran out, not that no stabilizer exists.
std::optional<Matrix> synthesize_stabilizer(const ControlledSystem& sys,
                                            int budget = 4000,
                                            std::uint64_t seed = 0);

}  // namespace lqgame
