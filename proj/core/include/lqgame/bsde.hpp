#pragma once

#include <cstdint>
#include <vector>

#include "lqgame/expoly.hpp"
#include "lqgame/mc_estimate.hpp"
#include "lqgame/stability.hpp"

namespace lqgame {

/// Linear backward equation dY = -[A^T Y + C^T Z + phi] dt + Z dW on
/// [0, inf), with a deterministic exponential-polynomial driver phi.
/// Solvability needs [A, C] mean-square stable.
struct BSDESpec {
  Matrix A;
  Matrix C;
  ExpPoly phi;  // dim n

  BSDESpec(Matrix a, Matrix c, ExpPoly driver);
  Eigen::Index n() const { return A.rows(); }
};

/// Closed-form solution: with a deterministic driver the martingale part
/// vanishes, Z = 0 and Y(t) = integral_t^inf e^{A^T (s-t)} phi(s) ds.
struct BSDESolution {
  ExpPoly Y;
  ExpPoly Z;  // identically zero here
  bool stable_l2 = false;
};

/// lambda_max(A + A^T + C^T C) < 0: the classical sufficient condition,
/// strictly stronger than mean-square stability of [A, C].
bool peng_shi_condition(const Matrix& a, const Matrix& c);

/// Throws NotStable when [A, C] is not mean-square stable.
BSDESolution solve_deterministic(const BSDESpec& spec);

/// Solution of the horizon-k truncation: the driver is cut off at time k,
/// the terminal-value ODE is integrated backwards from Y_k(k) = 0 and the
/// solution extends by zero on (k, inf). Converges to the closed form as
/// k grows.
struct TruncatedSolution {
  std::vector<double> times;  // ascending, times.front() == 0, back() == k
  std::vector<Vector> y;
  double horizon = 0.0;

  const Vector& y0() const { return y.front(); }
  /// Linear interpolation on the grid, identically zero past the horizon.
  Vector at(double t) const;
};

TruncatedSolution solve_truncated(const BSDESpec& spec, double horizon, int steps);

/// Monte-Carlo estimate of <Y(0), x> through the duality identity
/// <Y(0), x> = E integral_0^inf <phi(s), X(s)> ds with dX = A X dt + C X dW,
/// X(0) = x. Independent of the closed-form path, hence usable as an oracle
/// against it.
McEstimate duality_estimate_y0(const BSDESpec& spec, const Vector& x, int paths,
                               double horizon, double dt, std::uint64_t seed);

/// (sup_t |Y(t)|^2 + integral |Y|^2 dt) / integral |phi|^2 dt for the
/// deterministic solution; the a-priori estimates bound this uniformly
/// over drivers for a fixed stable system.
double a_priori_ratio(const BSDESpec& spec);

}  // namespace lqgame
