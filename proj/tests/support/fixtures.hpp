#pragma once

#include <cmath>

#include "lqgame/game_spec.hpp"

namespace lqgame::testing {

// One-player scalar game whose Riccati equation has a double root P = 1
// with the unique gain candidate -2 sitting exactly on the stabilizer
// boundary: state dX = -[2X+u]dt + [2X+u]dW, cost 2X^2 - u^2/2.
inline GameSpec nonstabilizing_scalar_spec() {
  return GameSpec::one_player(Matrix::Constant(1, 1, -2.0), Matrix::Constant(1, 1, 2.0),
                              Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, 1.0),
                              SymMatrix::FromSymmetric(Matrix::Constant(1, 1, 2.0)),
                              Matrix::Constant(1, 1, 0.0),
                              SymMatrix::FromSymmetric(Matrix::Constant(1, 1, -0.5)));
}

// One-player scalar game where the Riccati solution P = -1 kills N(P)
// entirely, so the whole gain comes from the free part:
// dX = -[X/4 + 2u]dt + [X+u]dW, cost X^2/2 - 2Xu + u^2.
// Stabilizer interval: (1 - sqrt(2)/2, 1 + sqrt(2)/2).
inline GameSpec degenerate_gain_scalar_spec() {
  return GameSpec::one_player(
      Matrix::Constant(1, 1, -0.25), Matrix::Constant(1, 1, 1.0),
      Matrix::Constant(1, 1, -2.0), Matrix::Constant(1, 1, 1.0),
      SymMatrix::FromSymmetric(Matrix::Constant(1, 1, 0.5)),
      Matrix::Constant(1, 1, -1.0),
      SymMatrix::FromSymmetric(Matrix::Constant(1, 1, 1.0)));
}

inline double degenerate_gain_lo() { return 1.0 - std::sqrt(2.0) / 2.0; }
inline double degenerate_gain_hi() { return 1.0 + std::sqrt(2.0) / 2.0; }

// Scalar two-player game with a pure saddle: A=-1, C=0, B1=B2=1, D=0,
// Q=1, R11=1, R22=-1. P = 1/2, Theta* = (-1/2, 1/2), V(x) = x^2/2.
// With drift forcing b(t) = b0 e^{-t}: eta(t) = b0 e^{-t}/4,
// u*(t) = (-1, 1) b0 e^{-t}/4, V(x) = x^2/2 + b0 x/2 + b0^2/4.
inline GameSpec two_player_scalar_spec(double b0 = 0.0) {
  GameSpec spec;
  spec.A = Matrix::Constant(1, 1, -1.0);
  spec.C = Matrix::Zero(1, 1);
  spec.B1 = Matrix::Constant(1, 1, 1.0);
  spec.B2 = Matrix::Constant(1, 1, 1.0);
  spec.D1 = Matrix::Zero(1, 1);
  spec.D2 = Matrix::Zero(1, 1);
  spec.Q = SymMatrix::FromSymmetric(Matrix::Constant(1, 1, 1.0));
  spec.S1 = Matrix::Zero(1, 1);
  spec.S2 = Matrix::Zero(1, 1);
  spec.R11 = SymMatrix::FromSymmetric(Matrix::Constant(1, 1, 1.0));
  spec.R22 = SymMatrix::FromSymmetric(Matrix::Constant(1, 1, -1.0));
  spec.R12 = Matrix::Zero(1, 1);
  spec.forcing = ForcingTerms::zero(1, 1, 1);
  if (b0 != 0.0) {
    spec.forcing.b.add_term(0, 1.0, Vector::Constant(1, b0));
  }
  spec.validate();
  return spec;
}

// Closed-form cost of the homogeneous two-player scalar game under
// constant gains (theta1, theta2), from the scalar moment ODE.
inline double two_player_cost_oracle(double theta1, double theta2, double x) {
  const double a_cl = -1.0 + theta1 + theta2;
  const double coeff = 1.0 + theta1 * theta1 - theta2 * theta2;
  return coeff * x * x / (-2.0 * a_cl);
}

// Planar system that is mean-square stable although A + A^T + C^T C is
// indefinite: A = [[-1,1],[-1,0]], C = (sqrt(2)/2) I. The Lyapunov
// equation with Lambda = [[1,-1/2],[-1/2,1]] has solution [[2,-1],[-1,2]].
inline UncontrolledSystem planar_stable_system() {
  Matrix a(2, 2);
  a << -1, 1, -1, 0;
  const Matrix c = std::sqrt(2.0) / 2.0 * Matrix::Identity(2, 2);
  return UncontrolledSystem(a, c);
}

inline SymMatrix planar_lyapunov_lambda() {
  Matrix l(2, 2);
  l << 1, -0.5, -0.5, 1;
  return SymMatrix::FromSymmetric(l);
}

inline SymMatrix planar_lyapunov_solution() {
  Matrix p(2, 2);
  p << 2, -1, -1, 2;
  return SymMatrix::FromSymmetric(p);
}

// Wraps an uncontrolled pair [A, C] as a game with inert control channels
// so it can be fed to the simulator.
inline GameSpec uncontrolled_as_game(const Matrix& a, const Matrix& c) {
  const Eigen::Index n = a.rows();
  return GameSpec::one_player(a, c, Matrix::Zero(n, 1), Matrix::Zero(n, 1),
                              SymMatrix::Identity(n), Matrix::Zero(1, n),
                              SymMatrix::Identity(1));
}

}  // namespace lqgame::testing
