#pragma once

#include "lqgame/expoly.hpp"
#include "lqgame/stability.hpp"

namespace lqgame {

/// Deterministic inhomogeneous data: drift offset b, diffusion offset
/// sigma, state cost offset q and control cost offsets rho_1, rho_2, all
/// exponential-polynomial in time (so square-integrable on [0, inf)).
struct ForcingTerms {
  ExpPoly b;      // dim n
  ExpPoly sigma;  // dim n
  ExpPoly q;      // dim n
  ExpPoly rho1;   // dim m1
  ExpPoly rho2;   // dim m2

  static ForcingTerms zero(Eigen::Index n, Eigen::Index m1, Eigen::Index m2);
  bool all_zero() const;
  /// Slowest decay rate across nonzero terms; +inf when all zero.
  double min_rate() const;
  /// Stacked (rho1; rho2).
  ExpPoly rho() const { return ExpPoly::stacked(rho1, rho2); }
};

/// Full problem data of the two-player game
///   dX = [A X + B1 u1 + B2 u2 + b] dt + [C X + D1 u1 + D2 u2 + sigma] dW
/// with quadratic cost weights (Q, S1, S2, R11, R12, R22) and linear cost
/// terms (q, rho1, rho2). Player 1 minimizes, player 2 maximizes.
/// m2 == 0 degenerates to the one-player optimal control problem.
struct GameSpec {
  Matrix A;       // n x n
  Matrix C;       // n x n
  Matrix B1;      // n x m1
  Matrix B2;      // n x m2
  Matrix D1;      // n x m1
  Matrix D2;      // n x m2
  SymMatrix Q;    // n
  Matrix S1;      // m1 x n
  Matrix S2;      // m2 x n
  SymMatrix R11;  // m1
  SymMatrix R22;  // m2
  Matrix R12;     // m1 x m2 (R21 = R12^T implied)
  ForcingTerms forcing;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m1() const { return B1.cols(); }
  Eigen::Index m2() const { return B2.cols(); }
  Eigen::Index m() const { return m1() + m2(); }

  /// Stacked control-channel matrices B = (B1, B2), D = (D1, D2),
  /// S = (S1; S2) and the full symmetric R block.
  Matrix B() const;
  Matrix D() const;
  Matrix S() const;
  SymMatrix R() const;

  ControlledSystem system() const { return ControlledSystem(A, C, B(), D()); }

  /// Throws InvalidInput naming the offending block on any dimension
  /// mismatch or non-finite entry.
  void validate() const;

  /// One-player spec (m2 = 0) with the given data.
  static GameSpec one_player(Matrix a, Matrix c, Matrix b, Matrix d, SymMatrix q,
                             Matrix s, SymMatrix r);
};

}  // namespace lqgame
