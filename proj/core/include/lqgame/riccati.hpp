#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lqgame/game_spec.hpp"

namespace lqgame {

/// The operator triple at a given P:
///   M(P) = P A + A^T P + C^T P C + Q
///   L(P) = P B + C^T P D + S^T
///   N(P) = R + D^T P D
struct MLNTriple {
  SymMatrix M;   // n x n
  Matrix L;      // n x m
  SymMatrix N;   // m x m
  SymMatrix at_P;
};

MLNTriple mln(const GameSpec& spec, const SymMatrix& p);

/// M(P) - L(P) N(P)^+ L(P)^T without symmetrization; the asymmetry is
/// numerical round-off only.
Matrix are_residual_raw(const GameSpec& spec, const SymMatrix& p,
                        double pinv_tol = 1e-9);

/// Symmetrized Riccati residual.
SymMatrix are_residual(const GameSpec& spec, const SymMatrix& p,
                       double pinv_tol = 1e-9);

/// Gain candidate Theta = -N(P)^+ L(P)^T + [I - N(P)^+ N(P)] Pi.
Matrix gain_from(const GameSpec& spec, const SymMatrix& p, const Matrix& pi,
                 double pinv_tol = 1e-9);

enum class AREStrategy {
  Auto,         // ScalarRoots for n == 1, GridNewton otherwise
  ScalarRoots,  // exhaustive piecewise-rational root scan, n == 1 only
  Newton,       // damped Newton from the deterministic seed set
  GridNewton,   // Newton seeds plus seeded random restarts
};

struct ARESolveOptions {
  AREStrategy strategy = AREStrategy::Auto;
  double tol = 1e-9;        // acceptance threshold on ||residual||_inf
  double dedup_tol = 1e-6;  // distinct-solution separation in ||.||_inf
  double pinv_tol = 1e-9;
  std::uint64_t seed = 0;
  int newton_max_iters = 60;
  int random_restarts = 6;  // extra seeds for GridNewton
  // scalar-roots bracketing window and resolution
  double scan_min = -1e3;
  double scan_max = 1e3;
  int scan_points = 40001;
};

/// All distinct solutions of the algebraic Riccati equation found by the
/// chosen strategy, ordered deterministically. For n == 1 the scalar-roots
/// strategy is exhaustive over the scan window, including roots where N(P)
/// loses rank; an empty result from the Newton strategies proves nothing.
std::vector<SymMatrix> solve_are(const GameSpec& spec,
                                 const ARESolveOptions& opts = {});

struct AREClassification {
  bool is_solution = false;
  bool range_ok = false;  // range(L^T) inside range(N), i.e. L(I - N N^+) = 0
  bool sign_ok = false;   // R11 + D1^T P D1 >= 0 and R22 + D2^T P D2 <= 0
  bool stabilizing = false;
  /// Set when the projector is nontrivial and the gain search ran out of
  /// budget: stabilizing=false then claims nothing.
  bool inconclusive = false;
  int projector_rank = 0;  // rank of I - N^+ N
  double residual_norm = 0.0;
  double range_defect = 0.0;
  /// Stabilizing gain and the free part it was built from; present iff
  /// stabilizing.
  std::optional<Matrix> gain_Theta;
  std::optional<Matrix> Pi;
  /// The unique candidate -N^+ L^T when the projector is trivial,
  /// whether or not it stabilizes.
  std::optional<Matrix> unique_gain;
};

struct ClassifyOptions {
  double tol = 1e-8;
  double pinv_tol = 1e-9;
  int stab_budget = 4000;
  std::uint64_t seed = 0;
};

/// Checks the range and sign conditions at P and searches for a free part
/// Pi making Theta = -N^+ L^T + (I - N^+ N) Pi a stabilizer.
AREClassification classify(const GameSpec& spec, const SymMatrix& p,
                           const ClassifyOptions& opts = {});

/// Positive semidefiniteness of the block [[M(P), L(P)], [L(P)^T, N(P)]]:
/// membership of P in the set characterizing finiteness of the homogeneous
/// one-player problem.
bool in_script_p(const GameSpec& spec, const SymMatrix& p, double tol = 1e-8);

}  // namespace lqgame
