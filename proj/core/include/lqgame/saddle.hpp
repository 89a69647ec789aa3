#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lqgame/bsde.hpp"
#include "lqgame/riccati.hpp"

namespace lqgame {

/// Closed-loop saddle point: gain Theta, feedforward u*, and the affine
/// value function V(x) = <P x, x> + 2 <eta(0), x> + value_constant.
struct SaddleSolution {
  SymMatrix P;
  Matrix Theta;    // m x n, rows (Theta1; Theta2)
  Matrix Pi;       // free part used in the gain representation
  ExpPoly eta;     // dim n, deterministic
  ExpPoly zeta;    // dim n, identically zero for deterministic forcing
  ExpPoly u_star;  // dim m, rows (u1*; u2*)
  double value_constant = 0.0;
  Eigen::Index m1 = 0;

  Matrix theta1() const { return Theta.topRows(m1); }
  Matrix theta2() const { return Theta.bottomRows(Theta.rows() - m1); }
  ExpPoly u1_star() const { return u_star.segment(0, m1); }
  ExpPoly u2_star() const { return u_star.segment(m1, u_star.dim() - m1); }
};

enum class DiagnosisKind {
  NoStabilizingSolution,
  StabilizerSearchInconclusive,
  RangeViolation,
  EtaDriftUnstable,
};

const char* to_string(DiagnosisKind kind);

/// Why synthesis stopped, with the ARE roots that were found and how each
/// of them classified.
struct Diagnosis {
  DiagnosisKind kind;
  std::string detail;
  std::vector<SymMatrix> candidates;
  std::vector<AREClassification> classifications;
};

using SynthesisResult = std::variant<SaddleSolution, Diagnosis>;

struct SynthesisOptions {
  ARESolveOptions are;
  ClassifyOptions classify;
  double range_tol = 1e-8;
  int range_grid_points = 64;
  /// Overrides the free part of the gain; must still stabilize.
  std::optional<Matrix> fixed_pi;
};

/// Full pipeline: solve the Riccati equation, pick a stabilizing solution,
/// solve the feedforward backward equation in closed form, check the range
/// condition on a grid, and assemble gain, feedforward and value function.
SynthesisResult synthesize(const GameSpec& spec, const SynthesisOptions& opts = {});

double value_at(const SaddleSolution& sol, const Vector& x);

/// Per-condition verdicts of the necessary conditions a proposed optimal
/// gain of the one-player problem (m2 = 0) must satisfy.
struct NecessityReport {
  bool are_solvable = false;
  bool sign_ok = false;
  bool range_ok = false;
  bool gain_identity_ok = false;  // N(P) Theta + L(P)^T = 0
  bool stabilizer_ok = false;
  double gain_identity_defect = 0.0;
  std::optional<SymMatrix> P;
  std::vector<SymMatrix> are_solutions;

  bool all_ok() const {
    return are_solvable && sign_ok && range_ok && gain_identity_ok && stabilizer_ok;
  }
};

NecessityReport one_player_necessity_check(const GameSpec& spec, const Matrix& theta,
                                           double tol = 1e-8);

}  // namespace lqgame
