#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lqgame/mc_estimate.hpp"
#include "lqgame/saddle.hpp"

namespace lqgame {

struct SimConfig {
  double dt = 1e-3;
  double horizon_T = 40.0;
  int paths = 4000;
  std::uint64_t seed = 1;
  bool antithetic = false;
  /// 0 = one worker per hardware thread (capped); results are bit-identical
  /// for any worker count.
  int workers = 0;
  /// State snapshots are thinned to at most this many stored times; cost
  /// integrals always use the full dt resolution.
  int max_stored_times = 2049;

  void validate() const;
};

/// Euler-Maruyama sample paths of the closed loop u = Theta X + v, with
/// per-path trapezoidal cost integrals.
struct PathEnsemble {
  std::vector<double> times;  // stored snapshot times
  int paths = 0;
  Eigen::Index n = 0;
  double dt = 0.0;
  /// Layout [path][stored time][component].
  std::vector<double> states;
  std::vector<double> per_path_cost;
  /// Estimated cost mass beyond the horizon, from the fitted exponential
  /// decay of E|X(t)|^2 over the last quarter of the horizon; +inf when no
  /// decay could be fitted.
  double truncation_tail_bound = 0.0;

  double state(int path, int t_idx, Eigen::Index comp) const;
  Vector state_at(int path, int t_idx) const;
  /// Average of |X(t)|^2 across paths at a stored time.
  double mean_square(int t_idx) const;
};

/// Simulates dX = [A X + B u + b] dt + [C X + D u + sigma] dW under the
/// feedback u = Theta X + feedforward. Noise for path i derives from
/// (seed, i) only. Throws Diverged when any |X| exceeds 1e12.
PathEnsemble simulate(const GameSpec& spec, const Matrix& theta,
                      const ExpPoly& feedforward, const Vector& x,
                      const SimConfig& cfg);

using CostEstimate = McEstimate;

/// Mean and standard error of the per-path cost integrals; the ensemble
/// must have been produced under the same (theta, feedforward).
CostEstimate estimate_cost(const GameSpec& spec, const PathEnsemble& ens,
                           const Matrix& theta, const ExpPoly& feedforward);

/// One-sided perturbation of a saddle point: replaces a player's gain
/// block and/or adds to its feedforward block.
struct SaddlePerturbation {
  int player = 1;  // 1 or 2
  std::optional<Matrix> theta;     // m_i x n replacement
  std::optional<ExpPoly> delta_u;  // dim m_i, added to u_i*
  std::string label;
};

struct SaddleArm {
  SaddlePerturbation perturbation;
  CostEstimate cost;
  /// Paired per-path difference J_perturbed - J_star under common random
  /// numbers; its standard error is what the verdict uses.
  CostEstimate paired_diff;
  bool ok = false;
};

struct SaddleReport {
  CostEstimate baseline;
  std::vector<SaddleArm> arms;
  bool all_ok = true;
};

/// Thrown when a saddle inequality fails beyond 3 standard errors; carries
/// the full comparison table.
struct SaddleViolation : Error {
  SaddleReport report;
  SaddleViolation(const std::string& msg, SaddleReport r)
      : Error(msg), report(std::move(r)) {}
};

/// Estimates J under each perturbation with common random numbers and
/// checks the two-sided saddle inequalities: player-1 deviations may not
/// lower the cost, player-2 deviations may not raise it, each within 3
/// standard errors of the paired difference.
SaddleReport verify_saddle(const GameSpec& spec, const SaddleSolution& sol,
                           const std::vector<SaddlePerturbation>& perturbations,
                           const Vector& x, const SimConfig& cfg);

struct StationarityReport {
  /// Max over stored times of ||mean residual||_inf.
  double max_mean_residual = 0.0;
  /// Discretization allowance 10 dt plus 3 standard errors at the worst time.
  double tolerance = 0.0;
  double max_std_error = 0.0;
  bool ok = false;
};

/// Reconstructs the adjoint pair Y* = P X* + eta, Z* = P(C + D Theta*)X* +
/// P D u* + P sigma + zeta along simulated paths and checks the
/// stationarity residual R u* + B^T Y* + D^T Z* + (S + R Theta*) X* + rho
/// pathwise on the stored grid.
StationarityReport verify_stationarity(const GameSpec& spec, const SaddleSolution& sol,
                                       const Vector& x, const SimConfig& cfg);

/// Reference second moments E[X X^T] on a time grid from the moment ODE
/// dM/dt = A M + M A^T + C M C^T, M(0) = x x^T; the deterministic oracle
/// for the Monte-Carlo estimators.
std::vector<Matrix> moment_ode_reference(const Matrix& a_cl, const Matrix& c_cl,
                                         const Vector& x,
                                         const std::vector<double>& grid);

}  // namespace lqgame
