#include "lqgame/saddle.hpp"

#include <algorithm>
#include <cmath>

namespace lqgame {

const char* to_string(DiagnosisKind kind) {
  switch (kind) {
    case DiagnosisKind::NoStabilizingSolution: return "no-stabilizing-solution";
    case DiagnosisKind::StabilizerSearchInconclusive:
      return "stabilizer-search-inconclusive";
    case DiagnosisKind::RangeViolation: return "range-violation";
    case DiagnosisKind::EtaDriftUnstable: return "eta-drift-unstable";
  }
  return "unknown";
}

namespace {

std::vector<double> range_check_grid(double min_rate, int points) {
  std::vector<double> grid;
  grid.push_back(0.0);
  if (!std::isfinite(min_rate) || min_rate <= 0) return grid;
  const double t_max = 10.0 / min_rate;
  const double t_min = 1e-3 * t_max;
  const int k = points - 1;
  for (int i = 0; i < k; ++i) {
    grid.push_back(t_min * std::pow(t_max / t_min, static_cast<double>(i) / (k - 1)));
  }
  return grid;
}

}  // namespace

SynthesisResult synthesize(const GameSpec& spec, const SynthesisOptions& opts) {
  spec.validate();

  const std::vector<SymMatrix> roots = solve_are(spec, opts.are);
  std::vector<AREClassification> infos;
  infos.reserve(roots.size());
  for (const SymMatrix& p : roots) infos.push_back(classify(spec, p, opts.classify));

  const SymMatrix* chosen = nullptr;
  Matrix theta, pi;
  for (size_t i = 0; i < roots.size(); ++i) {
    const AREClassification& info = infos[i];
    if (!(info.is_solution && info.range_ok && info.sign_ok)) continue;
    if (opts.fixed_pi) {
      const Matrix candidate = gain_from(spec, roots[i], *opts.fixed_pi,
                                         opts.classify.pinv_tol);
      if (!is_stabilizer(candidate, spec.system())) continue;
      chosen = &roots[i];
      theta = candidate;
      pi = *opts.fixed_pi;
      break;
    }
    if (info.stabilizing) {
      chosen = &roots[i];
      theta = *info.gain_Theta;
      pi = *info.Pi;
      break;
    }
  }

  if (!chosen && opts.fixed_pi &&
      std::any_of(infos.begin(), infos.end(),
                  [](const AREClassification& c) { return c.stabilizing; })) {
    throw InvalidInput("synthesize: the requested free part Pi does not stabilize");
  }

  if (!chosen) {
    const bool inconclusive = std::any_of(
        infos.begin(), infos.end(),
        [](const AREClassification& c) { return c.inconclusive; });
    Diagnosis d;
    d.kind = inconclusive ? DiagnosisKind::StabilizerSearchInconclusive
                          : DiagnosisKind::NoStabilizingSolution;
    d.detail = inconclusive
                   ? "gain search exhausted its budget on a rank-deficient N(P)"
                   : (roots.empty() ? "no Riccati solution found"
                                    : "no Riccati solution admits a stabilizing gain");
    d.candidates = roots;
    d.classifications = std::move(infos);
    return d;
  }

  const SymMatrix& p = *chosen;
  const MLNTriple t = mln(spec, p);
  const Matrix w = pseudo_inverse(t.N, opts.classify.pinv_tol);
  const Matrix b = spec.B(), d_mat = spec.D();
  const Eigen::Index m = spec.m();

  // Feedforward backward equation, deterministic branch: zeta = 0 and
  //   eta(t) = integral_t^inf e^{A_hat (s-t)} psi(s) ds,
  //   A_hat = A^T - L N^+ B^T,
  //   psi  = [C^T - L N^+ D^T] P sigma - L N^+ rho + P b + q.
  const Matrix lw = t.L * w;
  const Matrix a_hat = spec.A.transpose() - lw * b.transpose();
  const ExpPoly p_sigma = spec.forcing.sigma.apply(p.mat());
  const ExpPoly psi = p_sigma.apply(spec.C.transpose() - lw * d_mat.transpose()) -
                      spec.forcing.rho().apply(lw) +
                      spec.forcing.b.apply(p.mat()) + spec.forcing.q;

  if (!psi.is_zero() && spectral_abscissa(a_hat) >= 0.0) {
    Diagnosis diag;
    diag.kind = DiagnosisKind::EtaDriftUnstable;
    diag.detail = "feedforward drift matrix A^T - L N^+ B^T is not Hurwitz";
    diag.candidates = roots;
    diag.classifications = std::move(infos);
    return diag;
  }

  SaddleSolution sol;
  sol.P = p;
  sol.Theta = theta;
  sol.Pi = pi;
  sol.m1 = spec.m1();
  sol.zeta = ExpPoly::zero(spec.n());
  sol.eta = stable_integral(a_hat, psi);

  // Range condition B^T eta + D^T zeta + D^T P sigma + rho in range(N(P)),
  // checked as a projection residual on a log-spaced grid.
  const ExpPoly r = sol.eta.apply(b.transpose()) + sol.zeta.apply(d_mat.transpose()) +
                    p_sigma.apply(d_mat.transpose()) + spec.forcing.rho();
  const Matrix complement = Matrix::Identity(m, m) - t.N.mat() * w;
  const ExpPoly r_defect = r.apply(complement);
  if (!r_defect.is_zero()) {
    const std::vector<double> grid =
        range_check_grid(spec.forcing.min_rate(), opts.range_grid_points);
    const double defect = r_defect.max_abs_on_grid(grid);
    if (defect > opts.range_tol) {
      Diagnosis diag;
      diag.kind = DiagnosisKind::RangeViolation;
      diag.detail = "projection residual " + std::to_string(defect) +
                    " exceeds tolerance";
      diag.candidates = roots;
      diag.classifications = std::move(infos);
      return diag;
    }
  }

  sol.u_star = r.apply(-w);

  // Constant value term: closed-form integral of
  //   <P sigma, sigma> + 2 <eta, b> + 2 <zeta, sigma> - <N^+ r, r>.
  const ExpPoly integrand = ExpPoly::dot(p_sigma, spec.forcing.sigma) +
                            ExpPoly::dot(sol.eta, spec.forcing.b).scaled(2.0) +
                            ExpPoly::dot(sol.zeta, spec.forcing.sigma).scaled(2.0) -
                            ExpPoly::dot(r.apply(w), r);
  sol.value_constant = integrand.is_zero() ? 0.0 : integrand.integral_scalar();
  return sol;
}

double value_at(const SaddleSolution& sol, const Vector& x) {
  if (x.size() != sol.P.dim()) throw InvalidInput("value_at: x dim mismatch");
  return x.dot(sol.P.mat() * x) + 2.0 * sol.eta.eval(0.0).dot(x) + sol.value_constant;
}

NecessityReport one_player_necessity_check(const GameSpec& spec, const Matrix& theta,
                                           double tol) {
  spec.validate();
  if (spec.m2() != 0) {
    throw InvalidInput("one_player_necessity_check: requires m2 == 0");
  }
  if (theta.rows() != spec.m1() || theta.cols() != spec.n()) {
    throw InvalidInput("one_player_necessity_check: Theta must be m1 x n");
  }

  NecessityReport report;
  report.are_solutions = solve_are(spec);
  report.are_solvable = !report.are_solutions.empty();
  if (!report.are_solvable) return report;

  // Use the first solution satisfying the sign and range conditions, or
  // the first one found when none does.
  const SymMatrix* chosen = &report.are_solutions.front();
  for (const SymMatrix& p : report.are_solutions) {
    const AREClassification info = classify(spec, p, {.tol = tol, .stab_budget = 0});
    if (info.sign_ok && info.range_ok) {
      chosen = &p;
      break;
    }
  }
  report.P = *chosen;

  const MLNTriple t = mln(spec, *chosen);
  report.sign_ok = t.N.dim() == 0 || t.N.min_eigenvalue() >= -tol;
  const Matrix w = pseudo_inverse(t.N);
  report.range_ok =
      (t.L * (Matrix::Identity(spec.m(), spec.m()) - t.N.mat() * w))
          .cwiseAbs()
          .maxCoeff() <= tol;
  report.gain_identity_defect =
      (t.N.mat() * theta + t.L.transpose()).cwiseAbs().maxCoeff();
  report.gain_identity_ok = report.gain_identity_defect <= tol;
  report.stabilizer_ok = is_stabilizer(theta, spec.system());
  return report;
}

}  // namespace lqgame
