#include "lqgame/riccati.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "lqgame/nelder_mead.hpp"
#include "lqgame/noise.hpp"

namespace lqgame {

MLNTriple mln(const GameSpec& spec, const SymMatrix& p) {
  if (p.dim() != spec.n()) throw InvalidInput("mln: P dim mismatch");
  const Matrix& pm = p.mat();
  const Matrix b = spec.B(), d = spec.D(), s = spec.S();
  MLNTriple t;
  t.M = SymMatrix(pm * spec.A + spec.A.transpose() * pm +
                  spec.C.transpose() * pm * spec.C + spec.Q.mat());
  t.L = pm * b + spec.C.transpose() * pm * d + s.transpose();
  t.N = SymMatrix(spec.R().mat() + d.transpose() * pm * d);
  t.at_P = p;
  return t;
}

Matrix are_residual_raw(const GameSpec& spec, const SymMatrix& p, double pinv_tol) {
  const MLNTriple t = mln(spec, p);
  const Matrix w = pseudo_inverse(t.N, pinv_tol);
  return t.M.mat() - t.L * w * t.L.transpose();
}

SymMatrix are_residual(const GameSpec& spec, const SymMatrix& p, double pinv_tol) {
  const Matrix raw = are_residual_raw(spec, p, pinv_tol);
  return SymMatrix::FromSymmetric(0.5 * (raw + raw.transpose()));
}

Matrix gain_from(const GameSpec& spec, const SymMatrix& p, const Matrix& pi,
                 double pinv_tol) {
  const MLNTriple t = mln(spec, p);
  if (pi.rows() != spec.m() || pi.cols() != spec.n()) {
    throw InvalidInput("gain_from: Pi must be m x n");
  }
  const Matrix w = pseudo_inverse(t.N, pinv_tol);
  const Matrix projector = Matrix::Identity(spec.m(), spec.m()) - w * t.N.mat();
  return -w * t.L.transpose() + projector * pi;
}

namespace {

double residual_inf(const GameSpec& spec, const SymMatrix& p, double pinv_tol) {
  return are_residual(spec, p, pinv_tol).norm_inf();
}

// ---- scalar-roots strategy (n == 1) ----------------------------------

// P values where N(P) = R + P D^T D loses rank: real finite generalized
// eigenvalues of the pencil (-R, D^T D).
std::vector<double> rank_breakpoints(const GameSpec& spec) {
  const Matrix d = spec.D();
  const Matrix g = d.transpose() * d;
  std::vector<double> breaks;
  if (g.size() == 0 || g.isZero(0.0)) return breaks;
  const Matrix r = spec.R().mat();
  Eigen::GeneralizedEigenSolver<Matrix> ges(-r, g, /*computeEigenvectors=*/false);
  const auto& alphas = ges.alphas();
  const auto& betas = ges.betas();
  const double scale = std::max(1.0, std::max(r.cwiseAbs().maxCoeff(),
                                              g.cwiseAbs().maxCoeff()));
  for (Eigen::Index i = 0; i < alphas.size(); ++i) {
    if (std::abs(betas(i)) < 1e-12 * scale) continue;  // eigenvalue at infinity
    const std::complex<double> lam = alphas(i) / betas(i);
    if (std::abs(lam.imag()) < 1e-9 * std::max(1.0, std::abs(lam.real()))) {
      breaks.push_back(lam.real());
    }
  }
  std::sort(breaks.begin(), breaks.end());
  return breaks;
}

double scalar_residual(const GameSpec& spec, double p, double pinv_tol) {
  return are_residual(spec, SymMatrix::FromSymmetric(Matrix::Constant(1, 1, p)),
                      pinv_tol)(0, 0);
}

// Dense polynomial helpers, coefficients low to high.
double poly_eval(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (size_t i = 1; i < c.size(); ++i) d.push_back(static_cast<double>(i) * c[i]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

double poly_newton(const std::vector<double>& c, double x) {
  const std::vector<double> d = poly_derivative(c);
  for (int i = 0; i < 60; ++i) {
    const double f = poly_eval(c, x);
    const double fp = poly_eval(d, x);
    if (fp == 0.0) break;
    const double step = f / fp;
    x -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

std::vector<double> real_poly_roots(std::vector<double> coeffs) {
  // trim numerically-zero leading coefficients
  double scale = 0.0;
  for (double c : coeffs) scale = std::max(scale, std::abs(c));
  while (coeffs.size() > 1 && std::abs(coeffs.back()) <= 1e-12 * scale) {
    coeffs.pop_back();
  }
  const size_t deg = coeffs.size() - 1;
  std::vector<double> roots;
  if (scale == 0.0 || deg == 0) return roots;
  Matrix companion = Matrix::Zero(deg, deg);
  for (size_t i = 0; i + 1 < deg; ++i) companion(i + 1, i) = 1.0;
  for (size_t i = 0; i < deg; ++i) {
    companion(i, deg - 1) = -coeffs[i] / coeffs[deg];
  }
  Eigen::EigenSolver<Matrix> es(companion, /*computeEigenvectors=*/false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    // a multiple real root may split into a conjugate pair of width
    // ~sqrt(eps); keep anything this close to the axis and let the
    // residual filter decide
    if (std::abs(z.imag()) <= 1e-6 * (1.0 + std::abs(z.real()))) {
      roots.push_back(z.real());
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// On the branches where N(P) is invertible the scalar residual is the
// rational function h(P) / det(N(P)); h is a polynomial of degree at most
// m + 1, recovered exactly by interpolation. Candidate roots of h are then
// polished with exact polynomial Newton. A multiple root of h is a simple
// root of the appropriate derivative, so polishing against h, h' and h''
// reaches machine precision even at tangencies.
std::vector<double> scalar_are_roots(const GameSpec& spec, const ARESolveOptions& opts) {
  const std::vector<double> breaks = rank_breakpoints(spec);
  const Matrix g = spec.D().transpose() * spec.D();

  auto det_n = [&](double p) {
    return (spec.R().mat() + p * g).determinant();
  };
  auto min_abs_eig_n = [&](double p) {
    return SymMatrix(spec.R().mat() + p * g).eigenvalues().cwiseAbs().minCoeff();
  };
  auto h_value = [&](double p) { return scalar_residual(spec, p, opts.pinv_tol) * det_n(p); };

  // Interpolate h on Chebyshev nodes kept clear of the rank breakpoints,
  // where the pseudo-inverse would deflate a direction and spoil the fit.
  const Eigen::Index degree = spec.m() + 1;
  const Eigen::Index samples = degree + 1;
  double span = 2.0;
  for (double p : breaks) span = std::max(span, 2.0 * std::abs(p) + 2.0);
  std::vector<double> xs;
  for (Eigen::Index i = 0; i < samples; ++i) {
    double x = span * std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * samples));
    while (min_abs_eig_n(x) <= 1e-4 * (1.0 + std::abs(x))) x += 1e-3 * span;
    xs.push_back(x);
  }
  Matrix vand(samples, samples);
  Vector rhs(samples);
  for (Eigen::Index i = 0; i < samples; ++i) {
    double pw = 1.0;
    for (Eigen::Index j = 0; j < samples; ++j) {
      vand(i, j) = pw;
      pw *= xs[i];
    }
    rhs(i) = h_value(xs[i]);
  }
  const Vector coef = vand.fullPivLu().solve(rhs);
  std::vector<double> h(coef.data(), coef.data() + coef.size());

  double h_scale = 0.0;
  for (double c : h) h_scale = std::max(h_scale, std::abs(c));
  if (h_scale <= 1e-12) {
    throw InvalidInput(
        "solve_are: scalar residual vanishes identically on the invertible branch");
  }

  // Candidates: polynomial roots (polished at each plausible multiplicity)
  // and the rank breakpoints themselves.
  std::vector<double> candidates = breaks;
  const std::vector<double> h1 = poly_derivative(h);
  const std::vector<double> h2 = poly_derivative(h1);
  for (double x : real_poly_roots(h)) {
    candidates.push_back(poly_newton(h, x));
    candidates.push_back(poly_newton(h1, x));
    if (h2.size() > 1) candidates.push_back(poly_newton(h2, x));
  }

  std::vector<double> roots;
  for (double p : candidates) {
    if (p < opts.scan_min || p > opts.scan_max || !std::isfinite(p)) continue;
    if (std::abs(scalar_residual(spec, p, opts.pinv_tol)) <= opts.tol) {
      roots.push_back(p);
    }
  }
  std::sort(roots.begin(), roots.end());

  // Dedup; inside a cluster prefer a rank breakpoint (the degenerate
  // directions cancel exactly there), otherwise the smallest residual.
  std::vector<double> unique;
  size_t i = 0;
  while (i < roots.size()) {
    size_t j = i;
    while (j + 1 < roots.size() && roots[j + 1] - roots[j] <= opts.dedup_tol) ++j;
    double best = roots[i];
    double best_res = std::abs(scalar_residual(spec, best, opts.pinv_tol));
    for (size_t k = i; k <= j; ++k) {
      const double res = std::abs(scalar_residual(spec, roots[k], opts.pinv_tol));
      if (res < best_res) {
        best = roots[k];
        best_res = res;
      }
    }
    for (double p : breaks) {
      if (p >= roots[i] - opts.dedup_tol && p <= roots[j] + opts.dedup_tol &&
          std::abs(scalar_residual(spec, p, opts.pinv_tol)) <= opts.tol) {
        best = p;
        break;
      }
    }
    unique.push_back(best);
    i = j + 1;
  }
  return unique;
}

// ---- Newton strategy --------------------------------------------------

// Symmetric basis E_1..E_d of S^n, d = n(n+1)/2.
std::vector<Matrix> symmetric_basis(Eigen::Index n) {
  std::vector<Matrix> basis;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      basis.push_back(e);
    }
  }
  return basis;
}

Vector vech(const Matrix& m) {
  const Eigen::Index n = m.rows();
  Vector v(n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) v(k++) = m(i, j);
  }
  return v;
}

Matrix unvech(const Vector& v, Eigen::Index n) {
  Matrix m(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      m(i, j) = v(k);
      m(j, i) = v(k);
      ++k;
    }
  }
  return m;
}

std::optional<SymMatrix> newton_from(const GameSpec& spec, SymMatrix p,
                                     const ARESolveOptions& opts) {
  const Eigen::Index n = spec.n();
  const std::vector<Matrix> basis = symmetric_basis(n);
  const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());

  double res = residual_inf(spec, p, opts.pinv_tol);
  for (int iter = 0; iter < opts.newton_max_iters; ++iter) {
    if (res <= opts.tol) return p;
    if (!std::isfinite(res)) return std::nullopt;

    const MLNTriple t = mln(spec, p);
    const Matrix w = pseudo_inverse(t.N, opts.pinv_tol);
    const Matrix b = spec.B(), d = spec.D();
    const Matrix a_cl = spec.A - b * w * t.L.transpose();
    const Matrix dwl = d * w * t.L.transpose();
    const Matrix c_cl = spec.C - dwl;

    // Frechet derivative of the residual with the pseudo-inverse frozen:
    // dG[E] = E A_cl + A_cl^T E + C^T E C_cl - (D W L^T)^T E C.
    Matrix jac(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
      const Matrix& e = basis[k];
      const Matrix de = e * a_cl + a_cl.transpose() * e +
                        spec.C.transpose() * e * c_cl - dwl.transpose() * e * spec.C;
      jac.col(k) = vech(0.5 * (de + de.transpose()));
    }

    const Matrix g = are_residual(spec, p, opts.pinv_tol).mat();
    Eigen::ColPivHouseholderQR<Matrix> qr(jac);
    if (qr.rank() < dim) return std::nullopt;
    const Vector step = qr.solve(-vech(g));
    if (!step.allFinite()) return std::nullopt;
    const Matrix delta = unvech(step, n);

    // Backtracking line search on the true residual norm.
    double best_t = 0.0, best_res = res;
    double tstep = 1.0;
    for (int ls = 0; ls < 24; ++ls, tstep *= 0.5) {
      const SymMatrix trial = SymMatrix::FromSymmetric(p.mat() + tstep * delta);
      const double r_trial = residual_inf(spec, trial, opts.pinv_tol);
      if (r_trial < best_res) {
        best_res = r_trial;
        best_t = tstep;
        break;
      }
    }
    if (best_t == 0.0) return std::nullopt;  // no descent
    p = SymMatrix::FromSymmetric(p.mat() + best_t * delta);
    res = best_res;
  }
  return res <= opts.tol ? std::optional<SymMatrix>(p) : std::nullopt;
}

std::vector<SymMatrix> newton_solve(const GameSpec& spec, const ARESolveOptions& opts,
                                    bool with_random_restarts) {
  const Eigen::Index n = spec.n();
  std::vector<SymMatrix> seeds;
  seeds.push_back(SymMatrix::Zero(n));
  seeds.push_back(SymMatrix::Identity(n));
  seeds.push_back(SymMatrix::FromSymmetric(-Matrix::Identity(n, n)));
  try {
    seeds.push_back(solve_lyapunov(UncontrolledSystem(spec.A, spec.C), spec.Q));
  } catch (const SingularOperator&) {
    // uncontrolled generator on the boundary; skip this seed
  }
  if (with_random_restarts) {
    const double scales[] = {0.5, 1.0, 2.0};
    for (int r = 0; r < opts.random_restarts; ++r) {
      NoiseStream rng(opts.seed, static_cast<std::uint64_t>(r) + 101);
      Matrix x(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) x(i, j) = rng.gaussian();
      seeds.push_back(SymMatrix(scales[r % 3] * 0.5 * (x + x.transpose())));
    }
  }

  std::vector<SymMatrix> roots;
  for (const SymMatrix& seed : seeds) {
    const auto root = newton_from(spec, seed, opts);
    if (!root) continue;
    const bool dup = std::any_of(roots.begin(), roots.end(), [&](const SymMatrix& q) {
      return (q.mat() - root->mat()).cwiseAbs().maxCoeff() <= opts.dedup_tol;
    });
    if (!dup) roots.push_back(*root);
  }
  std::sort(roots.begin(), roots.end(), [](const SymMatrix& a, const SymMatrix& b) {
    if (a.mat().trace() != b.mat().trace()) return a.mat().trace() < b.mat().trace();
    return std::lexicographical_compare(a.mat().data(), a.mat().data() + a.mat().size(),
                                        b.mat().data(), b.mat().data() + b.mat().size());
  });
  return roots;
}

}  // namespace

std::vector<SymMatrix> solve_are(const GameSpec& spec, const ARESolveOptions& opts) {
  spec.validate();
  if (opts.tol <= 0) throw InvalidInput("solve_are: tol must be positive");
  AREStrategy strategy = opts.strategy;
  if (strategy == AREStrategy::Auto) {
    strategy = spec.n() == 1 ? AREStrategy::ScalarRoots : AREStrategy::GridNewton;
  }
  if (strategy == AREStrategy::ScalarRoots) {
    if (spec.n() != 1) throw InvalidInput("solve_are: scalar-roots needs n == 1");
    std::vector<SymMatrix> out;
    for (double p : scalar_are_roots(spec, opts)) {
      out.push_back(SymMatrix::FromSymmetric(Matrix::Constant(1, 1, p)));
    }
    return out;
  }
  return newton_solve(spec, opts, strategy == AREStrategy::GridNewton);
}

AREClassification classify(const GameSpec& spec, const SymMatrix& p,
                           const ClassifyOptions& opts) {
  AREClassification out;
  const MLNTriple t = mln(spec, p);
  const Matrix w = pseudo_inverse(t.N, opts.pinv_tol);
  const Eigen::Index m = spec.m(), n = spec.n();

  out.residual_norm = residual_inf(spec, p, opts.pinv_tol);
  out.is_solution = out.residual_norm <= opts.tol;

  const Matrix projector = Matrix::Identity(m, m) - w * t.N.mat();
  out.projector_rank = static_cast<int>(std::llround(projector.trace()));
  out.range_defect =
      (t.L * (Matrix::Identity(m, m) - t.N.mat() * w)).cwiseAbs().maxCoeff();
  out.range_ok = out.range_defect <= opts.tol;

  const SymMatrix n1 =
      SymMatrix(spec.R11.mat() + spec.D1.transpose() * p.mat() * spec.D1);
  const SymMatrix n2 =
      SymMatrix(spec.R22.mat() + spec.D2.transpose() * p.mat() * spec.D2);
  const bool n1_psd = n1.dim() == 0 || n1.min_eigenvalue() >= -opts.tol;
  const bool n2_nsd = n2.dim() == 0 || n2.max_eigenvalue() <= opts.tol;
  out.sign_ok = n1_psd && n2_nsd;

  const Matrix theta0 = -w * t.L.transpose();
  if (out.projector_rank == 0) out.unique_gain = theta0;

  if (!(out.is_solution && out.range_ok && out.sign_ok)) return out;

  const ControlledSystem sys = spec.system();
  if (out.projector_rank == 0) {
    if (is_stabilizer(theta0, sys)) {
      out.stabilizing = true;
      out.gain_Theta = theta0;
      out.Pi = Matrix::Zero(m, n);
    }
    return out;
  }

  // Free directions: eigenvectors of the orthogonal projector I - N^+ N
  // with eigenvalue 1. The gain search runs over that subspace only.
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (projector + projector.transpose()));
  Matrix u0(m, out.projector_rank);
  int col = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (es.eigenvalues()(i) > 0.5) u0.col(col++) = es.eigenvectors().col(i);
  }

  auto abscissa_of = [&](const Vector& xi_vec) {
    const Matrix xi = unvec(xi_vec, out.projector_rank, n);
    const UncontrolledSystem loop = sys.closed_loop(theta0 + u0 * xi);
    return spectral_abscissa(lyapunov_operator_matrix(loop.A, loop.C));
  };

  constexpr double kAccept = -1e-6;
  const double scales[] = {0.5, 1.0, 2.0, 4.0};
  int remaining = opts.stab_budget;
  for (int restart = 0; remaining > 0; ++restart) {
    Vector x0 = Vector::Zero(out.projector_rank * n);
    if (restart > 0) {
      NoiseStream rng(opts.seed, static_cast<std::uint64_t>(restart) + 1000);
      const double scale = scales[(restart - 1) % 4];
      for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = scale * rng.gaussian();
    }
    NelderMeadOptions nm;
    nm.target = kAccept;
    nm.max_evals = std::min<int>(remaining, 80 * static_cast<int>(x0.size()) + 40);
    NelderMeadResult r = nelder_mead(abscissa_of, x0, nm);
    remaining -= r.evals;
    if (r.f < kAccept) {
      const Matrix xi = unvec(r.x, out.projector_rank, n);
      const Matrix theta = theta0 + u0 * xi;
      if (is_stabilizer(theta, sys)) {
        out.stabilizing = true;
        out.gain_Theta = theta;
        out.Pi = u0 * xi;
        return out;
      }
    }
  }
  out.inconclusive = true;  // search exhausted; existence is not settled
  return out;
}

bool in_script_p(const GameSpec& spec, const SymMatrix& p, double tol) {
  const MLNTriple t = mln(spec, p);
  return extended_schur_holds(t.M, t.L, t.N, tol);
}

}  // namespace lqgame
