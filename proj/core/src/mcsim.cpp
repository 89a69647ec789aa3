#include "lqgame/mcsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "lqgame/noise.hpp"

namespace lqgame {

void SimConfig::validate() const {
  if (!(dt > 0)) throw InvalidInput("SimConfig: dt must be > 0");
  if (!(horizon_T >= dt)) throw InvalidInput("SimConfig: dt must not exceed horizon");
  if (paths < 2) throw InvalidInput("SimConfig: need at least 2 paths");
  if (max_stored_times < 2) throw InvalidInput("SimConfig: need at least 2 stored times");
}

double PathEnsemble::state(int path, int t_idx, Eigen::Index comp) const {
  return states[(static_cast<size_t>(path) * times.size() + t_idx) * n + comp];
}

Vector PathEnsemble::state_at(int path, int t_idx) const {
  Vector v(n);
  for (Eigen::Index c = 0; c < n; ++c) v(c) = state(path, t_idx, c);
  return v;
}

double PathEnsemble::mean_square(int t_idx) const {
  std::vector<double> sq(static_cast<size_t>(paths));
  for (int p = 0; p < paths; ++p) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      const double v = state(p, t_idx, c);
      s += v * v;
    }
    sq[static_cast<size_t>(p)] = s;
  }
  return pairwise_sum(sq) / paths;
}

namespace {

constexpr double kDivergenceCutoff = 1e12;

int resolve_workers(int requested, int paths) {
  int w = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (w < 1) w = 1;
  return std::min(w, std::max(1, paths));
}

/// Time-dependent data sampled once per step, shared by all paths.
struct StepData {
  std::vector<Vector> v;      // feedforward
  std::vector<Vector> b;      // drift offset
  std::vector<Vector> sigma;  // diffusion offset
  std::vector<Vector> q;
  std::vector<Vector> rho;
};

}  // namespace

PathEnsemble simulate(const GameSpec& spec, const Matrix& theta,
                      const ExpPoly& feedforward, const Vector& x,
                      const SimConfig& cfg) {
  spec.validate();
  cfg.validate();
  const Eigen::Index n = spec.n(), m = spec.m();
  if (theta.rows() != m || theta.cols() != n) {
    throw InvalidInput("simulate: Theta must be m x n");
  }
  if (feedforward.dim() != m) throw InvalidInput("simulate: feedforward must have dim m");
  if (x.size() != n) throw InvalidInput("simulate: x dim mismatch");

  const int steps = std::max(1, static_cast<int>(std::llround(cfg.horizon_T / cfg.dt)));
  const double dt = cfg.dt;
  const double sqrt_dt = std::sqrt(dt);

  // Stored snapshot indices: every `stride` steps plus the final step.
  const int stride = std::max(1, (steps + cfg.max_stored_times - 1) / cfg.max_stored_times);
  std::vector<int> stored_steps;
  for (int k = 0; k <= steps; k += stride) stored_steps.push_back(k);
  if (stored_steps.back() != steps) stored_steps.push_back(steps);

  PathEnsemble ens;
  ens.paths = cfg.paths;
  ens.n = n;
  ens.dt = dt;
  ens.times.resize(stored_steps.size());
  for (size_t i = 0; i < stored_steps.size(); ++i) ens.times[i] = stored_steps[i] * dt;
  ens.states.assign(static_cast<size_t>(cfg.paths) * stored_steps.size() * n, 0.0);
  ens.per_path_cost.assign(static_cast<size_t>(cfg.paths), 0.0);

  StepData data;
  data.v.resize(steps + 1);
  data.b.resize(steps + 1);
  data.sigma.resize(steps + 1);
  data.q.resize(steps + 1);
  data.rho.resize(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    const double t = k * dt;
    data.v[k] = feedforward.eval(t);
    data.b[k] = spec.forcing.b.eval(t);
    data.sigma[k] = spec.forcing.sigma.eval(t);
    data.q[k] = spec.forcing.q.eval(t);
    data.rho[k] = spec.forcing.rho().eval(t);
  }

  // Flat row-major copies; the path march must not touch Eigen's dynamic
  // dispatch, there are paths x steps of it.
  const auto flat = [](const Matrix& mat) {
    std::vector<double> out(static_cast<size_t>(mat.size()));
    for (Eigen::Index r = 0; r < mat.rows(); ++r)
      for (Eigen::Index c = 0; c < mat.cols(); ++c)
        out[static_cast<size_t>(r * mat.cols() + c)] = mat(r, c);
    return out;
  };
  const std::vector<double> a_f = flat(spec.A), b_f = flat(spec.B()),
                            c_f = flat(spec.C), d_f = flat(spec.D()),
                            th_f = flat(theta), q_f = flat(spec.Q.mat()),
                            s_f = flat(spec.S()), r_f = flat(spec.R().mat());

  const size_t nn = static_cast<size_t>(n), mm = static_cast<size_t>(m);
  std::vector<double> v_f((steps + 1) * mm), rho_f((steps + 1) * mm);
  std::vector<double> b_t((steps + 1) * nn), sig_t((steps + 1) * nn),
      q_t((steps + 1) * nn);
  for (int k = 0; k <= steps; ++k) {
    for (size_t i = 0; i < mm; ++i) {
      v_f[k * mm + i] = data.v[k](static_cast<Eigen::Index>(i));
      rho_f[k * mm + i] = data.rho[k](static_cast<Eigen::Index>(i));
    }
    for (size_t i = 0; i < nn; ++i) {
      b_t[k * nn + i] = data.b[k](static_cast<Eigen::Index>(i));
      sig_t[k * nn + i] = data.sigma[k](static_cast<Eigen::Index>(i));
      q_t[k * nn + i] = data.q[k](static_cast<Eigen::Index>(i));
    }
  }

  std::vector<double> final_integrand(static_cast<size_t>(cfg.paths), 0.0);
  std::atomic<bool> diverged{false};

  auto run_range = [&](int p_begin, int p_end) {
    std::vector<double> xs(nn), u(mm), drift(nn), diffu(nn);
    for (int p = p_begin; p < p_end && !diverged.load(std::memory_order_relaxed); ++p) {
      NoiseStream rng(cfg.seed,
                      static_cast<std::uint64_t>(cfg.antithetic ? p / 2 : p));
      const double sign = (cfg.antithetic && (p % 2 == 1)) ? -1.0 : 1.0;
      for (size_t i = 0; i < nn; ++i) xs[i] = x(static_cast<Eigen::Index>(i));
      double cost = 0.0;
      bool bad = false;
      size_t store_cursor = 0;
      for (int k = 0; k <= steps; ++k) {
        const double* vk = &v_f[k * mm];
        const double* rhok = &rho_f[k * mm];
        const double* qk = &q_t[k * nn];

        for (size_t i = 0; i < mm; ++i) {
          double acc = vk[i];
          for (size_t j = 0; j < nn; ++j) acc += th_f[i * nn + j] * xs[j];
          u[i] = acc;
        }
        // running cost at (t_k, X_k, u_k), trapezoidal weights
        double integrand = 0.0;
        for (size_t i = 0; i < nn; ++i) {
          double qx = 0.0;
          for (size_t j = 0; j < nn; ++j) qx += q_f[i * nn + j] * xs[j];
          integrand += xs[i] * qx + 2.0 * qk[i] * xs[i];
        }
        for (size_t i = 0; i < mm; ++i) {
          double sx = 0.0;
          for (size_t j = 0; j < nn; ++j) sx += s_f[i * nn + j] * xs[j];
          double ru = 0.0;
          for (size_t j = 0; j < mm; ++j) ru += r_f[i * mm + j] * u[j];
          integrand += u[i] * (2.0 * sx + ru) + 2.0 * rhok[i] * u[i];
        }
        cost += (k == 0 || k == steps) ? 0.5 * integrand : integrand;
        if (k == steps) final_integrand[static_cast<size_t>(p)] = integrand;

        if (store_cursor < stored_steps.size() && stored_steps[store_cursor] == k) {
          double* dst =
              &ens.states[(static_cast<size_t>(p) * stored_steps.size() + store_cursor) * n];
          for (size_t c = 0; c < nn; ++c) dst[c] = xs[c];
          ++store_cursor;
        }
        if (k == steps) break;

        const double* bk = &b_t[k * nn];
        const double* sigk = &sig_t[k * nn];
        for (size_t i = 0; i < nn; ++i) {
          double dr = bk[i], df = sigk[i];
          for (size_t j = 0; j < nn; ++j) {
            dr += a_f[i * nn + j] * xs[j];
            df += c_f[i * nn + j] * xs[j];
          }
          for (size_t j = 0; j < mm; ++j) {
            dr += b_f[i * mm + j] * u[j];
            df += d_f[i * mm + j] * u[j];
          }
          drift[i] = dr;
          diffu[i] = df;
        }
        const double dw = sign * sqrt_dt * rng.gaussian();
        double max_abs = 0.0;
        for (size_t i = 0; i < nn; ++i) {
          xs[i] += dt * drift[i] + dw * diffu[i];
          max_abs = std::max(max_abs, std::abs(xs[i]));
        }
        if (max_abs > kDivergenceCutoff) {
          diverged.store(true, std::memory_order_relaxed);
          bad = true;
          break;
        }
      }
      if (bad) break;
      ens.per_path_cost[static_cast<size_t>(p)] = cost * dt;
    }
  };

  const int workers = resolve_workers(cfg.workers, cfg.paths);
  if (workers == 1) {
    run_range(0, cfg.paths);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (cfg.paths + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int lo = w * chunk, hi = std::min(cfg.paths, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  if (diverged.load()) {
    throw Diverged("simulate: a path exceeded |X| = 1e12; the loop is not stable");
  }

  // Tail bound: fit E|X(t)|^2 ~ c e^{-lambda t} over the last quarter and
  // extrapolate the mean final running cost past the horizon.
  const size_t n_times = ens.times.size();
  const size_t q_begin = n_times - std::max<size_t>(2, n_times / 4);
  double sum_t = 0, sum_y = 0, sum_tt = 0, sum_ty = 0;
  int count = 0;
  for (size_t i = q_begin; i < n_times; ++i) {
    const double ms = ens.mean_square(static_cast<int>(i));
    if (ms <= 0) continue;
    const double t = ens.times[i], y = std::log(ms);
    sum_t += t;
    sum_y += y;
    sum_tt += t * t;
    sum_ty += t * y;
    ++count;
  }
  if (count < 2) {
    ens.truncation_tail_bound = 0.0;  // states vanished identically
  } else {
    const double denom = count * sum_tt - sum_t * sum_t;
    const double lambda = denom > 0 ? -(count * sum_ty - sum_t * sum_y) / denom : 0.0;
    const double mean_final = std::abs(pairwise_sum(final_integrand) / cfg.paths);
    ens.truncation_tail_bound =
        lambda > 1e-12 ? mean_final / lambda : std::numeric_limits<double>::infinity();
  }
  return ens;
}

CostEstimate estimate_cost(const GameSpec& spec, const PathEnsemble& ens,
                           const Matrix& theta, const ExpPoly& feedforward) {
  (void)spec;
  (void)theta;
  (void)feedforward;
  return mc_estimate(ens.per_path_cost);
}

namespace {

Matrix player_rows_replaced(const Matrix& theta, const GameSpec& spec, int player,
                            const Matrix& replacement) {
  Matrix out = theta;
  if (player == 1) {
    if (replacement.rows() != spec.m1() || replacement.cols() != spec.n()) {
      throw InvalidInput("perturbation: player-1 gain must be m1 x n");
    }
    out.topRows(spec.m1()) = replacement;
  } else {
    if (replacement.rows() != spec.m2() || replacement.cols() != spec.n()) {
      throw InvalidInput("perturbation: player-2 gain must be m2 x n");
    }
    out.bottomRows(spec.m2()) = replacement;
  }
  return out;
}

ExpPoly feedforward_with_delta(const ExpPoly& u, const GameSpec& spec, int player,
                               const ExpPoly& delta) {
  const Eigen::Index mi = player == 1 ? spec.m1() : spec.m2();
  if (delta.dim() != mi) throw InvalidInput("perturbation: delta_u dim mismatch");
  ExpPoly padded(spec.m());
  for (const auto& term : delta.terms()) {
    Vector c = Vector::Zero(spec.m());
    if (player == 1) {
      c.head(spec.m1()) = term.coeff;
    } else {
      c.tail(spec.m2()) = term.coeff;
    }
    padded.add_term(term.power, term.rate, c);
  }
  return u + padded;
}

}  // namespace

SaddleReport verify_saddle(const GameSpec& spec, const SaddleSolution& sol,
                           const std::vector<SaddlePerturbation>& perturbations,
                           const Vector& x, const SimConfig& cfg) {
  SaddleReport report;
  const PathEnsemble base = simulate(spec, sol.Theta, sol.u_star, x, cfg);
  report.baseline = mc_estimate(base.per_path_cost);

  for (const SaddlePerturbation& pert : perturbations) {
    if (pert.player != 1 && pert.player != 2) {
      throw InvalidInput("verify_saddle: player must be 1 or 2");
    }
    Matrix theta = sol.Theta;
    ExpPoly v = sol.u_star;
    if (pert.theta) theta = player_rows_replaced(theta, spec, pert.player, *pert.theta);
    if (pert.delta_u) v = feedforward_with_delta(v, spec, pert.player, *pert.delta_u);

    // Same cfg, same seed: common random numbers across arms.
    const PathEnsemble arm_ens = simulate(spec, theta, v, x, cfg);
    SaddleArm arm;
    arm.perturbation = pert;
    arm.cost = mc_estimate(arm_ens.per_path_cost);
    std::vector<double> diff(base.per_path_cost.size());
    for (size_t i = 0; i < diff.size(); ++i) {
      diff[i] = arm_ens.per_path_cost[i] - base.per_path_cost[i];
    }
    arm.paired_diff = mc_estimate(diff);
    // Player 1 minimizes: deviating must not lower J. Player 2 maximizes:
    // deviating must not raise it.
    arm.ok = pert.player == 1
                 ? arm.paired_diff.mean >= -3.0 * arm.paired_diff.std_error
                 : arm.paired_diff.mean <= 3.0 * arm.paired_diff.std_error;
    report.all_ok = report.all_ok && arm.ok;
    report.arms.push_back(std::move(arm));
  }

  if (!report.all_ok) {
    throw SaddleViolation("verify_saddle: a saddle inequality failed beyond 3 SE",
                          report);
  }
  return report;
}

StationarityReport verify_stationarity(const GameSpec& spec, const SaddleSolution& sol,
                                       const Vector& x, const SimConfig& cfg) {
  const PathEnsemble ens = simulate(spec, sol.Theta, sol.u_star, x, cfg);
  const Eigen::Index m = spec.m();
  const Matrix b = spec.B(), d = spec.D(), s = spec.S(), r = spec.R().mat();
  const Matrix& pm = sol.P.mat();

  // residual = W1 X + w0(t) with Y* and Z* written out:
  //   W1 = B^T P + D^T P (C + D Theta) + S + R Theta
  //   w0 = R u* + B^T eta + D^T (P D u* + P sigma + zeta) + rho
  const Matrix w1 = b.transpose() * pm +
                    d.transpose() * pm * (spec.C + d * sol.Theta) + s + r * sol.Theta;

  StationarityReport report;
  report.ok = true;
  double worst_gap = -std::numeric_limits<double>::infinity();
  std::vector<double> comp(static_cast<size_t>(ens.paths));
  for (size_t j = 0; j < ens.times.size(); ++j) {
    const double t = ens.times[j];
    const Vector u_t = sol.u_star.eval(t);
    const Vector w0 = r * u_t + b.transpose() * sol.eta.eval(t) +
                      d.transpose() * (pm * (d * u_t) +
                                       pm * spec.forcing.sigma.eval(t) +
                                       sol.zeta.eval(t)) +
                      spec.forcing.rho().eval(t);
    double mean_norm = 0.0, se_max = 0.0;
    for (Eigen::Index c = 0; c < m; ++c) {
      for (int p = 0; p < ens.paths; ++p) {
        double acc = w0(c);
        for (Eigen::Index i = 0; i < ens.n; ++i) {
          acc += w1(c, i) * ens.state(p, static_cast<int>(j), i);
        }
        comp[static_cast<size_t>(p)] = acc;
      }
      const McEstimate e = mc_estimate(comp);
      mean_norm = std::max(mean_norm, std::abs(e.mean));
      se_max = std::max(se_max, e.std_error);
    }
    const double tol_j = 10.0 * ens.dt + 3.0 * se_max;
    report.max_mean_residual = std::max(report.max_mean_residual, mean_norm);
    report.max_std_error = std::max(report.max_std_error, se_max);
    if (mean_norm - tol_j > worst_gap) {
      worst_gap = mean_norm - tol_j;
      report.tolerance = tol_j;
    }
    if (mean_norm > tol_j) report.ok = false;
  }
  return report;
}

std::vector<Matrix> moment_ode_reference(const Matrix& a_cl, const Matrix& c_cl,
                                         const Vector& x,
                                         const std::vector<double>& grid) {
  if (a_cl.rows() != a_cl.cols() || c_cl.rows() != c_cl.cols() ||
      a_cl.rows() != c_cl.rows() || x.size() != a_cl.rows()) {
    throw InvalidInput("moment_ode_reference: dims do not conform");
  }
  if (grid.empty()) return {};
  auto rhs = [&](const Matrix& m) -> Matrix {
    return a_cl * m + m * a_cl.transpose() + c_cl * m * c_cl.transpose();
  };
  const double h_max =
      0.01 / std::max(1.0, a_cl.cwiseAbs().maxCoeff() +
                               c_cl.cwiseAbs().maxCoeff() * c_cl.cwiseAbs().maxCoeff());

  std::vector<Matrix> out;
  out.reserve(grid.size());
  Matrix m = x * x.transpose();
  double t = grid.front();
  if (t != 0.0) {
    // integrate from 0 up to the first grid point
    const int sub = std::max(1, static_cast<int>(std::ceil(t / h_max)));
    const double h = t / sub;
    double tau = 0.0;
    for (int i = 0; i < sub; ++i, tau += h) {
      const Matrix k1 = rhs(m);
      const Matrix k2 = rhs(m + 0.5 * h * k1);
      const Matrix k3 = rhs(m + 0.5 * h * k2);
      const Matrix k4 = rhs(m + h * k3);
      m += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  out.push_back(m);
  for (size_t j = 1; j < grid.size(); ++j) {
    const double span = grid[j] - grid[j - 1];
    if (span < 0) throw InvalidInput("moment_ode_reference: grid must be ascending");
    const int sub = std::max(1, static_cast<int>(std::ceil(span / h_max)));
    const double h = span / sub;
    for (int i = 0; i < sub; ++i) {
      const Matrix k1 = rhs(m);
      const Matrix k2 = rhs(m + 0.5 * h * k1);
      const Matrix k3 = rhs(m + 0.5 * h * k2);
      const Matrix k4 = rhs(m + h * k3);
      m += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.push_back(m);
  }
  return out;
}

}  // namespace lqgame
