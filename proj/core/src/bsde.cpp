#include "lqgame/bsde.hpp"

#include <algorithm>
#include <cmath>

#include "lqgame/noise.hpp"

namespace lqgame {

BSDESpec::BSDESpec(Matrix a, Matrix c, ExpPoly driver)
    : A(std::move(a)), C(std::move(c)), phi(std::move(driver)) {
  if (A.rows() != A.cols() || C.rows() != C.cols() || A.rows() != C.rows()) {
    throw InvalidInput("BSDESpec: A, C must be square with equal dims");
  }
  if (phi.dim() != A.rows()) throw InvalidInput("BSDESpec: phi dim mismatch");
}

bool peng_shi_condition(const Matrix& a, const Matrix& c) {
  if (a.rows() != a.cols() || c.rows() != c.cols() || a.rows() != c.rows()) {
    throw InvalidInput("peng_shi_condition: dims do not conform");
  }
  const SymMatrix s(a + a.transpose() + c.transpose() * c);
  return s.max_eigenvalue() < 0.0;
}

BSDESolution solve_deterministic(const BSDESpec& spec) {
  if (!is_l2_stable(UncontrolledSystem(spec.A, spec.C)).stable) {
    throw NotStable("solve_deterministic: [A, C] is not mean-square stable");
  }
  BSDESolution sol;
  sol.stable_l2 = true;
  sol.Z = ExpPoly::zero(spec.n());
  sol.Y = stable_integral(spec.A.transpose(), spec.phi);
  return sol;
}

Vector TruncatedSolution::at(double t) const {
  const Eigen::Index n = y.empty() ? 0 : y.front().size();
  if (t >= horizon || times.empty()) return Vector::Zero(n);
  if (t <= times.front()) return y.front();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const size_t hi = static_cast<size_t>(it - times.begin());
  const size_t lo = hi - 1;
  if (hi >= times.size()) return y.back();
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  return (1.0 - w) * y[lo] + w * y[hi];
}

TruncatedSolution solve_truncated(const BSDESpec& spec, double horizon, int steps) {
  if (horizon <= 0) throw InvalidInput("solve_truncated: horizon must be > 0");
  if (steps < 1) throw InvalidInput("solve_truncated: steps must be >= 1");

  TruncatedSolution sol;
  sol.horizon = horizon;
  const double h = horizon / steps;
  sol.times.resize(steps + 1);
  sol.y.assign(steps + 1, Vector::Zero(spec.n()));
  for (int i = 0; i <= steps; ++i) sol.times[i] = h * i;

  // Backward classical RK4 on Y' = -A^T Y - phi(t), terminal Y(k) = 0.
  const Matrix at = spec.A.transpose();
  auto f = [&](double t, const Vector& y) -> Vector { return -at * y - spec.phi.eval(t); };
  Vector y = Vector::Zero(spec.n());
  for (int i = steps; i > 0; --i) {
    const double t = sol.times[i];
    const Vector k1 = f(t, y);
    const Vector k2 = f(t - 0.5 * h, y - 0.5 * h * k1);
    const Vector k3 = f(t - 0.5 * h, y - 0.5 * h * k2);
    const Vector k4 = f(t - h, y - h * k3);
    y -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    sol.y[i - 1] = y;
  }
  return sol;
}

McEstimate duality_estimate_y0(const BSDESpec& spec, const Vector& x, int paths,
                               double horizon, double dt, std::uint64_t seed) {
  if (x.size() != spec.n()) throw InvalidInput("duality_estimate_y0: x dim mismatch");
  if (paths < 2 || dt <= 0 || horizon < dt) {
    throw InvalidInput("duality_estimate_y0: bad simulation parameters");
  }
  const int steps = static_cast<int>(std::llround(horizon / dt));
  const double sqrt_dt = std::sqrt(dt);
  const size_t nn = static_cast<size_t>(spec.n());

  // flat row-major system and per-step driver samples, shared by all paths
  std::vector<double> a_f(nn * nn), c_f(nn * nn);
  for (size_t i = 0; i < nn; ++i) {
    for (size_t j = 0; j < nn; ++j) {
      a_f[i * nn + j] = spec.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      c_f[i * nn + j] = spec.C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  std::vector<double> phi_t((steps + 1) * nn);
  for (int k = 0; k <= steps; ++k) {
    const Vector v = spec.phi.eval(k * dt);
    for (size_t i = 0; i < nn; ++i) phi_t[k * nn + i] = v(static_cast<Eigen::Index>(i));
  }

  std::vector<double> integrals(static_cast<size_t>(paths));
  std::vector<double> xs(nn), next(nn);
  for (int p = 0; p < paths; ++p) {
    NoiseStream rng(seed, static_cast<std::uint64_t>(p));
    for (size_t i = 0; i < nn; ++i) xs[i] = x(static_cast<Eigen::Index>(i));
    double acc = 0.0;
    for (size_t i = 0; i < nn; ++i) acc += 0.5 * phi_t[i] * xs[i];
    for (int k = 1; k <= steps; ++k) {
      const double dw = sqrt_dt * rng.gaussian();
      for (size_t i = 0; i < nn; ++i) {
        double dr = 0.0, df = 0.0;
        for (size_t j = 0; j < nn; ++j) {
          dr += a_f[i * nn + j] * xs[j];
          df += c_f[i * nn + j] * xs[j];
        }
        next[i] = xs[i] + dt * dr + dw * df;
      }
      xs.swap(next);
      const double w = (k == steps) ? 0.5 : 1.0;
      const double* phik = &phi_t[k * nn];
      for (size_t i = 0; i < nn; ++i) acc += w * phik[i] * xs[i];
    }
    integrals[static_cast<size_t>(p)] = acc * dt;
  }
  return mc_estimate(integrals);
}

double a_priori_ratio(const BSDESpec& spec) {
  if (spec.phi.is_zero()) return 0.0;
  const BSDESolution sol = solve_deterministic(spec);
  const double phi_sq = ExpPoly::dot(spec.phi, spec.phi).integral_scalar();
  const double y_sq = ExpPoly::dot(sol.Y, sol.Y).integral_scalar();

  double sup_sq = 0.0;
  const double t_max = 20.0 / std::min(sol.Y.min_rate(), spec.phi.min_rate());
  for (int i = 0; i <= 4000; ++i) {
    const double t = t_max * i / 4000.0;
    sup_sq = std::max(sup_sq, sol.Y.eval(t).squaredNorm());
  }
  return (sup_sq + y_sq) / phi_sq;
}

}  // namespace lqgame
