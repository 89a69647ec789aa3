#pragma once

#include <vector>

#include "lqgame/linalg.hpp"

namespace lqgame {

/// One term t^power * exp(-rate * t) * coeff of a vector-valued function.
struct ExpPolyTerm {
  int power = 0;
  double rate = 0.0;  // decay rate, must be > 0 for nonzero terms
  Vector coeff;
};

/// Finite sum of t^k e^{-a t} v terms: the class of deterministic forcing
/// signals the solvers handle in closed form. It is closed under linear
/// maps, sums, products (via dot), differentiation, and the stable
/// backward integral used by the deterministic BSDE solver.
class ExpPoly {
 public:
  ExpPoly() = default;
  explicit ExpPoly(Eigen::Index dim) : dim_(dim) {}

  static ExpPoly zero(Eigen::Index dim) { return ExpPoly(dim); }

  /// Adds t^power e^{-rate t} coeff. Zero coefficients are dropped;
  /// nonzero terms require rate > 0 and power >= 0.
  ExpPoly& add_term(int power, double rate, Vector coeff);

  Eigen::Index dim() const { return dim_; }
  const std::vector<ExpPolyTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Vector eval(double t) const;
  double eval_scalar(double t) const;  // dim() == 1 convenience

  ExpPoly derivative() const;
  /// t -> M f(t).
  ExpPoly apply(const Matrix& m) const;
  ExpPoly scaled(double s) const;
  ExpPoly operator+(const ExpPoly& other) const;
  ExpPoly operator-(const ExpPoly& other) const;

  /// Component slice [start, start+len).
  ExpPoly segment(Eigen::Index start, Eigen::Index len) const;
  /// Stacks f on top of g.
  static ExpPoly stacked(const ExpPoly& top, const ExpPoly& bottom);

  /// Scalar-valued product t -> <f(t), g(t)>.
  static ExpPoly dot(const ExpPoly& f, const ExpPoly& g);

  /// Componentwise integral over [0, inf); requires all rates > 0.
  Vector integral() const;
  double integral_scalar() const;

  /// Slowest decay rate among nonzero terms; +inf when identically zero.
  double min_rate() const;

  /// Largest |f| over a sampling grid, for residual checks.
  double max_abs_on_grid(const std::vector<double>& times) const;

 private:
  void merge(int power, double rate, const Vector& coeff);

  Eigen::Index dim_ = 0;
  std::vector<ExpPolyTerm> terms_;  // kept normalized: unique (power, rate)
};

/// Closed form of t -> integral_t^inf e^{M (s-t)} phi(s) ds for Hurwitz M.
/// Throws NotStable if the spectral abscissa of M is >= 0.
ExpPoly stable_integral(const Matrix& m, const ExpPoly& phi);

}  // namespace lqgame
