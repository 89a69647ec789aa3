#include "lqgame/expoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lqgame {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

ExpPoly& ExpPoly::add_term(int power, double rate, Vector coeff) {
  if (coeff.size() != dim_) throw InvalidInput("ExpPoly: coefficient dim mismatch");
  require_finite(coeff, "ExpPoly term");
  if (coeff.isZero(0.0)) return *this;
  if (power < 0) throw InvalidInput("ExpPoly: negative power");
  if (!(rate > 0.0)) throw InvalidInput("ExpPoly: nonzero term needs decay rate > 0");
  merge(power, rate, coeff);
  return *this;
}

void ExpPoly::merge(int power, double rate, const Vector& coeff) {
  for (auto& t : terms_) {
    if (t.power == power && t.rate == rate) {
      t.coeff += coeff;
      if (t.coeff.isZero(0.0)) {
        terms_.erase(terms_.begin() + (&t - terms_.data()));
      }
      return;
    }
  }
  terms_.push_back({power, rate, coeff});
  std::sort(terms_.begin(), terms_.end(), [](const ExpPolyTerm& a, const ExpPolyTerm& b) {
    if (a.rate != b.rate) return a.rate < b.rate;
    return a.power < b.power;
  });
}

Vector ExpPoly::eval(double t) const {
  Vector v = Vector::Zero(dim_);
  for (const auto& term : terms_) {
    v += std::pow(t, term.power) * std::exp(-term.rate * t) * term.coeff;
  }
  return v;
}

double ExpPoly::eval_scalar(double t) const {
  if (dim_ != 1) throw InvalidInput("ExpPoly: eval_scalar on non-scalar function");
  return eval(t)(0);
}

ExpPoly ExpPoly::derivative() const {
  ExpPoly d(dim_);
  for (const auto& term : terms_) {
    if (term.power > 0) {
      d.merge(term.power - 1, term.rate, static_cast<double>(term.power) * term.coeff);
    }
    d.merge(term.power, term.rate, -term.rate * term.coeff);
  }
  return d;
}

ExpPoly ExpPoly::apply(const Matrix& m) const {
  if (m.cols() != dim_) throw InvalidInput("ExpPoly: matrix dim mismatch in apply");
  ExpPoly out(m.rows());
  for (const auto& term : terms_) {
    Vector c = m * term.coeff;
    if (!c.isZero(0.0)) out.merge(term.power, term.rate, c);
  }
  return out;
}

ExpPoly ExpPoly::scaled(double s) const {
  ExpPoly out(dim_);
  if (s == 0.0) return out;
  for (const auto& term : terms_) out.merge(term.power, term.rate, s * term.coeff);
  return out;
}

ExpPoly ExpPoly::operator+(const ExpPoly& other) const {
  if (other.dim_ != dim_) throw InvalidInput("ExpPoly: dim mismatch in +");
  ExpPoly out = *this;
  for (const auto& term : other.terms_) out.merge(term.power, term.rate, term.coeff);
  return out;
}

ExpPoly ExpPoly::operator-(const ExpPoly& other) const {
  return *this + other.scaled(-1.0);
}

ExpPoly ExpPoly::segment(Eigen::Index start, Eigen::Index len) const {
  if (start < 0 || start + len > dim_) throw InvalidInput("ExpPoly: bad segment");
  ExpPoly out(len);
  for (const auto& term : terms_) {
    Vector c = term.coeff.segment(start, len);
    if (!c.isZero(0.0)) out.merge(term.power, term.rate, c);
  }
  return out;
}

ExpPoly ExpPoly::stacked(const ExpPoly& top, const ExpPoly& bottom) {
  ExpPoly out(top.dim_ + bottom.dim_);
  for (const auto& term : top.terms_) {
    Vector c = Vector::Zero(out.dim_);
    c.head(top.dim_) = term.coeff;
    out.merge(term.power, term.rate, c);
  }
  for (const auto& term : bottom.terms_) {
    Vector c = Vector::Zero(out.dim_);
    c.tail(bottom.dim_) = term.coeff;
    out.merge(term.power, term.rate, c);
  }
  return out;
}

ExpPoly ExpPoly::dot(const ExpPoly& f, const ExpPoly& g) {
  if (f.dim_ != g.dim_) throw InvalidInput("ExpPoly: dim mismatch in dot");
  ExpPoly out(1);
  for (const auto& a : f.terms_) {
    for (const auto& b : g.terms_) {
      const double c = a.coeff.dot(b.coeff);
      if (c != 0.0) {
        out.merge(a.power + b.power, a.rate + b.rate, Vector::Constant(1, c));
      }
    }
  }
  return out;
}

Vector ExpPoly::integral() const {
  // integral_0^inf t^k e^{-a t} dt = k! / a^{k+1}
  Vector v = Vector::Zero(dim_);
  for (const auto& term : terms_) {
    v += factorial(term.power) / std::pow(term.rate, term.power + 1) * term.coeff;
  }
  return v;
}

double ExpPoly::integral_scalar() const {
  if (dim_ != 1) throw InvalidInput("ExpPoly: integral_scalar on non-scalar function");
  return integral()(0);
}

double ExpPoly::min_rate() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& term : terms_) r = std::min(r, term.rate);
  return r;
}

double ExpPoly::max_abs_on_grid(const std::vector<double>& times) const {
  double m = 0.0;
  for (double t : times) {
    Vector v = eval(t);
    if (v.size() > 0) m = std::max(m, v.cwiseAbs().maxCoeff());
  }
  return m;
}

ExpPoly stable_integral(const Matrix& m, const ExpPoly& phi) {
  if (m.rows() != m.cols() || m.rows() != phi.dim()) {
    throw InvalidInput("stable_integral: dims do not conform");
  }
  if (phi.is_zero()) return ExpPoly::zero(phi.dim());
  if (spectral_abscissa(m) >= 0.0) {
    throw NotStable("stable_integral: drift matrix is not Hurwitz");
  }
  // For a term t^k e^{-a t} v, substituting s = t + tau gives
  //   e^{-a t} sum_j C(k,j) t^{k-j} j! G^{-(j+1)} v,  G = a I - M,
  // which is nonsingular because M is Hurwitz and a > 0.
  ExpPoly y(phi.dim());
  for (const auto& term : phi.terms()) {
    const Matrix g = term.rate * Matrix::Identity(m.rows(), m.cols()) - m;
    Eigen::PartialPivLU<Matrix> lu(g);
    Vector x = lu.solve(term.coeff);
    for (int j = 0; j <= term.power; ++j) {
      Vector c = binomial(term.power, j) * factorial(j) * x;
      if (!c.isZero(0.0)) {
        ExpPoly piece(phi.dim());
        piece.add_term(term.power - j, term.rate, c);
        y = y + piece;
      }
      if (j < term.power) x = lu.solve(x);
    }
  }
  return y;
}

}  // namespace lqgame
