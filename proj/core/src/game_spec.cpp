#include "lqgame/game_spec.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace lqgame {

ForcingTerms ForcingTerms::zero(Eigen::Index n, Eigen::Index m1, Eigen::Index m2) {
  ForcingTerms f;
  f.b = ExpPoly::zero(n);
  f.sigma = ExpPoly::zero(n);
  f.q = ExpPoly::zero(n);
  f.rho1 = ExpPoly::zero(m1);
  f.rho2 = ExpPoly::zero(m2);
  return f;
}

bool ForcingTerms::all_zero() const {
  return b.is_zero() && sigma.is_zero() && q.is_zero() && rho1.is_zero() &&
         rho2.is_zero();
}

double ForcingTerms::min_rate() const {
  double r = std::numeric_limits<double>::infinity();
  for (const ExpPoly* f : {&b, &sigma, &q, &rho1, &rho2}) {
    r = std::min(r, f->min_rate());
  }
  return r;
}

Matrix GameSpec::B() const {
  Matrix b(n(), m());
  b.leftCols(m1()) = B1;
  b.rightCols(m2()) = B2;
  return b;
}

Matrix GameSpec::D() const {
  Matrix d(n(), m());
  d.leftCols(m1()) = D1;
  d.rightCols(m2()) = D2;
  return d;
}

Matrix GameSpec::S() const {
  Matrix s(m(), n());
  s.topRows(m1()) = S1;
  s.bottomRows(m2()) = S2;
  return s;
}

SymMatrix GameSpec::R() const {
  Matrix r(m(), m());
  r.topLeftCorner(m1(), m1()) = R11.mat();
  r.topRightCorner(m1(), m2()) = R12;
  r.bottomLeftCorner(m2(), m1()) = R12.transpose();
  r.bottomRightCorner(m2(), m2()) = R22.mat();
  return SymMatrix(r);
}

namespace {

void check_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                 const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw InvalidInput(std::string(name) + ": expected " + std::to_string(rows) +
                       "x" + std::to_string(cols) + ", got " +
                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  require_finite(m, name);
}

}  // namespace

void GameSpec::validate() const {
  const Eigen::Index nn = n(), k1 = m1(), k2 = m2();
  if (nn < 1) throw InvalidInput("GameSpec: state dimension must be >= 1");
  if (k1 < 1) throw InvalidInput("GameSpec: player 1 control dimension must be >= 1");
  check_shape(A, nn, nn, "A");
  check_shape(C, nn, nn, "C");
  check_shape(B1, nn, k1, "B1");
  check_shape(B2, nn, k2, "B2");
  check_shape(D1, nn, k1, "D1");
  check_shape(D2, nn, k2, "D2");
  check_shape(Q.mat(), nn, nn, "Q");
  check_shape(S1, k1, nn, "S1");
  check_shape(S2, k2, nn, "S2");
  check_shape(R11.mat(), k1, k1, "R11");
  check_shape(R22.mat(), k2, k2, "R22");
  check_shape(R12, k1, k2, "R12");
  if (forcing.b.dim() != nn || forcing.sigma.dim() != nn || forcing.q.dim() != nn) {
    throw InvalidInput("forcing: b, sigma, q must have dim n");
  }
  if (forcing.rho1.dim() != k1 || forcing.rho2.dim() != k2) {
    throw InvalidInput("forcing: rho1, rho2 must have dims m1, m2");
  }
}

GameSpec GameSpec::one_player(Matrix a, Matrix c, Matrix b, Matrix d, SymMatrix q,
                              Matrix s, SymMatrix r) {
  GameSpec spec;
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  spec.A = std::move(a);
  spec.C = std::move(c);
  spec.B1 = std::move(b);
  spec.D1 = std::move(d);
  spec.B2 = Matrix(n, 0);
  spec.D2 = Matrix(n, 0);
  spec.Q = std::move(q);
  spec.S1 = std::move(s);
  spec.S2 = Matrix(0, n);
  spec.R11 = std::move(r);
  spec.R22 = SymMatrix::Zero(0);
  spec.R12 = Matrix(m, 0);
  spec.forcing = ForcingTerms::zero(n, m, 0);
  spec.validate();
  return spec;
}

}  // namespace lqgame
