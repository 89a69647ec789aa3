#pragma once

#include <random>
#include <vector>

#include "lqgame/expoly.hpp"
#include "lqgame/stability.hpp"

namespace lqgame::testing {

/// Eigenvalues of a symmetric matrix (dim <= 3) from the characteristic
/// polynomial in closed form, independent of any iterative eigensolver.
std::vector<double> charpoly_eigenvalues(const SymMatrix& x);

/// Composite-Simpson evaluation of integral_t^{t+span} e^{M (s-t)} phi(s) ds
/// using a complex eigendecomposition of M for the matrix exponential.
Vector stable_integral_quadrature(const Matrix& m, const ExpPoly& phi, double t,
                                  double span, int intervals = 40000);

/// Composite-Simpson integral over [0, span] of a scalar function built
/// from an ExpPoly, for a-priori and value-constant cross-checks.
double simpson_scalar(const ExpPoly& f, double span, int intervals = 40000);

/// Random matrix with iid N(0,1) entries (deterministic mt19937 seed).
Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                     double scale = 1.0);

/// Random symmetric matrix.
SymMatrix random_symmetric(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0);

/// Random rank-deficient matrix built as a low-rank product.
Matrix random_low_rank(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                       Eigen::Index rank);

/// Random mean-square stable pair [A, C] with spectral abscissa of the
/// vectorized generator at most -margin.
UncontrolledSystem random_stable_pair(std::mt19937_64& rng, Eigen::Index n,
                                      double margin = 0.2);

/// 4-Penrose-condition defect of a candidate pseudo-inverse.
double penrose_defect(const Matrix& m, const Matrix& pinv);

/// Extended Schur condition (i): M - L N^+ L^T >= 0, N >= 0, L(I - N N^+) = 0.
bool schur_condition_explicit(const SymMatrix& m, const Matrix& l, const SymMatrix& n,
                              double tol);

}  // namespace lqgame::testing
