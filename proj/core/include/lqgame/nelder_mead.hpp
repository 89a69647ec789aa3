#pragma once

#include <functional>
#include <limits>

#include "lqgame/linalg.hpp"

namespace lqgame {

struct NelderMeadOptions {
  int max_evals = 400;
  double initial_step = 0.5;
  double f_tol = 1e-12;     // simplex spread stopping tolerance
  double x_tol = 1e-10;
  /// Stop as soon as a point with f < target is seen (e.g. a strictly
  /// negative spectral abscissa); disabled when -inf.
  double target = -std::numeric_limits<double>::infinity();
};

struct NelderMeadResult {
  Vector x;
  double f = 0.0;
  int evals = 0;
  bool hit_target = false;
};

/// Derivative-free simplex minimization of f over R^dim starting at x0.
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f,
                             const Vector& x0, const NelderMeadOptions& opts = {});

}  // namespace lqgame
