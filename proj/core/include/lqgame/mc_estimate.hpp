#pragma once

#include <span>

namespace lqgame {

/// Monte-Carlo sample mean with its standard error (sample std / sqrt(paths)).
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int paths = 0;
};

/// Pairwise (tree) summation in fixed index order: the reduction result is
/// independent of how the values were produced across workers.
double pairwise_sum(std::span<const double> values);

McEstimate mc_estimate(std::span<const double> values);

}  // namespace lqgame
