#include "lqgame/mc_estimate.hpp"

#include <cmath>
#include <vector>

namespace lqgame {

double pairwise_sum(std::span<const double> values) {
  const size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 32) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const size_t half = n / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

McEstimate mc_estimate(std::span<const double> values) {
  McEstimate e;
  e.paths = static_cast<int>(values.size());
  if (e.paths == 0) return e;
  e.mean = pairwise_sum(values) / e.paths;
  if (e.paths < 2) return e;
  std::vector<double> sq(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - e.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / (e.paths - 1);
  e.std_error = std::sqrt(var / e.paths);
  return e;
}

}  // namespace lqgame
