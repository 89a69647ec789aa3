#include "lqgame/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace lqgame {

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f,
                             const Vector& x0, const NelderMeadOptions& opts) {
  const int n = static_cast<int>(x0.size());
  NelderMeadResult result;
  result.x = x0;

  int evals = 0;
  bool hit = false;
  auto eval = [&](const Vector& x) {
    ++evals;
    double v = f(x);
    if (v < opts.target) hit = true;
    return v;
  };

  std::vector<Vector> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  val[0] = eval(pts[0]);
  for (int i = 0; i < n && !hit; ++i) {
    pts[i + 1](i) += opts.initial_step;
    val[i + 1] = eval(pts[i + 1]);
  }

  std::vector<int> order(n + 1);
  std::iota(order.begin(), order.end(), 0);
  auto sort_simplex = [&] {
    std::sort(order.begin(), order.end(), [&](int a, int b) { return val[a] < val[b]; });
  };

  while (!hit && evals < opts.max_evals) {
    sort_simplex();
    const int best = order[0], worst = order[n], second = order[n > 0 ? n - 1 : 0];

    double spread = std::abs(val[worst] - val[best]);
    double width = 0.0;
    for (int i = 1; i <= n; ++i) width = std::max(width, (pts[order[i]] - pts[best]).norm());
    if (spread < opts.f_tol && width < opts.x_tol) break;

    Vector centroid = Vector::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[order[i]];
    centroid /= std::max(n, 1);

    const Vector refl = centroid + (centroid - pts[worst]);
    const double f_refl = eval(refl);
    if (hit) { pts[worst] = refl; val[worst] = f_refl; break; }

    if (f_refl < val[best]) {
      const Vector expa = centroid + 2.0 * (centroid - pts[worst]);
      const double f_expa = eval(expa);
      if (f_expa < f_refl) {
        pts[worst] = expa; val[worst] = f_expa;
      } else {
        pts[worst] = refl; val[worst] = f_refl;
      }
    } else if (f_refl < val[second]) {
      pts[worst] = refl; val[worst] = f_refl;
    } else {
      const Vector contr = centroid + 0.5 * (pts[worst] - centroid);
      const double f_contr = eval(contr);
      if (!hit && f_contr >= val[worst]) {
        for (int i = 1; i <= n && !hit; ++i) {
          pts[order[i]] = pts[best] + 0.5 * (pts[order[i]] - pts[best]);
          val[order[i]] = eval(pts[order[i]]);
        }
      } else {
        pts[worst] = contr; val[worst] = f_contr;
      }
    }
  }

  sort_simplex();
  result.x = pts[order[0]];
  result.f = val[order[0]];
  result.evals = evals;
  result.hit_target = hit;
  return result;
}

}  // namespace lqgame
