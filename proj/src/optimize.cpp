#include "mfi/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mfi {

namespace {

double simplex_diameter(const std::vector<std::vector<double>>& pts) {
  double d = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      for (std::size_t i = 0; i < pts[a].size(); ++i)
        d = std::max(d, std::abs(pts[a][i] - pts[b][i]));
  return d;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& raw_objective,
                          const std::vector<double>& x0, const SimplexOptions& options) {
  // NaN would break the vertex ordering; treat it as an inadmissible point.
  const auto objective = [&raw_objective](const std::vector<double>& x) {
    const double v = raw_objective(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += options.initial_step;
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = objective(pts[i]);

  SimplexResult result;
  std::vector<std::size_t> order(n + 1);
  for (; result.iterations < options.max_iterations; ++result.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&fv](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    if (simplex_diameter(pts) < options.diameter_tol) {
      result.converged = true;
      break;
    }
    const std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == worst) continue;
      for (std::size_t i = 0; i < n; ++i) centroid[i] += pts[k][i];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double coeff) {
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i)
        p[i] = centroid[i] + coeff * (pts[worst][i] - centroid[i]);
      return p;
    };

    std::vector<double> reflected = blend(-1.0);
    const double f_reflected = objective(reflected);
    if (f_reflected < fv[best]) {
      std::vector<double> expanded = blend(-2.0);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        pts[worst] = std::move(expanded);
        fv[worst] = f_expanded;
      } else {
        pts[worst] = std::move(reflected);
        fv[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fv[second_worst]) {
      pts[worst] = std::move(reflected);
      fv[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < fv[worst];
    std::vector<double> contracted = blend(outside ? -0.5 : 0.5);
    const double f_contracted = objective(contracted);
    if (f_contracted < std::min(fv[worst], f_reflected)) {
      pts[worst] = std::move(contracted);
      fv[worst] = f_contracted;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == best) continue;
      for (std::size_t i = 0; i < n; ++i)
        pts[k][i] = pts[best][i] + 0.5 * (pts[k][i] - pts[best][i]);
      fv[k] = objective(pts[k]);
    }
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k <= n; ++k)
    if (fv[k] < fv[best]) best = k;
  result.x = pts[best];
  result.fx = fv[best];
  return result;
}

}  // namespace mfi
