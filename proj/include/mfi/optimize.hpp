#pragma once

#include <functional>
#include <vector>

namespace mfi {

struct SimplexOptions {
  double diameter_tol = 1e-9;  // stop when the simplex fits in this box
  int max_iterations = 20000;
  double initial_step = 0.5;
};

struct SimplexResult {
  std::vector<double> x;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Derivative-free Nelder-Mead simplex search. The objective may return
// +infinity to mark inadmissible points.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          const std::vector<double>& x0, const SimplexOptions& options = {});

}  // namespace mfi
