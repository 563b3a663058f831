#pragma once

#include <functional>
#include <vector>

namespace bp {

struct OptimResult {
  std::vector<double> x;
  double fmin = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead downhill simplex; step gives the initial simplex scale per
// coordinate. Stops when the simplex function spread falls below ftol
// (relative) or max_iter is reached.
OptimResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                        std::vector<double> x0, std::vector<double> step, int max_iter,
                        double ftol);

// Golden-section minimizer on [lo, hi].
double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double xtol);

}  // namespace bp
