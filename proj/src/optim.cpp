#include "biphoton/optim.hpp"

#include <algorithm>
#include <cmath>

#include "biphoton/errors.hpp"

namespace bp {

OptimResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                        std::vector<double> x0, std::vector<double> step, int max_iter,
                        double ftol) {
  const size_t n = x0.size();
  if (step.size() != n || n == 0) throw NumericError("nelder_mead: bad dimensions");

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fx(n + 1);
  for (size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
  for (size_t i = 0; i <= n; ++i) fx[i] = f(simplex[i]);

  OptimResult res;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    // order: simplex[order[0]] best
    std::vector<size_t> order(n + 1);
    for (size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return fx[a] < fx[b]; });
    const size_t best = order[0], worst = order[n], second = order[n - 1];

    const double spread = std::abs(fx[worst] - fx[best]);
    if (spread <= ftol * (std::abs(fx[best]) + ftol)) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / static_cast<double>(n);
    }
    auto blend = [&](double t) {
      std::vector<double> x(n);
      for (size_t d = 0; d < n; ++d)
        x[d] = centroid[d] + t * (simplex[worst][d] - centroid[d]);
      return x;
    };

    const std::vector<double> refl = blend(-1.0);
    const double f_refl = f(refl);
    if (f_refl < fx[best]) {
      const std::vector<double> expa = blend(-2.0);
      const double f_expa = f(expa);
      if (f_expa < f_refl) {
        simplex[worst] = expa;
        fx[worst] = f_expa;
      } else {
        simplex[worst] = refl;
        fx[worst] = f_refl;
      }
    } else if (f_refl < fx[second]) {
      simplex[worst] = refl;
      fx[worst] = f_refl;
    } else {
      const std::vector<double> contr = blend(f_refl < fx[worst] ? -0.5 : 0.5);
      const double f_contr = f(contr);
      if (f_contr < std::min(f_refl, fx[worst])) {
        simplex[worst] = contr;
        fx[worst] = f_contr;
      } else {
        // shrink toward the best vertex
        for (size_t i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (size_t d = 0; d < n; ++d)
            simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
          fx[i] = f(simplex[i]);
        }
      }
    }
  }

  size_t best = 0;
  for (size_t i = 1; i <= n; ++i)
    if (fx[i] < fx[best]) best = i;
  res.x = simplex[best];
  res.fmin = fx[best];
  res.iterations = iter;
  return res;
}

double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double xtol) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace bp
