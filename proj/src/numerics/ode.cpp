#include "nullkdv/numerics/ode.hpp"

#include <algorithm>
#include <cmath>

#include "nullkdv/error.hpp"

namespace nullkdv::numerics {

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Error weights: 5th-order minus embedded 4th-order solution.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeSolution integrate(const OdeRhs& f, std::span<const double> grid, const OdeState& y0,
                      const OdeOptions& opts) {
  OdeSolution sol;
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty integration grid");
  sol.x.push_back(grid[0]);
  sol.y.push_back(y0);
  if (grid.size() == 1) {
    sol.complete = true;
    return sol;
  }
  const double dir = grid[1] > grid[0] ? 1.0 : -1.0;

  double x = grid[0];
  OdeState y = y0;
  OdeState k1 = f(x, y);
  double h = opts.max_step;
  {
    // Initial step from the local scale of y and y'.
    const double sc = opts.atol + opts.rtol * y.cwiseAbs().maxCoeff();
    const double d0 = y.cwiseAbs().maxCoeff() / sc;
    const double d1 = k1.cwiseAbs().maxCoeff() / sc;
    const double guess = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, std::max(guess, 1e-10));
  }

  for (std::size_t node = 1; node < grid.size(); ++node) {
    const double target = grid[node];
    if ((target - x) * dir < 0.0) throw Error(ErrorKind::InvalidArgument, "integration grid not monotone");
    while ((target - x) * dir > 0.0) {
      if (++sol.steps > opts.max_steps) {
        sol.stop_reason = "maximum step count exceeded near x = " + std::to_string(x);
        return sol;
      }
      const double remaining = std::abs(target - x);
      bool last = false;
      double step = std::min({h, opts.max_step});
      if (step >= remaining * (1.0 - 1e-12)) {
        step = remaining;
        last = true;
      }
      const double hs = dir * step;
      const OdeState k2 = f(x + c2 * hs, y + hs * (a21 * k1));
      const OdeState k3 = f(x + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
      const OdeState k4 = f(x + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
      const OdeState k5 = f(x + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const OdeState k6 =
          f(x + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const OdeState y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const OdeState k7 = f(x + hs, y_new);
      const OdeState err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err_norm = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err_norm = std::max(err_norm, std::abs(err[i]) / sc);
      }
      const bool finite = y_new.allFinite() && std::isfinite(err_norm);
      if (finite && err_norm <= 1.0) {
        x = last ? target : x + hs;
        y = y_new;
        k1 = k7;
        if (y.cwiseAbs().maxCoeff() > opts.blowup_norm) {
          sol.stop_reason = "solution magnitude exceeded " + std::to_string(opts.blowup_norm) +
                            " near x = " + std::to_string(x);
          return sol;
        }
        const double grow = err_norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err_norm, -0.2));
        // Do not let a short final step to a node shrink the working step.
        h = last ? std::max(h, step * grow) : step * grow;
      } else {
        const double shrink = finite ? std::max(0.1, 0.9 * std::pow(err_norm, -0.2)) : 0.1;
        h = step * shrink;
        if (h < opts.min_step_ratio * std::max(1.0, std::abs(x))) {
          sol.stop_reason = "step size collapsed near x = " + std::to_string(x);
          return sol;
        }
      }
    }
    sol.x.push_back(target);
    sol.y.push_back(y);
  }
  sol.complete = true;
  return sol;
}

}  // namespace nullkdv::numerics
