#pragma once

// Adaptive Dormand–Prince 5(4) integration reporting the solution at the
// nodes of a caller-supplied monotone grid.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace nullkdv::numerics {

using OdeState = Eigen::VectorXd;
using OdeRhs = std::function<OdeState(double, const OdeState&)>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Upper bound on |step|; the grid spacing also caps each step.
  double max_step = std::numeric_limits<double>::infinity();
  /// A step below min_step_ratio * max(1, |x|) counts as a collapse.
  double min_step_ratio = 1e-12;
  std::size_t max_steps = 20'000'000;
  /// Abort once any component exceeds this magnitude.
  double blowup_norm = 1e12;
};

struct OdeSolution {
  std::vector<double> x;
  std::vector<OdeState> y;  // y[i] at x[i]; may stop short of the grid
  bool complete = false;
  std::string stop_reason;
  std::size_t steps = 0;
};

/// Integrates from grid[0] (where y = y0) through every grid node in
/// order. The grid may increase or decrease.
OdeSolution integrate(const OdeRhs& f, std::span<const double> grid, const OdeState& y0,
                      const OdeOptions& opts = {});

}  // namespace nullkdv::numerics
