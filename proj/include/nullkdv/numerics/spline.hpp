#pragma once

#include <span>
#include <vector>

namespace nullkdv::numerics {

/// Interpolating cubic spline with not-a-knot end conditions on strictly
/// increasing, possibly non-uniform knots. Needs at least four knots.
/// Evaluation outside the knot range extrapolates the end cubic.
class CubicSpline {
 public:
  CubicSpline(std::span<const double> x, std::span<const double> y);

  double operator()(double x) const { return eval(x, 0); }
  /// derivative = 0, 1, 2 or 3
  double eval(double x, int derivative) const;

  /// Integral of the spline from the first knot to each knot.
  std::vector<double> cumulative_integral() const;
  /// Integral of the spline from the first knot to x.
  double integral(double x) const;

  double front() const noexcept { return x_.front(); }
  double back() const noexcept { return x_.back(); }

 private:
  std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
  std::vector<double> area_;       // integral up to each knot
};

}  // namespace nullkdv::numerics
