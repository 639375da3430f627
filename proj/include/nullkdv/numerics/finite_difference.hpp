#pragma once

#include <span>
#include <vector>

namespace nullkdv::numerics {

/// First derivative on a uniform grid: centered in the interior,
/// second-order one-sided at the two ends.
std::vector<double> fd_derivative(std::span<const double> values, double h);

/// Rows 0..max_order of repeated fd_derivative.
std::vector<std::vector<double>> fd_jets(std::span<const double> values, double h, int max_order);

/// Running trapezoid integral starting from 0 at the first node.
std::vector<double> cumulative_trapezoid(std::span<const double> values, double h);

}  // namespace nullkdv::numerics
