#include "nullkdv/numerics/finite_difference.hpp"

#include "nullkdv/error.hpp"

namespace nullkdv::numerics {

std::vector<double> fd_derivative(std::span<const double> v, double h) {
  const std::size_t n = v.size();
  if (n < 3) throw Error(ErrorKind::InvalidArgument, "finite differences need at least 3 nodes");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return d;
}

std::vector<std::vector<double>> fd_jets(std::span<const double> values, double h, int max_order) {
  std::vector<std::vector<double>> jets;
  jets.emplace_back(values.begin(), values.end());
  for (int m = 1; m <= max_order; ++m) jets.push_back(fd_derivative(jets.back(), h));
  return jets;
}

std::vector<double> cumulative_trapezoid(std::span<const double> v, double h) {
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
  return out;
}

}  // namespace nullkdv::numerics
