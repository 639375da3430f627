#include "nullkdv/numerics/spline.hpp"

#include <algorithm>

#include "nullkdv/error.hpp"

namespace nullkdv::numerics {

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
  const std::size_t n = x_.size();
  if (n < 4 || y_.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "spline needs at least 4 matching knots");
  }
  std::vector<double> h(n - 1), slope(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    if (!(h[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "spline knots must increase strictly");
    slope[i] = (y_[i + 1] - y_[i]) / h[i];
  }

  // Unknowns m_1..m_{n-2}; m_0 and m_{n-1} are eliminated through the
  // not-a-knot conditions (third derivative continuous at x_1, x_{n-2}).
  const std::size_t k = n - 2;
  std::vector<double> lower(k, 0.0), diag(k, 0.0), upper(k, 0.0), rhs(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t i = j + 1;
    lower[j] = h[i - 1];
    diag[j] = 2.0 * (h[i - 1] + h[i]);
    upper[j] = h[i];
    rhs[j] = 6.0 * (slope[i] - slope[i - 1]);
  }
  // m0 = ((h0 + h1) m1 - h0 m2) / h1
  diag[0] += h[0] * (h[0] + h[1]) / h[1];
  upper[0] -= h[0] * h[0] / h[1];
  // m_{n-1} = ((h_{n-2} + h_{n-3}) m_{n-2} - h_{n-2} m_{n-3}) / h_{n-3}
  const double ha = h[n - 3], hb = h[n - 2];
  diag[k - 1] += hb * (ha + hb) / ha;
  lower[k - 1] -= hb * hb / ha;

  if (k == 2) {
    // Two unknowns, full 2x2 system (the corrections above touch both rows).
    const double a = diag[0], b = upper[0], c = lower[1], d = diag[1];
    const double det = a * d - b * c;
    std::vector<double> sol = {(rhs[0] * d - b * rhs[1]) / det, (a * rhs[1] - c * rhs[0]) / det};
    rhs = sol;
  } else {
    for (std::size_t j = 1; j < k; ++j) {
      const double w = lower[j] / diag[j - 1];
      diag[j] -= w * upper[j - 1];
      rhs[j] -= w * rhs[j - 1];
    }
    rhs[k - 1] /= diag[k - 1];
    for (std::size_t j = k - 1; j-- > 0;) rhs[j] = (rhs[j] - upper[j] * rhs[j + 1]) / diag[j];
  }

  m_.assign(n, 0.0);
  for (std::size_t j = 0; j < k; ++j) m_[j + 1] = rhs[j];
  m_[0] = ((h[0] + h[1]) * m_[1] - h[0] * m_[2]) / h[1];
  m_[n - 1] = ((hb + ha) * m_[n - 2] - hb * m_[n - 3]) / ha;

  area_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    area_[i + 1] = area_[i] + 0.5 * h[i] * (y_[i] + y_[i + 1]) - h[i] * h[i] * h[i] * (m_[i] + m_[i + 1]) / 24.0;
  }
}

double CubicSpline::eval(double x, int derivative) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  i = std::min(i, x_.size() - 2);
  const double h = x_[i + 1] - x_[i];
  const double t = x - x_[i];
  const double a = y_[i];
  const double b = (y_[i + 1] - y_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
  const double c = m_[i] / 2.0;
  const double d = (m_[i + 1] - m_[i]) / (6.0 * h);
  switch (derivative) {
    case 0: return a + t * (b + t * (c + t * d));
    case 1: return b + t * (2.0 * c + 3.0 * t * d);
    case 2: return 2.0 * c + 6.0 * t * d;
    case 3: return 6.0 * d;
    default: throw Error(ErrorKind::InvalidArgument, "spline derivative order must be 0..3");
  }
}

std::vector<double> CubicSpline::cumulative_integral() const { return area_; }

double CubicSpline::integral(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  i = std::min(i, x_.size() - 2);
  const double sum = area_[i];
  const double h = x_[i + 1] - x_[i];
  const double t = x - x_[i];
  const double b = (y_[i + 1] - y_[i]) / h - h * (2.0 * m_[i] + m_[i + 1]) / 6.0;
  const double c = m_[i] / 2.0;
  const double d = (m_[i + 1] - m_[i]) / (6.0 * h);
  return sum + t * (y_[i] + t * (b / 2.0 + t * (c / 3.0 + t * d / 4.0)));
}

}  // namespace nullkdv::numerics
