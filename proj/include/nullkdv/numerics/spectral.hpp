#pragma once

// Fourier pseudospectral differentiation on a uniform periodic grid.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nullkdv::numerics {

using Complex = std::complex<double>;

/// Real-to-complex FFT pair of fixed size N on a period L. Instances own
/// scratch buffers and are not safe for concurrent use; give each thread
/// its own.
class PeriodicSpectrum {
 public:
  PeriodicSpectrum(std::size_t n, double period);
  ~PeriodicSpectrum();
  PeriodicSpectrum(const PeriodicSpectrum&) = delete;
  PeriodicSpectrum& operator=(const PeriodicSpectrum&) = delete;
  PeriodicSpectrum(PeriodicSpectrum&&) noexcept;
  PeriodicSpectrum& operator=(PeriodicSpectrum&&) noexcept;

  std::size_t size() const noexcept { return n_; }
  std::size_t modes() const noexcept { return n_ / 2 + 1; }
  double period() const noexcept { return period_; }
  /// Angular wavenumber of mode j.
  double wavenumber(std::size_t j) const noexcept;
  /// Highest mode kept by the 2/3 rule.
  std::size_t dealias_cutoff() const noexcept { return n_ / 3; }

  /// Unnormalized forward transform (modes() coefficients).
  void forward(std::span<const double> values, std::span<Complex> coeffs) const;
  /// Inverse transform including the 1/N normalization.
  void backward(std::span<const Complex> coeffs, std::span<double> values) const;

  /// Row m holds the m-th derivative, m = 0..max_order. With dealias set,
  /// modes above the 2/3 cutoff are dropped before differentiating.
  std::vector<std::vector<double>> derivatives(std::span<const double> values, int max_order,
                                               bool dealias = false) const;
  /// As above, keeping only modes 0..cutoff.
  std::vector<std::vector<double>> derivatives(std::span<const double> values, int max_order,
                                               std::size_t cutoff) const;

  /// Multiplier (i k_j)^order with the odd-order Nyquist mode zeroed.
  Complex derivative_symbol(std::size_t j, int order) const noexcept;

 private:
  struct Plans;
  std::size_t n_;
  double period_;
  std::unique_ptr<Plans> plans_;
};

/// Evaluates the trigonometric interpolant of periodic samples at arbitrary
/// points. Used where a smooth band-limited curvature is needed between
/// grid nodes.
class TrigInterpolant {
 public:
  TrigInterpolant(std::span<const double> values, double period);
  double operator()(double s) const;

 private:
  std::size_t n_;
  double period_;
  std::vector<Complex> coeffs_;
};

}  // namespace nullkdv::numerics
