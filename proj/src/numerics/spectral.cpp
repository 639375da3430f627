#include "nullkdv/numerics/spectral.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "nullkdv/error.hpp"

namespace nullkdv::numerics {

namespace {
// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct PeriodicSpectrum::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit Plans(std::size_t n) {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    const int ni = static_cast<int>(n);
    r2c = fftw_plan_dft_r2c_1d(ni, real, spec, FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_1d(ni, spec, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
    fftw_free(real);
    fftw_free(spec);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

PeriodicSpectrum::PeriodicSpectrum(std::size_t n, double period) : n_(n), period_(period) {
  if (n < 4 || n % 2 != 0) throw Error(ErrorKind::InvalidArgument, "spectral grid size must be even and >= 4");
  if (!(period > 0.0)) throw Error(ErrorKind::InvalidArgument, "period must be positive");
  plans_ = std::make_unique<Plans>(n);
}

PeriodicSpectrum::~PeriodicSpectrum() = default;
PeriodicSpectrum::PeriodicSpectrum(PeriodicSpectrum&&) noexcept = default;
PeriodicSpectrum& PeriodicSpectrum::operator=(PeriodicSpectrum&&) noexcept = default;

double PeriodicSpectrum::wavenumber(std::size_t j) const noexcept {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / period_;
}

void PeriodicSpectrum::forward(std::span<const double> values, std::span<Complex> coeffs) const {
  std::copy(values.begin(), values.end(), plans_->real);
  fftw_execute(plans_->r2c);
  for (std::size_t j = 0; j < modes(); ++j) coeffs[j] = {plans_->spec[j][0], plans_->spec[j][1]};
}

void PeriodicSpectrum::backward(std::span<const Complex> coeffs, std::span<double> values) const {
  for (std::size_t j = 0; j < modes(); ++j) {
    plans_->spec[j][0] = coeffs[j].real();
    plans_->spec[j][1] = coeffs[j].imag();
  }
  fftw_execute(plans_->c2r);
  const double inv = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) values[i] = plans_->real[i] * inv;
}

Complex PeriodicSpectrum::derivative_symbol(std::size_t j, int order) const noexcept {
  if (order == 0) return 1.0;
  if (j == n_ / 2 && order % 2 == 1) return 0.0;
  const Complex ik(0.0, wavenumber(j));
  Complex r = 1.0;
  for (int m = 0; m < order; ++m) r *= ik;
  return r;
}

std::vector<std::vector<double>> PeriodicSpectrum::derivatives(std::span<const double> values,
                                                               int max_order, bool dealias) const {
  return derivatives(values, max_order, dealias ? dealias_cutoff() : modes() - 1);
}

std::vector<std::vector<double>> PeriodicSpectrum::derivatives(std::span<const double> values,
                                                               int max_order,
                                                               std::size_t cutoff) const {
  const bool truncated = cutoff + 1 < modes();
  std::vector<Complex> base(modes());
  forward(values, base);
  for (std::size_t j = cutoff + 1; j < modes(); ++j) base[j] = 0.0;
  std::vector<std::vector<double>> out(static_cast<std::size_t>(max_order) + 1,
                                       std::vector<double>(n_));
  std::vector<Complex> work(modes());
  for (int m = 0; m <= max_order; ++m) {
    if (m == 0 && !truncated) {
      std::copy(values.begin(), values.end(), out[0].begin());
      continue;
    }
    for (std::size_t j = 0; j < modes(); ++j) work[j] = base[j] * derivative_symbol(j, m);
    backward(work, out[static_cast<std::size_t>(m)]);
  }
  return out;
}

TrigInterpolant::TrigInterpolant(std::span<const double> values, double period)
    : n_(values.size()), period_(period) {
  PeriodicSpectrum spec(n_, period);
  coeffs_.resize(spec.modes());
  spec.forward(values, coeffs_);
  const double inv = 1.0 / static_cast<double>(n_);
  for (auto& c : coeffs_) c *= inv;
}

double TrigInterpolant::operator()(double s) const {
  const double w = 2.0 * std::numbers::pi / period_;
  double sum = coeffs_[0].real();
  const std::size_t half = n_ / 2;
  for (std::size_t j = 1; j < coeffs_.size(); ++j) {
    const Complex e = std::polar(1.0, w * static_cast<double>(j) * s);
    // Nyquist mode counted once, as cos only.
    const double factor = (j == half) ? 1.0 : 2.0;
    sum += factor * (coeffs_[j] * e).real();
  }
  return sum;
}

}  // namespace nullkdv::numerics
