#include "nullkdv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "nullkdv/error.hpp"
#include "nullkdv/numerics/finite_difference.hpp"
#include "nullkdv/numerics/spline.hpp"

namespace nullkdv {

const Mat3& minkowski_metric() {
  static const Mat3 g = [] {
    Mat3 m;
    m << 0, 0, -1, 0, 1, 0, -1, 0, 0;
    return m;
  }();
  return g;
}

double minkowski_inner(const MVec3& x, const MVec3& y) {
  return -(x[0] * y[2] + x[2] * y[0]) + x[1] * y[1];
}

bool is_future_directed(const MVec3& x) { return x[0] + x[2] > 0.0; }

Frame Frame::from_matrix(const Mat4& m) {
  Frame f;
  f.point = m.block<3, 1>(1, 0);
  f.a1 = m.block<3, 1>(1, 1);
  f.a2 = m.block<3, 1>(1, 2);
  f.a3 = m.block<3, 1>(1, 3);
  return f;
}

Mat4 Frame::matrix() const {
  Mat4 m = Mat4::Zero();
  m(0, 0) = 1.0;
  m.block<3, 1>(1, 0) = point;
  m.block<3, 3>(1, 1) = triad();
  return m;
}

Mat3 Frame::triad() const {
  Mat3 a;
  a.col(0) = a1;
  a.col(1) = a2;
  a.col(2) = a3;
  return a;
}

double frame_metric_residual(const Frame& f) {
  const Mat3 a = f.triad();
  return (a.transpose() * minkowski_metric() * a - minkowski_metric()).cwiseAbs().maxCoeff();
}

bool is_admissible_frame(const Frame& f, double tol) {
  return frame_metric_residual(f) <= tol && is_future_directed(f.a1) && is_future_directed(f.a3) &&
         f.triad().determinant() > 0.0;
}

Mat4 frenet_matrix(double kappa) {
  Mat4 k = Mat4::Zero();
  k(1, 0) = 1.0;
  k(2, 1) = 1.0;
  k(3, 2) = 1.0;
  k(1, 2) = -2.0 * kappa;
  k(2, 3) = -2.0 * kappa;
  return k;
}

Mat4 variation_matrix(double p1, double p2, double p3, double p4, double p5, double p6) {
  Mat4 m = Mat4::Zero();
  m(1, 0) = p1;
  m(2, 0) = p2;
  m(3, 0) = p3;
  m(1, 1) = p5;
  m(1, 2) = p6;
  m(2, 1) = p4;
  m(2, 3) = p6;
  m(3, 2) = p4;
  m(3, 3) = -p5;
  return m;
}

Mat4 expm(const Mat4& a) { return a.exp(); }

// Taylor series for small a avoids the cancellation in exp(a) - I.
Mat4 expm_minus_identity(const Mat4& a) {
  if (a.cwiseAbs().maxCoeff() > 0.5) return a.exp() - Mat4::Identity();
  Mat4 term = a;
  Mat4 sum = a;
  for (int j = 2; j < 30; ++j) {
    term = term * a / static_cast<double>(j);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * sum.cwiseAbs().maxCoeff()) break;
  }
  return sum;
}

namespace {

Mat4 commutator(const Mat4& a, const Mat4& b) { return a * b - b * a; }


// Inverse derivative of the exponential for right-trivialized equations
// F' = F A with F = F0 exp(u), truncated after the double commutator.
Mat4 dexpinv(const Mat4& u, const Mat4& a) {
  const Mat4 c = commutator(u, a);
  return a + 0.5 * c + commutator(u, c) / 12.0;
}

Mat4 rkmk4_increment(const std::function<double(double)>& kappa, double s, double h) {
  const Mat4 k1 = h * frenet_matrix(kappa(s));
  const Mat4 kmid = frenet_matrix(kappa(s + 0.5 * h));
  const Mat4 k2 = h * dexpinv(0.5 * k1, kmid);
  const Mat4 k3 = h * dexpinv(0.5 * k2, kmid);
  const Mat4 k4 = h * dexpinv(k3, frenet_matrix(kappa(s + h)));
  return (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

// Pull the triad back onto the metric condition a^T g a = g. Each pass
// removes the residual to first order; g is its own inverse.
void reproject(Mat4& f) {
  const Mat3& g = minkowski_metric();
  for (int it = 0; it < 3; ++it) {
    Mat3 a = f.block<3, 3>(1, 1);
    const Mat3 e = a.transpose() * g * a - g;
    if (e.cwiseAbs().maxCoeff() < 1e-15) break;
    f.block<3, 3>(1, 1) = a * (Mat3::Identity() - 0.5 * g * e);
  }
}

Mat4 rk4_step(const std::function<double(double)>& kappa, const Mat4& f, double s, double h) {
  const Mat4 ka = frenet_matrix(kappa(s));
  const Mat4 kb = frenet_matrix(kappa(s + 0.5 * h));
  const Mat4 kc = frenet_matrix(kappa(s + h));
  const Mat4 y1 = f * ka;
  const Mat4 y2 = (f + 0.5 * h * y1) * kb;
  const Mat4 y3 = (f + 0.5 * h * y2) * kb;
  const Mat4 y4 = (f + h * y3) * kc;
  Mat4 out = f + h * (y1 + 2.0 * y2 + 2.0 * y3 + y4) / 6.0;
  reproject(out);
  return out;
}

}  // namespace

CurveSample integrate_frenet(const std::function<double(double)>& kappa, double s0, double h,
                             std::size_t count, const Frame& f0, const FrenetOptions& opts) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "step h must be positive");
  if (count == 0) throw Error(ErrorKind::InvalidArgument, "need at least one node");
  if (opts.anchor >= count) throw Error(ErrorKind::InvalidArgument, "anchor index outside the grid");
  if (!is_admissible_frame(f0, opts.frame_tol)) {
    throw Error(ErrorKind::InvalidArgument,
                "initial frame is not an oriented, time-oriented null frame");
  }

  std::vector<Mat4> mats(count);
  mats[opts.anchor] = f0.matrix();
  auto node = [&](std::size_t k) { return s0 + static_cast<double>(k) * h; };
  auto advance = [&](std::size_t from, std::size_t to, double s, double step) {
    const Mat4& f = mats[from];
    if (opts.stepper == FrenetStepper::ProjectedRK4) {
      mats[to] = rk4_step(kappa, f, s, step);
    } else {
      mats[to] = f + f * expm_minus_identity(rkmk4_increment(kappa, s, step));
    }
  };
  auto check = [&](const Mat4& f, std::size_t k) {
    const double r = frame_metric_residual(Frame::from_matrix(f));
    if (!(r <= opts.frame_tol)) {
      throw Error(ErrorKind::FrameDrift, "metric residual " + std::to_string(r) + " at s = " +
                                             std::to_string(node(k)) + "; reduce the step");
    }
  };
  for (std::size_t k = opts.anchor; k + 1 < count; ++k) {
    advance(k, k + 1, node(k), h);
    check(mats[k + 1], k + 1);
  }
  for (std::size_t k = opts.anchor; k > 0; --k) {
    advance(k, k - 1, node(k), -h);
    check(mats[k - 1], k - 1);
  }

  CurveSample out;
  out.s.resize(count);
  out.points.resize(count);
  out.frames.resize(count);
  out.kappa.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.s[k] = node(k);
    out.frames[k] = Frame::from_matrix(mats[k]);
    out.points[k] = out.frames[k].point;
    out.kappa[k] = kappa(out.s[k]);
  }
  return out;
}

CurveSample integrate_frenet(std::span<const double> kappa, double h, const Frame& f0,
                             const FrenetOptions& opts, double s0) {
  const std::size_t n = kappa.size();
  if (n < 4) throw Error(ErrorKind::InvalidArgument, "need at least 4 curvature samples");
  std::vector<double> values(kappa.begin(), kappa.end());
  // Four-point Lagrange interpolation on the stencil around s.
  auto interp = [values, n, h, s0](double s) {
    const double u = (s - s0) / h;
    const double nearest = std::round(u);
    if (std::abs(u - nearest) < 1e-12 && nearest >= 0.0 && nearest < static_cast<double>(n)) {
      return values[static_cast<std::size_t>(nearest)];
    }
    long i = static_cast<long>(std::floor(u)) - 1;
    i = std::clamp(i, 0L, static_cast<long>(n) - 4);
    const double x = u - static_cast<double>(i);
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) {
      double w = 1.0;
      for (int m = 0; m < 4; ++m) {
        if (m != j) w *= (x - m) / static_cast<double>(j - m);
      }
      sum += w * values[static_cast<std::size_t>(i + j)];
    }
    return sum;
  };
  CurveSample out = integrate_frenet(interp, s0, h, n, f0, opts);
  out.kappa = values;
  return out;
}

std::vector<double> curvature_from_curve(const CurveSample& curve, const CurvatureOptions& opts) {
  const std::size_t n = curve.size();
  if (n < 5 || curve.points.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "curve needs at least 5 matching nodes");
  }
  const double h = curve.step();
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "curve grid must increase");
  const auto& x = curve.points;
  std::vector<double> kappa(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 2; k + 2 < n; ++k) {
    const MVec3 d1 = (x[k + 1] - x[k - 1]) / (2.0 * h);
    const MVec3 d2 = (x[k + 1] - 2.0 * x[k] + x[k - 1]) / (h * h);
    const MVec3 d3 = (x[k + 2] - 2.0 * x[k + 1] + 2.0 * x[k - 1] - x[k - 2]) / (2.0 * h * h * h);
    if (d1.cross(d2).norm() <= opts.flex_tol * d1.norm() * d2.norm()) {
      throw Error(ErrorKind::FlexPoint, "gamma' and gamma'' parallel at s = " + std::to_string(curve.s[k]));
    }
    const double n2 = minkowski_inner(d2, d2);
    if (std::abs(n2 - 1.0) > opts.pseudo_arc_tol) {
      throw Error(ErrorKind::NotPseudoArc, "<gamma'',gamma''> = " + std::to_string(n2) +
                                               " at s = " + std::to_string(curve.s[k]));
    }
    kappa[k] = 0.25 * minkowski_inner(d3, d3);
  }
  return kappa;
}

CurveSample pseudo_arc_reparametrize(std::span<const double> t, std::span<const MVec3> points,
                                     const ReparamOptions& opts) {
  const std::size_t n = t.size();
  if (n < 4 || points.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "reparametrization needs at least 4 matching nodes");
  }
  std::vector<numerics::CubicSpline> comp;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = points[k][c];
    comp.emplace_back(t, y);
  }
  auto deriv = [&](double tt, int order) {
    return MVec3(comp[0].eval(tt, order), comp[1].eval(tt, order), comp[2].eval(tt, order));
  };

  std::vector<double> speed(n);
  for (std::size_t k = 0; k < n; ++k) {
    const MVec3 d1 = deriv(t[k], 1);
    const MVec3 d2 = deriv(t[k], 2);
    if (std::abs(minkowski_inner(d1, d1)) > opts.null_tol * d1.squaredNorm()) {
      throw Error(ErrorKind::NotNull, "gamma' is not null at t = " + std::to_string(t[k]));
    }
    if (!is_future_directed(d1)) {
      throw Error(ErrorKind::NotNull, "gamma' is not future-directed at t = " + std::to_string(t[k]));
    }
    const double n2 = minkowski_inner(d2, d2);
    if (d1.cross(d2).norm() <= opts.flex_tol * d1.norm() * d2.norm() || !(n2 > 0.0)) {
      throw Error(ErrorKind::FlexPoint, "flex point at t = " + std::to_string(t[k]));
    }
    speed[k] = std::pow(n2, 0.25);
  }
  // Arc length s(t) as the exact integral of the interpolated density: the
  // trapezoid rule plus its cubic end correction.
  const numerics::CubicSpline density(t, speed);
  const std::vector<double> s = density.cumulative_integral();

  // t(s_k) by Newton on the integral itself, so s(t(s_k)) = s_k to
  // roundoff rather than to interpolation error.
  auto invert = [&](double target) {
    const auto it = std::upper_bound(s.begin(), s.end(), target);
    std::size_t j = it == s.begin() ? 0 : static_cast<std::size_t>(it - s.begin()) - 1;
    j = std::min(j, n - 2);
    const double a = t[j], b = t[j + 1];
    double x = a + (b - a) * (target - s[j]) / (s[j + 1] - s[j]);
    for (int iter = 0; iter < 20; ++iter) {
      const double dx = (density.integral(x) - target) / density(x);
      x = std::clamp(x - dx, a, b);
      if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
  };

  CurveSample out;
  out.s.resize(n);
  out.points.resize(n);
  const double hs = s.back() / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    out.s[k] = hs * static_cast<double>(k);
    const double tk = k + 1 == n ? t[n - 1] : (k == 0 ? t[0] : invert(out.s[k]));
    out.points[k] = deriv(tk, 0);
  }
  return out;
}

TangentField tangent_field(std::span<const double> kappa, std::span<const double> p3, double h,
                           double constant) {
  const std::size_t n = kappa.size();
  if (p3.size() != n) throw Error(ErrorKind::InvalidArgument, "kappa and p3 grids differ in size");
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "step h must be positive");
  using numerics::fd_derivative;
  TangentField f;
  f.p3.assign(p3.begin(), p3.end());
  const auto d_p3 = fd_derivative(p3, h);
  const auto dd_p3 = fd_derivative(d_p3, h);
  const auto d_kappa = fd_derivative(kappa, h);
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = d_kappa[k] * p3[k];
  const auto integral = numerics::cumulative_trapezoid(w, h);

  f.p1.resize(n);
  f.p2.resize(n);
  f.p4.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    f.p2[k] = -d_p3[k];
    f.p1[k] = 0.5 * dd_p3[k] + integral[k] + constant;
    f.p4[k] = -dd_p3[k] - 2.0 * kappa[k] * p3[k] + f.p1[k];
  }
  const auto d_p1 = fd_derivative(f.p1, h);
  f.p5.resize(n);
  for (std::size_t k = 0; k < n; ++k) f.p5[k] = d_p1[k] + 2.0 * kappa[k] * d_p3[k];
  const auto d_p5 = fd_derivative(f.p5, h);
  f.p6.resize(n);
  for (std::size_t k = 0; k < n; ++k) f.p6[k] = d_p5[k] - 2.0 * kappa[k] * f.p4[k];
  const auto d_p6 = fd_derivative(f.p6, h);
  f.c.resize(n);
  for (std::size_t k = 0; k < n; ++k) f.c[k] = -0.5 * d_p6[k] - kappa[k] * f.p5[k];
  return f;
}

}  // namespace nullkdv
