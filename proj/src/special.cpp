#include "nullkdv/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/LU>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>

#include "nullkdv/numerics/ode.hpp"
#include "nullkdv/numerics/spectral.hpp"
#include "nullkdv/numerics/spline.hpp"

namespace nullkdv {

namespace {

double cubic(double x, double g2, double g3) { return 4.0 * x * x * x - g2 * x - g3; }

void require_uniform(std::span<const double> x, const char* what) {
  if (x.size() < 5) throw Error(ErrorKind::InvalidArgument, std::string(what) + " needs at least 5 nodes");
  const double h = x[1] - x[0];
  for (std::size_t k = 1; k < x.size(); ++k) {
    if (std::abs((x[k] - x[k - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)) || !(h > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be uniform and increasing");
    }
  }
}

}  // namespace

WeierstrassParams WeierstrassParams::from_invariants(double g2, double g3) {
  if (!std::isfinite(g2) || !std::isfinite(g3) || !(27.0 * g3 * g3 - g2 * g2 * g2 < 0.0)) {
    throw Error(ErrorKind::DomainError,
                "need 27 g3^2 - g2^3 < 0 for three distinct real roots");
  }
  // Trigonometric solution of x^3 + p x + q = 0, p = -g2/4, q = -g3/4.
  const double p = -g2 / 4.0, q = -g3 / 4.0;
  const double m = 2.0 * std::sqrt(-p / 3.0);
  const double arg = std::clamp(3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p), -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  std::array<double, 3> roots{};
  for (int k = 0; k < 3; ++k) {
    double x = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
    for (int it = 0; it < 3; ++it) {
      const double d = 12.0 * x * x - g2;
      if (d != 0.0) x -= cubic(x, g2, g3) / d;
    }
    roots[static_cast<std::size_t>(k)] = x;
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());

  WeierstrassParams w;
  w.g2 = g2;
  w.g3 = g3;
  w.e1 = roots[0];
  w.e2 = roots[1];
  w.e3 = roots[2];
  const double span = w.e1 - w.e3;
  const double k = std::sqrt((w.e2 - w.e3) / span);
  const double kp = std::sqrt((w.e1 - w.e2) / span);
  w.omega1 = boost::math::ellint_1(k) / std::sqrt(span);
  w.omega3 = boost::math::ellint_1(kp) / std::sqrt(span);
  return w;
}

std::pair<double, double> invariants_from_initial_data(double lambda, double f0, double f0p,
                                                       double f0pp) {
  const double h = -0.5 * (f0 - lambda / 6.0);
  const double hp = -0.5 * f0p;
  const double hpp = -0.5 * f0pp;
  const double g2 = 12.0 * h * h - 2.0 * hpp;
  const double g3 = 4.0 * h * h * h - g2 * h - hp * hp;
  return {g2, g3};
}

std::pair<double, double> weierstrass_p(double x, const WeierstrassParams& w,
                                        WeierstrassBranch branch, double pole_tol) {
  const double span = w.e1 - w.e3;
  const double root = std::sqrt(span);
  const double k = std::sqrt((w.e2 - w.e3) / span);
  // Reduce to one period; sn^2 has period 2K in its argument.
  const double period = 2.0 * w.omega1;
  double u = std::remainder(x, period);
  double cn = 0.0, dn = 0.0;
  if (branch == WeierstrassBranch::RealAxis) {
    if (std::abs(u) < pole_tol * w.omega1) {
      throw Error(ErrorKind::NearPole, "x = " + std::to_string(x) + " is at a pole of p");
    }
    const double sn = boost::math::jacobi_elliptic(k, root * u, &cn, &dn);
    const double value = w.e3 + span / (sn * sn);
    const double deriv = -2.0 * span * root * cn * dn / (sn * sn * sn);
    return {value, deriv};
  }
  const double sn = boost::math::jacobi_elliptic(k, root * u, &cn, &dn);
  const double value = w.e3 + (w.e2 - w.e3) * sn * sn;
  const double deriv = 2.0 * (w.e2 - w.e3) * root * sn * cn * dn;
  return {value, deriv};
}

double weierstrass_ode_residual(double x, const WeierstrassParams& w, WeierstrassBranch branch) {
  const auto [p, dp] = weierstrass_p(x, w, branch);
  const double terms[] = {dp * dp, 4.0 * p * p * p, w.g2 * p, w.g3};
  // Near a zero of p every term vanishes; the invariants set the floor.
  double scale = std::pow(std::abs(w.g2), 1.5) + std::abs(w.g3);
  for (double t : terms) scale = std::max(scale, std::abs(t));
  const double r = dp * dp - 4.0 * p * p * p + w.g2 * p + w.g3;
  return scale > 0.0 ? std::abs(r) / scale : std::abs(r);
}

double traveling_wave_at(double s, double lambda, const WeierstrassParams& w) {
  return -2.0 * weierstrass_p(s, w, WeierstrassBranch::Shifted).first + lambda / 6.0;
}

std::vector<double> traveling_wave(double lambda, const WeierstrassParams& w,
                                   std::span<const double> s_grid) {
  std::vector<double> f(s_grid.size());
  for (std::size_t k = 0; k < s_grid.size(); ++k) f[k] = traveling_wave_at(s_grid[k], lambda, w);
  return f;
}

CurvatureGrid traveling_wave_period(double lambda, const WeierstrassParams& w,
                                    std::size_t samples) {
  CurvatureGrid g;
  g.L = w.period();
  g.values.resize(samples);
  for (std::size_t k = 0; k < samples; ++k) g.values[k] = traveling_wave_at(g.node(k), lambda, w);
  g.validate();
  return g;
}

double traveling_wave_residual(const CurvatureGrid& f, double lambda) {
  f.validate();
  const auto d = spectral_jets(f, 3);
  double worst = 0.0;
  for (std::size_t k = 0; k < f.N(); ++k) {
    worst = std::max(worst, std::abs(d[3][k] + 6.0 * d[0][k] * d[1][k] - lambda * d[1][k]));
  }
  return worst;
}

std::vector<double> traveling_wave_ode(double lambda, double f0, double f0p, double f0pp,
                                       std::span<const double> s_grid, double rtol) {
  using numerics::OdeState;
  const numerics::OdeRhs rhs = [lambda](double, const OdeState& y) {
    OdeState d(3);
    d << y[1], y[2], lambda * y[1] - 6.0 * y[0] * y[1];
    return d;
  };
  OdeState y0(3);
  y0 << f0, f0p, f0pp;
  numerics::OdeOptions opts;
  opts.rtol = rtol;
  opts.atol = rtol * 1e-2;
  opts.blowup_norm = 1e8;
  const auto sol = numerics::integrate(rhs, s_grid, y0, opts);
  if (!sol.complete) throw Error(ErrorKind::Instability, "traveling-wave ODE: " + sol.stop_reason);
  std::vector<double> f(sol.y.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = sol.y[k][0];
  return f;
}

LaxPair build_lax(const MotionSpec& motion, const CurvatureGrid& kappa, double lambda) {
  kappa.validate();
  const NumericPoly p1(motion.p1), p2(motion.p2), p3(motion.p3), p4(motion.p4), p5(motion.p5),
      p6(motion.p6);
  const int order =
      std::max({p1.order(), p2.order(), p3.order(), p4.order(), p5.order(), p6.order(), 0});
  const auto jets = spectral_jets(kappa, order);
  LaxPair pair;
  pair.lambda = lambda;
  pair.h = kappa.h();
  std::vector<double> jet(jets.size());
  for (std::size_t k = 0; k < kappa.N(); ++k) {
    for (std::size_t j = 0; j < jets.size(); ++j) jet[j] = jets[j][k];
    pair.s.push_back(kappa.node(k));
    pair.K.push_back(frenet_matrix(kappa.values[k]));
    pair.P.push_back(variation_matrix(p1(jet), p2(jet), p3(jet), p4(jet), p5(jet), p6(jet)));
    pair.L.push_back(pair.P.back() + lambda * pair.K.back());
  }
  return pair;
}

double lax_residual(const LaxPair& pair) {
  const std::size_t n = pair.L.size();
  if (n < 3) throw Error(ErrorKind::InvalidArgument, "Lax pair needs at least 3 nodes");
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Mat4 d = (pair.L[(k + 1) % n] - pair.L[(k + n - 1) % n]) / (2.0 * pair.h);
    const Mat4 c = pair.L[k] * pair.K[k] - pair.K[k] * pair.L[k];
    worst = std::max(worst, (d - c).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::array<double, 4> charpoly(const Mat4& a) {
  std::array<double, 4> c{};
  Mat4 m = Mat4::Identity();
  for (int k = 1; k <= 4; ++k) {
    if (k > 1) m = a * m + c[static_cast<std::size_t>(k - 2)] * Mat4::Identity();
    c[static_cast<std::size_t>(k - 1)] = -(a * m).trace() / k;
  }
  return c;
}

MuReport mu_invariant(const LaxPair& pair, std::span<const Frame> frames) {
  if (frames.size() != pair.L.size() || frames.empty()) {
    throw Error(ErrorKind::InvalidArgument, "one frame per Lax node required");
  }
  MuReport r;
  const Mat4 f0 = frames[0].matrix();
  const Mat4 mu0 = f0 * pair.L[0] * f0.inverse();
  std::array<double, 4> lo = charpoly(pair.L[0]), hi = lo;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const Mat4 f = frames[k].matrix();
    const Mat4 mu = f * pair.L[k] * f.inverse();
    r.mu_spread = std::max(r.mu_spread, (mu - mu0).cwiseAbs().maxCoeff());
    const auto c = charpoly(pair.L[k]);
    for (std::size_t i = 0; i < 4; ++i) {
      lo[i] = std::min(lo[i], c[i]);
      hi[i] = std::max(hi[i], c[i]);
    }
  }
  for (std::size_t i = 0; i < 4; ++i) r.charpoly_spread[i] = hi[i] - lo[i];
  return r;
}

PainleveSolution painleve2_solve(double c, double v0, double v0p, std::span<const double> x_grid,
                                 double x0, double rtol) {
  if (x_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty x grid");
  for (std::size_t k = 1; k < x_grid.size(); ++k) {
    if (!(x_grid[k] > x_grid[k - 1])) throw Error(ErrorKind::InvalidArgument, "x grid must increase");
  }
  using numerics::OdeState;
  const numerics::OdeRhs rhs = [c](double x, const OdeState& y) {
    OdeState d(2);
    d << y[1], 2.0 * y[0] * y[0] * y[0] - x * y[0] - c;
    return d;
  };
  OdeState y0(2);
  y0 << v0, v0p;
  numerics::OdeOptions opts;
  opts.rtol = rtol;
  opts.atol = rtol * 1e-2;
  opts.blowup_norm = 1e6;

  // Outward from x0 on each side; x0 itself is reported only if on the grid.
  const auto lo = std::lower_bound(x_grid.begin(), x_grid.end(), x0);
  const auto hi = std::upper_bound(x_grid.begin(), x_grid.end(), x0);
  std::vector<double> right{x0}, left{x0};
  right.insert(right.end(), hi, x_grid.end());
  for (auto it = lo; it != x_grid.begin();) left.push_back(*--it);

  const auto sol_r = numerics::integrate(rhs, right, y0, opts);
  const auto sol_l = numerics::integrate(rhs, left, y0, opts);

  PainleveSolution out;
  for (std::size_t i = sol_l.x.size(); i-- > 1;) {
    out.x.push_back(sol_l.x[i]);
    out.v.push_back(sol_l.y[i][0]);
    out.vp.push_back(sol_l.y[i][1]);
  }
  if (lo != hi) {
    out.x.push_back(x0);
    out.v.push_back(v0);
    out.vp.push_back(v0p);
  }
  if (sol_l.complete) {
    for (std::size_t i = 1; i < sol_r.x.size(); ++i) {
      out.x.push_back(sol_r.x[i]);
      out.v.push_back(sol_r.y[i][0]);
      out.vp.push_back(sol_r.y[i][1]);
    }
  }
  out.complete = sol_l.complete && sol_r.complete;
  if (!out.complete) {
    out.stop_reason = !sol_r.complete ? sol_r.stop_reason : sol_l.stop_reason;
    throw PoleEncountered("movable pole: " + out.stop_reason, out);
  }
  return out;
}

double painleve2_residual(const PainleveSolution& sol, double c) {
  require_uniform(sol.x, "Painleve grid");
  const double h = sol.x[1] - sol.x[0];
  const auto& f = sol.vp;
  double worst = 0.0;
  for (std::size_t k = 2; k + 2 < f.size(); ++k) {
    const double vpp = (-f[k + 2] + 8.0 * f[k + 1] - 8.0 * f[k - 1] + f[k - 2]) / (12.0 * h);
    const double v = sol.v[k];
    worst = std::max(worst, std::abs(vpp - 2.0 * v * v * v + sol.x[k] * v + c));
  }
  return worst;
}

MiuraImage miura_map(const PainleveSolution& sol, double c, double a) {
  if (a == 0.0) throw Error(ErrorKind::DomainError, "similarity parameter a must be nonzero");
  const double q = -std::cbrt(a / 3.0);
  MiuraImage m;
  const std::size_t n = sol.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = q < 0.0 ? n - 1 - i : i;
    const double x = sol.x[k], v = sol.v[k], vp = sol.vp[k];
    m.xi.push_back(x / q);
    m.kappa.push_back(q * q * (vp - v * v));
    m.kappa_p.push_back(q * q * q * (2.0 * v * v * v - x * v - c - 2.0 * v * vp));
  }
  return m;
}

double miura_check(const PainleveSolution& sol, double c, double a) {
  require_uniform(sol.x, "Painleve grid");
  const MiuraImage m = miura_map(sol, c, a);
  const double h = m.xi[1] - m.xi[0];
  double worst = 0.0;
  for (std::size_t k = 2; k + 2 < m.xi.size(); ++k) {
    const double k3 = (-m.kappa_p[k + 2] + 16.0 * m.kappa_p[k + 1] - 30.0 * m.kappa_p[k] +
                       16.0 * m.kappa_p[k - 1] - m.kappa_p[k - 2]) /
                      (12.0 * h * h);
    const double r = k3 + 6.0 * m.kappa[k] * m.kappa_p[k] -
                     (a / 3.0) * (m.xi[k] * m.kappa_p[k] + 2.0 * m.kappa[k]);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

std::vector<double> similarity_profile(std::span<const double> s, std::span<const double> kappa,
                                       double a, double b, double t) {
  const double base = a * t + b;
  if (!(base > 0.0)) throw Error(ErrorKind::DomainError, "a t + b must be positive");
  const double r = std::cbrt(base * base);
  const numerics::CubicSpline profile(s, kappa);
  const double root = std::sqrt(r);
  std::vector<double> out(s.size(), std::numeric_limits<double>::quiet_NaN());
  const double tol = 1e-12 * std::max(1.0, std::abs(s.back() - s.front()));
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double x = s[k] / root;
    if (x >= s.front() - tol && x <= s.back() + tol) out[k] = profile(x) / r;
  }
  return out;
}

}  // namespace nullkdv
