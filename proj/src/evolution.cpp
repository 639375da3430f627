#include "nullkdv/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nullkdv/error.hpp"
#include "nullkdv/numerics/spectral.hpp"

namespace nullkdv {

using numerics::Complex;
using numerics::PeriodicSpectrum;

void CurvatureGrid::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorKind::InvalidArgument, "period L must be positive");
  if (values.size() < 16 || values.size() % 2 != 0) {
    throw Error(ErrorKind::InvalidArgument, "grid size N must be even and >= 16");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "curvature values must be finite");
  }
}

std::vector<std::vector<double>> spectral_jets(const CurvatureGrid& grid, int max_order,
                                               bool dealias) {
  PeriodicSpectrum spec(grid.N(), grid.L);
  return spec.derivatives(grid.values, std::max(max_order, 0), dealias);
}

namespace {

std::vector<double> jet_at(const std::vector<std::vector<double>>& rows, std::size_t k) {
  std::vector<double> jet(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) jet[j] = rows[j][k];
  return jet;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// rhs = sum_j a_j u_j + nonlinear part.
struct SplitRhs {
  std::vector<double> linear;  // a_j by jet order
  DiffPoly nonlinear;
  int order = 0;
};

SplitRhs split(const DiffPoly& rhs) {
  SplitRhs out;
  out.order = std::max(rhs.order(), 0);
  out.linear.assign(static_cast<std::size_t>(out.order) + 1, 0.0);
  for (const auto& [m, c] : rhs.terms()) {
    if (m.degree() == 1) {
      out.linear[static_cast<std::size_t>(m.order())] = c.get_d();
    } else {
      out.nonlinear.add_term(m, c);
    }
  }
  return out;
}

double nonlinear_rate(const SplitRhs& parts, const std::vector<std::vector<double>>& jets,
                      double kmax) {
  std::vector<double> bound(jets.size());
  for (std::size_t j = 0; j < jets.size(); ++j) bound[j] = max_abs(jets[j]);
  double rate = 0.0;
  for (const auto& [m, c] : parts.nonlinear.terms()) {
    const auto& e = m.exponents();
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] == 0) continue;
      // |d(monomial)/du_j| bounded by the other factors, times k^j.
      double partial = std::abs(c.get_d()) * e[j];
      for (std::size_t i = 0; i < e.size(); ++i) {
        const int power = i == j ? e[i] - 1 : e[i];
        partial *= std::pow(bound[i], power);
      }
      rate += partial * std::pow(kmax, static_cast<double>(j));
    }
  }
  return rate;
}

class FlowOperator {
 public:
  FlowOperator(const MotionSpec& motion, std::size_t n, double period, bool dealias)
      : spec_(n, period), parts_(split(motion.rhs)), nonlinear_(parts_.nonlinear), dealias_(dealias) {
    symbol_.assign(spec_.modes(), 0.0);
    for (std::size_t k = 0; k < spec_.modes(); ++k) {
      for (std::size_t j = 0; j < parts_.linear.size(); ++j) {
        if (parts_.linear[j] != 0.0) symbol_[k] += parts_.linear[j] * spec_.derivative_symbol(k, static_cast<int>(j));
      }
    }
  }

  const PeriodicSpectrum& spectrum() const { return spec_; }
  const std::vector<Complex>& symbol() const { return symbol_; }

  std::vector<Complex> nonlinear(const std::vector<Complex>& u_hat) const {
    const std::size_t modes = spec_.modes();
    std::vector<Complex> out(modes, 0.0);
    if (parts_.nonlinear.is_zero()) return out;
    const std::size_t cutoff = dealias_ ? spec_.dealias_cutoff() : modes - 1;
    const std::size_t n = spec_.size();
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(parts_.order) + 1, std::vector<double>(n));
    std::vector<Complex> work(modes);
    for (int m = 0; m <= parts_.order; ++m) {
      for (std::size_t k = 0; k < modes; ++k) {
        work[k] = k <= cutoff ? u_hat[k] * spec_.derivative_symbol(k, m) : Complex(0.0);
      }
      spec_.backward(work, rows[static_cast<std::size_t>(m)]);
    }
    std::vector<double> values(n);
    std::vector<double> jet(rows.size());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < rows.size(); ++j) jet[j] = rows[j][i];
      values[i] = nonlinear_(jet);
    }
    spec_.forward(values, out);
    for (std::size_t k = cutoff + 1; k < modes; ++k) out[k] = 0.0;
    return out;
  }

 private:
  PeriodicSpectrum spec_;
  SplitRhs parts_;
  NumericPoly nonlinear_;
  bool dealias_;
  std::vector<Complex> symbol_;
};

std::vector<Complex> axpy(const std::vector<Complex>& x, Complex a, const std::vector<Complex>& y) {
  std::vector<Complex> r(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) r[k] = x[k] + a * y[k];
  return r;
}

void if_rk4_step(const FlowOperator& op, std::vector<Complex>& u, double dt) {
  const auto& sym = op.symbol();
  const std::size_t m = u.size();
  std::vector<Complex> e(m), e2(m);
  for (std::size_t k = 0; k < m; ++k) {
    e[k] = std::exp(sym[k] * (0.5 * dt));
    e2[k] = e[k] * e[k];
  }
  auto scaled = [dt](std::vector<Complex> v) {
    for (auto& x : v) x *= dt;
    return v;
  };
  const auto a = scaled(op.nonlinear(u));
  std::vector<Complex> tmp(m);
  for (std::size_t k = 0; k < m; ++k) tmp[k] = e[k] * (u[k] + 0.5 * a[k]);
  const auto b = scaled(op.nonlinear(tmp));
  for (std::size_t k = 0; k < m; ++k) tmp[k] = e[k] * u[k] + 0.5 * b[k];
  const auto c = scaled(op.nonlinear(tmp));
  for (std::size_t k = 0; k < m; ++k) tmp[k] = e2[k] * u[k] + e[k] * c[k];
  const auto d = scaled(op.nonlinear(tmp));
  for (std::size_t k = 0; k < m; ++k) {
    u[k] = e2[k] * u[k] + (e2[k] * a[k] + 2.0 * e[k] * (b[k] + c[k]) + d[k]) / 6.0;
  }
}

void rk4_step(const FlowOperator& op, std::vector<Complex>& u, double dt) {
  const auto& sym = op.symbol();
  auto f = [&](const std::vector<Complex>& v) {
    auto r = op.nonlinear(v);
    for (std::size_t k = 0; k < v.size(); ++k) r[k] += sym[k] * v[k];
    return r;
  };
  const auto k1 = f(u);
  const auto k2 = f(axpy(u, 0.5 * dt, k1));
  const auto k3 = f(axpy(u, 0.5 * dt, k2));
  const auto k4 = f(axpy(u, dt, k3));
  for (std::size_t k = 0; k < u.size(); ++k) u[k] += dt * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]) / 6.0;
}

struct StepPlan {
  std::size_t steps;
  double dt;
  std::size_t stride;
};

StepPlan plan_steps(double dt, double T, double snap_every) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw Error(ErrorKind::InvalidArgument, "T must be >= 0");
  if (snap_every < 0.0) throw Error(ErrorKind::InvalidArgument, "snapshot cadence must be >= 0");
  StepPlan p;
  p.steps = T == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  p.dt = p.steps == 0 ? dt : T / static_cast<double>(p.steps);
  p.stride = snap_every > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(snap_every / p.dt)))
                              : std::max<std::size_t>(1, p.steps);
  return p;
}

void check_growth(const std::vector<double>& values, double limit, double t) {
  for (double v : values) {
    if (!std::isfinite(v) || std::abs(v) > limit) {
      throw Error(ErrorKind::Instability, "max|kappa| exceeded " + std::to_string(limit) +
                                              " at t = " + std::to_string(t) + "; reduce dt");
    }
  }
}

}  // namespace

double stable_time_step(const MotionSpec& motion, const CurvatureGrid& grid, TimeStepper stepper) {
  grid.validate();
  const SplitRhs parts = split(motion.rhs);
  PeriodicSpectrum spec(grid.N(), grid.L);
  const auto jets = spec.derivatives(grid.values, parts.order);
  double rate = nonlinear_rate(parts, jets, spec.wavenumber(spec.dealias_cutoff()));
  if (stepper == TimeStepper::RK4) {
    const double kmax = spec.wavenumber(grid.N() / 2);
    for (std::size_t j = 0; j < parts.linear.size(); ++j) {
      rate += std::abs(parts.linear[j]) * std::pow(kmax, static_cast<double>(j));
    }
  }
  // RK4 is stable on the imaginary axis up to 2.8; keep a margin.
  return rate > 0.0 ? 2.0 / rate : std::numeric_limits<double>::infinity();
}

std::vector<double> conserved_functionals(const CurvatureGrid& grid, const HierarchyTable& table,
                                          int m) {
  grid.validate();
  if (m < 0 || m > table.depth()) throw Error(ErrorKind::InvalidArgument, "conserved index beyond table depth");
  int order = 0;
  for (int k = 0; k <= m; ++k) order = std::max(order, table.p[static_cast<std::size_t>(k)].order());
  const auto jets = spectral_jets(grid, order);
  std::vector<double> out;
  for (int k = 0; k <= m; ++k) {
    const NumericPoly density(table.p[static_cast<std::size_t>(k)]);
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.N(); ++i) sum += density(jet_at(jets, i));
    out.push_back(sum * grid.h());
  }
  return out;
}

std::vector<FlowState> evolve_curvature(const MotionSpec& motion, const CurvatureGrid& grid0,
                                        double dt, double T, const EvolutionOptions& opts) {
  grid0.validate();
  const StepPlan plan = plan_steps(dt, T, opts.snap_every);
  const HierarchyTable table = generate(2);
  FlowOperator op(motion, grid0.N(), grid0.L, opts.dealias);
  const auto& spec = op.spectrum();

  std::vector<Complex> u(spec.modes());
  spec.forward(grid0.values, u);
  const double initial = max_abs(grid0.values);
  const double limit = opts.instability_factor * (initial > 0.0 ? initial : 1.0);

  std::vector<FlowState> out;
  auto snapshot = [&](double t, std::vector<double> values) {
    FlowState st;
    st.t = t;
    st.grid = {grid0.L, std::move(values)};
    st.conserved = conserved_functionals(st.grid, table, 2);
    out.push_back(std::move(st));
  };
  snapshot(0.0, grid0.values);
  std::vector<double> values(grid0.N());
  for (std::size_t step = 1; step <= plan.steps; ++step) {
    if (opts.stepper == TimeStepper::IntegratingFactorRK4) {
      if_rk4_step(op, u, plan.dt);
    } else {
      rk4_step(op, u, plan.dt);
    }
    spec.backward(u, values);
    const double t = plan.dt * static_cast<double>(step);
    check_growth(values, limit, t);
    if (step % plan.stride == 0 || step == plan.steps) snapshot(t, values);
  }
  return out;
}

CurvatureGrid resample(const CurvatureGrid& grid, std::size_t m) {
  grid.validate();
  const numerics::TrigInterpolant interp(grid.values, grid.L);
  CurvatureGrid out{grid.L, std::vector<double>(m)};
  for (std::size_t k = 0; k < m; ++k) out.values[k] = interp(out.node(k));
  out.validate();
  return out;
}

CurveSample make_periodic_curve(const CurvatureGrid& grid, std::size_t pad, const Frame& f0,
                                const FrenetOptions& opts) {
  grid.validate();
  if (pad < 2) throw Error(ErrorKind::InvalidArgument, "curve padding must be >= 2 nodes");
  const numerics::TrigInterpolant kappa(grid.values, grid.L);
  const std::size_t n = grid.N();
  FrenetOptions o = opts;
  o.anchor = pad + n / 2;
  const double h = grid.h();
  CurveSample curve = integrate_frenet([&kappa](double s) { return kappa(s); },
                                       -static_cast<double>(pad) * h, h, n + 2 * pad, f0, o);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    curve.kappa[i] = grid.values[(i + n - pad % n) % n];
  }
  return curve;
}

namespace {

std::vector<std::vector<double>> flow_jets(const CurvatureGrid& grid, int order, bool filter,
                                           std::size_t band_limit) {
  PeriodicSpectrum spec(grid.N(), grid.L);
  std::size_t cutoff = filter ? spec.dealias_cutoff() : spec.modes() - 1;
  if (band_limit > 0) cutoff = std::min(cutoff, band_limit);
  return spec.derivatives(grid.values, std::max(order, 0), cutoff);
}

struct PeriodicLayout {
  std::size_t n;
  std::size_t pad;
};

PeriodicLayout layout_of(const CurveSample& curve, double L) {
  const double h = curve.step();
  if (!(h > 0.0) || !(L > 0.0)) throw Error(ErrorKind::InvalidArgument, "curve step and period must be positive");
  const auto n = static_cast<std::size_t>(std::llround(L / h));
  if (std::abs(static_cast<double>(n) * h - L) > 1e-9 * L || curve.size() < n + 4 ||
      (curve.size() - n) % 2 != 0) {
    throw Error(ErrorKind::InvalidArgument,
                "curve must cover one period plus an equal padding of >= 2 nodes per side");
  }
  if (curve.frames.size() != curve.size() || curve.kappa.size() != curve.size()) {
    throw Error(ErrorKind::InvalidArgument, "curve must carry frames and curvature");
  }
  return {n, (curve.size() - n) / 2};
}

std::vector<double> periodic_part(const std::vector<double>& all, const PeriodicLayout& lay) {
  return {all.begin() + static_cast<std::ptrdiff_t>(lay.pad),
          all.begin() + static_cast<std::ptrdiff_t>(lay.pad + lay.n)};
}

struct MotionEvaluator {
  NumericPoly p1, p2, p3, p4, p5, p6;
  int order;
  explicit MotionEvaluator(const MotionSpec& m)
      : p1(m.p1), p2(m.p2), p3(m.p3), p4(m.p4), p5(m.p5), p6(m.p6) {
    order = std::max({p1.order(), p2.order(), p3.order(), p4.order(), p5.order(), p6.order(), 0});
  }
  Mat4 matrix(std::span<const double> jet) const {
    return variation_matrix(p1(jet), p2(jet), p3(jet), p4(jet), p5(jet), p6(jet));
  }
};

// One step F <- F exp(dt P[kappa]) followed by the curvature refresh.
void curve_step(CurveSample& curve, const PeriodicLayout& lay, double L, const MotionEvaluator& ev,
                double dt, const CurveFlowOptions& opts) {
  const CurvatureGrid grid{L, periodic_part(curve.kappa, lay)};
  const auto jets = flow_jets(grid, ev.order, opts.filter, opts.band_limit);
  std::vector<Mat4> step(lay.n);
  for (std::size_t j = 0; j < lay.n; ++j) step[j] = expm_minus_identity(dt * ev.matrix(jet_at(jets, j)));
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const std::size_t j = (i + lay.n - lay.pad % lay.n) % lay.n;
    const Mat4 m = curve.frames[i].matrix();
    const Frame f = Frame::from_matrix(m + m * step[j]);
    const double r = frame_metric_residual(f);
    if (!(r <= opts.frame_tol)) {
      throw Error(ErrorKind::FrameDrift, "metric residual " + std::to_string(r) + " after time step");
    }
    curve.frames[i] = f;
    curve.points[i] = f.point;
  }
  const auto fresh = curvature_from_curve(curve, opts.curvature);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const std::size_t j = (i + lay.n - lay.pad % lay.n) % lay.n;
    curve.kappa[i] = fresh[lay.pad + j];
  }
}

}  // namespace

std::vector<FlowState> evolve_curve(const MotionSpec& motion, const CurveSample& curve0, double L,
                                    double dt, double T, const CurveFlowOptions& opts) {
  const PeriodicLayout lay = layout_of(curve0, L);
  const StepPlan plan = plan_steps(dt, T, opts.snap_every);
  const MotionEvaluator ev(motion);
  const HierarchyTable table = generate(2);
  CurveSample curve = curve0;
  const double initial = max_abs(periodic_part(curve.kappa, lay));
  const double limit = opts.instability_factor * (initial > 0.0 ? initial : 1.0);

  std::vector<FlowState> out;
  auto snapshot = [&](double t) {
    FlowState st;
    st.t = t;
    st.grid = {L, periodic_part(curve.kappa, lay)};
    st.frames = curve.frames;
    st.conserved = conserved_functionals(st.grid, table, 2);
    out.push_back(std::move(st));
  };
  snapshot(0.0);
  for (std::size_t step = 1; step <= plan.steps; ++step) {
    curve_step(curve, lay, L, ev, plan.dt, opts);
    const double t = plan.dt * static_cast<double>(step);
    check_growth(periodic_part(curve.kappa, lay), limit, t);
    if (step % plan.stride == 0 || step == plan.steps) snapshot(t);
  }
  return out;
}

std::vector<double> consistency_field(const MotionSpec& motion, const CurveSample& curve0,
                                      double L, double dt, const CurveFlowOptions& opts) {
  const PeriodicLayout lay = layout_of(curve0, L);
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  const MotionEvaluator ev(motion);
  const CurvatureGrid grid0{L, periodic_part(curve0.kappa, lay)};
  curvature_from_curve(curve0, opts.curvature);

  // The step itself, for its checks on the moved curve.
  CurveSample curve = curve0;
  curve_step(curve, lay, L, ev, dt, opts);

  // kappa = |D3 x|^2 / 4 with D3 the extractor's stencil, so
  // kappa(dt) - kappa(0) = <D3 dx, 2 D3 x + D3 dx> / 4.
  const auto jets0 = flow_jets(grid0, ev.order, opts.filter, opts.band_limit);
  std::vector<MVec3> dx(curve0.size());
  for (std::size_t i = 0; i < curve0.size(); ++i) {
    const std::size_t j = (i + lay.n - lay.pad % lay.n) % lay.n;
    const Mat4 inc = curve0.frames[i].matrix() * expm_minus_identity(dt * ev.matrix(jet_at(jets0, j)));
    dx[i] = MVec3(inc(1, 0), inc(2, 0), inc(3, 0));
  }
  const double h = curve0.step();
  auto d3 = [h](const std::vector<MVec3>& x, std::size_t k) -> MVec3 {
    return (x[k + 2] - 2.0 * x[k + 1] + 2.0 * x[k - 1] - x[k - 2]) / (2.0 * h * h * h);
  };

  const NumericPoly rhs(motion.rhs);
  const auto jets = flow_jets(grid0, rhs.order(), false, opts.band_limit);
  std::vector<double> out(lay.n);
  for (std::size_t j = 0; j < lay.n; ++j) {
    const std::size_t k = lay.pad + j;
    const MVec3 a = d3(curve0.points, k);
    const MVec3 b = d3(dx, k);
    const double rate = 0.25 * minkowski_inner(b, 2.0 * a + b) / dt;
    out[j] = rate - rhs(jet_at(jets, j));
  }
  return out;
}

double consistency_check(const MotionSpec& motion, const CurveSample& curve0, double L, double dt,
                         const CurveFlowOptions& opts) {
  double worst = 0.0;
  for (double d : consistency_field(motion, curve0, L, dt, opts)) worst = std::max(worst, std::abs(d));
  return worst;
}

}  // namespace nullkdv
