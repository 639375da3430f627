#pragma once

// Periodic evolution of curvature under the hierarchy flows and of null
// curves under the induced frame flow.

#include <cstddef>
#include <vector>

#include "nullkdv/geometry.hpp"
#include "nullkdv/hierarchy.hpp"

namespace nullkdv {

/// kappa sampled at s_k = k L / N, k = 0..N-1, periodic with period L.
struct CurvatureGrid {
  double L = 0.0;
  std::vector<double> values;

  std::size_t N() const noexcept { return values.size(); }
  double h() const { return L / static_cast<double>(values.size()); }
  double node(std::size_t k) const { return h() * static_cast<double>(k); }
  /// N >= 16 and even, L > 0, finite values. Throws InvalidArgument.
  void validate() const;
};

struct FlowState {
  double t = 0.0;
  CurvatureGrid grid;
  std::vector<Frame> frames;     // curve state, empty for curvature-only runs
  std::vector<double> conserved; // P_0, P_1, P_2
};

enum class TimeStepper {
  IntegratingFactorRK4,  // exact linear part, RK4 on the nonlinear remainder
  RK4,
};

struct EvolutionOptions {
  TimeStepper stepper = TimeStepper::IntegratingFactorRK4;
  /// Snapshot cadence in time units; 0 keeps only the first and last state.
  double snap_every = 0.0;
  bool dealias = true;
  /// Abort once max|kappa| exceeds this multiple of its initial value.
  double instability_factor = 1e3;
};

/// Largest dt the explicit part of the stepper is expected to tolerate on
/// this grid, from the nonlinear monomials of rhs (and, for plain RK4,
/// the linear part as well).
double stable_time_step(const MotionSpec& motion, const CurvatureGrid& grid,
                        TimeStepper stepper = TimeStepper::IntegratingFactorRK4);

/// Integrates kappa_t = motion.rhs[kappa] on [0, T] with step dt (shrunk so
/// that it divides T). Throws Instability on blow-up.
std::vector<FlowState> evolve_curvature(const MotionSpec& motion, const CurvatureGrid& grid0,
                                        double dt, double T, const EvolutionOptions& opts = {});

/// P_k = (L/N) sum_j p[k](jet at s_j), k = 0..m, with spectral jets.
std::vector<double> conserved_functionals(const CurvatureGrid& grid, const HierarchyTable& table,
                                          int m);

/// Spectral jets of a periodic grid: row j holds the j-th derivative.
std::vector<std::vector<double>> spectral_jets(const CurvatureGrid& grid, int max_order,
                                               bool dealias = false);

/// The trigonometric interpolant of grid sampled on m uniform nodes.
CurvatureGrid resample(const CurvatureGrid& grid, std::size_t m);

/// The curve with curvature given by the trigonometric interpolant of the
/// grid, sampled at s_k = (k - pad) h for k = 0..N+2 pad-1, so that every
/// periodic node k - pad in 0..N-1 has two neighbours on each side. The
/// frame f0 is imposed at the middle of the periodic range.
CurveSample make_periodic_curve(const CurvatureGrid& grid, std::size_t pad = 2,
                                const Frame& f0 = Frame::identity(),
                                const FrenetOptions& opts = {});

struct CurveFlowOptions {
  /// Snapshot cadence in time units; 0 keeps only the first and last state.
  double snap_every = 0.0;
  /// Drop modes above the 2/3 cutoff when differentiating the refreshed
  /// curvature.
  bool filter = true;
  /// If nonzero, only modes 0..band_limit enter the jets, e.g. N/2 for a
  /// curve sampled finer than the N-point data its curvature came from.
  std::size_t band_limit = 0;
  double frame_tol = 1e-8;
  double instability_factor = 1e3;
  CurvatureOptions curvature;
};

/// Evolves a curve from make_periodic_curve (period L) by
/// F <- F exp(dt P[kappa]) and refreshes kappa from the moved points after
/// every step. The step is explicit in the dispersive term, so over many
/// steps dt must stay well below h^(2n-1) for the n-th flow. Throws
/// FrameDrift or Instability.
std::vector<FlowState> evolve_curve(const MotionSpec& motion, const CurveSample& curve0, double L,
                                    double dt, double T, const CurveFlowOptions& opts = {});

/// (kappa(dt) - kappa(0))/dt - rhs[kappa0] at the periodic nodes, with
/// both kappa values extracted from the curve. The difference is formed
/// from the point displacements, so it does not lose digits as dt -> 0.
std::vector<double> consistency_field(const MotionSpec& motion, const CurveSample& curve0, double L,
                                      double dt, const CurveFlowOptions& opts = {});

/// Max abs of consistency_field.
double consistency_check(const MotionSpec& motion, const CurveSample& curve0, double L, double dt,
                         const CurveFlowOptions& opts = {});

}  // namespace nullkdv
