#pragma once

// Minkowski 3-space, null Frenet frames and reconstruction of null curves
// from their curvature.
//
// Frames are stored as 4x4 affine matrices
//
//   [ 1  0  0  0 ]
//   [ x  t  n  b ]
//
// acting on column vectors, so F' = F K(kappa) is the Frenet system and a
// Lorentz motion A acts by left multiplication.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace nullkdv {

using MVec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// g with <x,y> = x^T g y = -(x1 y3 + x3 y1) + x2 y2.
const Mat3& minkowski_metric();
double minkowski_inner(const MVec3& x, const MVec3& y);
/// <x, e1 + e3> < 0
bool is_future_directed(const MVec3& x);

struct Frame {
  MVec3 point = MVec3::Zero();
  MVec3 a1 = MVec3::UnitX();  // t
  MVec3 a2 = MVec3::UnitY();  // n
  MVec3 a3 = MVec3::UnitZ();  // b

  static Frame identity() { return {}; }
  static Frame from_matrix(const Mat4& m);
  Mat4 matrix() const;
  Mat3 triad() const;
};

/// max_ij |<a_i,a_j> - g_ij|
double frame_metric_residual(const Frame& f);
/// Metric within tol, a1 and a3 future-directed, positive orientation.
bool is_admissible_frame(const Frame& f, double tol = 1e-8);

struct CurveSample {
  std::vector<double> s;
  std::vector<MVec3> points;
  std::vector<Frame> frames;   // empty when not available
  std::vector<double> kappa;   // empty when not available

  std::size_t size() const noexcept { return s.size(); }
  double step() const { return s.size() > 1 ? s[1] - s[0] : 0.0; }
};

/// The Lie algebra element K(kappa) with F' = F K: gamma' = t, t' = n,
/// n' = -2 kappa t + b, b' = -2 kappa n.
Mat4 frenet_matrix(double kappa);

/// The element of e(2,1) generating the variation p1 t + p2 n + p3 b of a
/// frame, with p4, p5, p6 the induced rotation coefficients:
///   rows (0,0,0,0), (p1,p5,p6,0), (p2,p4,0,p6), (p3,0,p4,-p5).
Mat4 variation_matrix(double p1, double p2, double p3, double p4, double p5, double p6);

/// Matrix exponential (scaling and squaring, Pade).
Mat4 expm(const Mat4& a);
/// exp(a) - I, accurate when a is small.
Mat4 expm_minus_identity(const Mat4& a);

enum class FrenetStepper {
  MuntheKaas,    // RKMK4, frames stay on the group
  ProjectedRK4,  // classical RK4 followed by metric re-projection
};

struct FrenetOptions {
  FrenetStepper stepper = FrenetStepper::MuntheKaas;
  double frame_tol = 1e-8;
  /// Grid index at which F0 is imposed; the solve runs both ways from
  /// there. Anchoring mid-domain keeps |gamma| and roundoff small.
  std::size_t anchor = 0;
};

/// Frames at s_k = s0 + k h, k = 0..count-1, for a curvature given as a
/// function of s. Throws FrameDrift when the metric residual exceeds
/// frame_tol and InvalidArgument for an inadmissible F0.
CurveSample integrate_frenet(const std::function<double(double)>& kappa, double s0, double h,
                             std::size_t count, const Frame& f0, const FrenetOptions& opts = {});

/// Same, for curvature sampled at the grid nodes. Values between nodes come
/// from local cubic interpolation.
CurveSample integrate_frenet(std::span<const double> kappa, double h, const Frame& f0,
                             const FrenetOptions& opts = {}, double s0 = 0.0);

struct CurvatureOptions {
  /// Allowed |<gamma'', gamma''> - 1|.
  double pseudo_arc_tol = 1e-3;
  /// gamma' x gamma'' below this fraction of |gamma'||gamma''| is a flex.
  double flex_tol = 1e-6;
};

/// kappa = <gamma''', gamma'''>/4 by central differences on a uniform
/// natural-parameter grid. The two nodes at each end have no centered
/// stencil and are returned as NaN. Throws NotPseudoArc or FlexPoint.
std::vector<double> curvature_from_curve(const CurveSample& curve,
                                         const CurvatureOptions& opts = {});

struct ReparamOptions {
  /// |<gamma',gamma'>| allowed, relative to the Euclidean |gamma'|^2.
  double null_tol = 1e-6;
  double flex_tol = 1e-6;
};

/// Resamples a null curve given on an increasing (possibly non-uniform)
/// t-grid onto a uniform grid in the pseudo-arc parameter, with the same
/// number of nodes and s = 0 at the first node. The outermost resampled
/// points inherit the spline's end effects, so curvature extracted there is
/// only O(h) accurate; two nodes further in it is O(h^2). Throws NotNull,
/// FlexPoint or InvalidArgument.
CurveSample pseudo_arc_reparametrize(std::span<const double> t, std::span<const MVec3> points,
                                     const ReparamOptions& opts = {});

/// The coefficients of an infinitesimal variation p1 t + p2 n + p3 b of a
/// curve with curvature kappa, and the induced curvature change c.
struct TangentField {
  std::vector<double> p1, p2, p3, p4, p5, p6, c;
};

/// Numerical counterpart of motion_from_p3 on a uniform grid: centered
/// differences for derivatives, trapezoid rule for the integral term.
/// `constant` is the value of that integral at the first node; choosing
/// kappa(0) p3(0) for constant p3 matches the symbolic convention p1 = p3 u0.
TangentField tangent_field(std::span<const double> kappa, std::span<const double> p3, double h,
                           double constant = 0.0);

}  // namespace nullkdv
