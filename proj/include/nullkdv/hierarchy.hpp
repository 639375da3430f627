#pragma once

// Lenard recursion for the KdV hierarchy and the curvature evolution
// induced by local motions of null curves.

#include <vector>

#include "nullkdv/diffpoly.hpp"

namespace nullkdv {

/// g[k] are the hierarchy gradients, p[k] the conserved densities with
/// E(p[k]) = g[k]. g[0] = 1/2 and p[0] = u0/2.
struct HierarchyTable {
  std::vector<DiffPoly> g;
  std::vector<DiffPoly> p;

  int depth() const noexcept { return static_cast<int>(g.size()) - 1; }
};

/// Polynomial coefficients of a local vector field p1 t + p2 n + p3 b and the
/// induced curvature evolution kappa_t = rhs[kappa].
struct MotionSpec {
  DiffPoly p1, p2, p3, p4, p5, p6;
  DiffPoly rhs;
};

inline constexpr int kDefaultMaxDepth = 8;

/// primitive(apply_script_D(g_prev)); throws NotExact.
DiffPoly lenard_step(const DiffPoly& g_prev);

/// Throws InvalidArgument for n < 0 or n > max_depth.
HierarchyTable generate(int n, int max_depth = kDefaultMaxDepth);

/// -D g[n]; cross-checked against -script_D g[n-1] before returning.
DiffPoly kdv_rhs(int n);
DiffPoly kdv_rhs(const HierarchyTable& table, int n);

/// Builds p1..p6 from p3 with all integration constants zero and
/// rhs = script_D(p4)/2. Throws NotAdmissible when u1*p3 is not a total
/// derivative.
MotionSpec motion_from_p3(const DiffPoly& p3);

/// The motion generated by p3 = 4 g[n-2], n >= 2. Its rhs equals kdv_rhs(n).
/// n = 1 is the tangential motion p1 = p4 = -1, p6 = 2u, which translates
/// the curvature.
MotionSpec hierarchy_motion(int n);

/// nlohmann JSON {"n", "g", "p", "rhs"}; rhs is null for n = 0.
nlohmann::json to_json(const HierarchyTable& table);
nlohmann::json to_json(const MotionSpec& motion);

}  // namespace nullkdv
