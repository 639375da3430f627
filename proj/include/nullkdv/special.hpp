#pragma once

// Closed-form and reduced solutions: Weierstrass traveling waves, the Lax
// pair of the KdV flow, and Painleve II similarity solutions.

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nullkdv/error.hpp"
#include "nullkdv/evolution.hpp"
#include "nullkdv/geometry.hpp"
#include "nullkdv/hierarchy.hpp"

namespace nullkdv {

/// Invariants with three distinct real roots e1 > e2 > e3 of 4x^3 - g2 x - g3.
/// omega1 is the real half-period, omega3 the modulus of the imaginary one.
struct WeierstrassParams {
  double g2 = 0.0, g3 = 0.0;
  double e1 = 0.0, e2 = 0.0, e3 = 0.0;
  double omega1 = 0.0, omega3 = 0.0;

  /// Throws DomainError unless 27 g3^2 - g2^3 < 0.
  static WeierstrassParams from_invariants(double g2, double g3);
  double period() const noexcept { return 2.0 * omega1; }
};

/// (g2, g3) of the traveling wave through the initial data (f, f', f'') at
/// a point, via h = -(f - lambda/6)/2 and h'' = 6h^2 - g2/2.
std::pair<double, double> invariants_from_initial_data(double lambda, double f0, double f0p,
                                                       double f0pp);

enum class WeierstrassBranch {
  RealAxis,  // x real: poles at multiples of 2 omega1, values in [e1, inf)
  Shifted,   // x + omega3: bounded, oscillates in [e3, e2]
};

/// (p(x), p'(x)). Throws NearPole on the real-axis branch within
/// pole_tol * omega1 of a lattice point.
std::pair<double, double> weierstrass_p(double x, const WeierstrassParams& params,
                                        WeierstrassBranch branch = WeierstrassBranch::RealAxis,
                                        double pole_tol = 1e-8);

/// |p'^2 - 4p^3 + g2 p + g3| relative to the largest of its terms, or to
/// |g2|^(3/2) + |g3| when that is larger.
double weierstrass_ode_residual(double x, const WeierstrassParams& params,
                                WeierstrassBranch branch = WeierstrassBranch::RealAxis);

/// f(s) = -2 p(s + omega3) + lambda/6, the bounded periodic solution of
/// f''' + 6 f f' - lambda f' = 0.
std::vector<double> traveling_wave(double lambda, const WeierstrassParams& params,
                                   std::span<const double> s_grid);
double traveling_wave_at(double s, double lambda, const WeierstrassParams& params);

/// One period of the profile on `samples` uniform nodes.
CurvatureGrid traveling_wave_period(double lambda, const WeierstrassParams& params,
                                    std::size_t samples);

/// max |f''' + 6 f f' - lambda f'| on a periodic grid, spectral derivatives.
double traveling_wave_residual(const CurvatureGrid& f, double lambda);

/// Direct integration of f''' + 6 f f' - lambda f' = 0 from (f, f', f'')
/// given at s_grid[0]. Throws Instability on blow-up.
std::vector<double> traveling_wave_ode(double lambda, double f0, double f0p, double f0pp,
                                       std::span<const double> s_grid, double rtol = 1e-12);

/// K[kappa], P[kappa] and L = P + lambda K at the nodes of a periodic grid.
struct LaxPair {
  double lambda = 0.0;
  double h = 0.0;
  std::vector<double> s;
  std::vector<Mat4> K, P, L;
};

/// Throws NotAdmissible (via motion) for inadmissible motions.
LaxPair build_lax(const MotionSpec& motion, const CurvatureGrid& kappa, double lambda);

/// max over nodes of the max-entry norm of L' - (L K - K L), with L' by
/// periodic centered differences.
double lax_residual(const LaxPair& pair);

struct MuReport {
  /// max_k |mu(s_k) - mu(s_0)| in the max-entry norm, mu = F L F^-1.
  double mu_spread = 0.0;
  /// Spread (max - min) across s of the characteristic-polynomial
  /// coefficients c1..c4 of L, det(x - L) = x^4 + c1 x^3 + ... + c4.
  std::array<double, 4> charpoly_spread{};
};

/// frames[k] must be the Frenet frame at pair.s[k].
MuReport mu_invariant(const LaxPair& pair, std::span<const Frame> frames);

/// Coefficients c1..c4 (Faddeev-LeVerrier).
std::array<double, 4> charpoly(const Mat4& m);

struct PainleveSolution {
  std::vector<double> x, v, vp;
  bool complete = true;
  std::string stop_reason;
};

/// Raised when a movable pole interrupts the integration; partial() holds
/// the contiguous window that was solved.
class PoleEncountered : public Error {
 public:
  PoleEncountered(const std::string& detail, PainleveSolution partial)
      : Error(ErrorKind::PoleEncountered, detail), partial_(std::move(partial)) {}
  const PainleveSolution& partial() const noexcept { return partial_; }

 private:
  PainleveSolution partial_;
};

/// v'' = 2 v^3 - x v - c with v(x0) = v0, v'(x0) = v0p, reported on the
/// increasing x_grid; integrates outward from x0 in both directions.
PainleveSolution painleve2_solve(double c, double v0, double v0p, std::span<const double> x_grid,
                                 double x0 = 0.0, double rtol = 1e-10);

/// Max pointwise residual of v'' - 2v^3 + x v + c, with v'' by centered
/// differences of v' at interior nodes.
double painleve2_residual(const PainleveSolution& sol, double c);

/// Miura image of a Painleve II solution: kappa(xi) = q^2 (v'(q xi) - v(q xi)^2)
/// with q = -cbrt(a/3), which solves
///   kappa''' + 6 kappa kappa' - (a/3)(xi kappa' + 2 kappa) = 0.
/// For a = -3 (q = 1) this is the plain kappa = v' - v^2.
struct MiuraImage {
  std::vector<double> xi, kappa, kappa_p;  // xi increasing
};
MiuraImage miura_map(const PainleveSolution& sol, double c, double a = 1.0);

/// Max residual of the similarity equation over interior nodes, kappa'
/// from the ODE and kappa''' by fourth-order second differences of kappa'.
double miura_check(const PainleveSolution& sol, double c, double a = 1.0);

/// kappa(s, t) = kappa_profile(s / sqrt(r)) / r with r = (a t + b)^(2/3),
/// evaluated at the profile's own nodes by cubic interpolation; nodes whose
/// preimage s/sqrt(r) lies outside the profile's range are NaN. Throws
/// DomainError for a t + b <= 0.
std::vector<double> similarity_profile(std::span<const double> s, std::span<const double> kappa,
                                       double a, double b, double t);

}  // namespace nullkdv
