#include <cmath>

#include <Eigen/LU>
#include <doctest.h>

#include "nullkdv/special.hpp"

using namespace nullkdv;

namespace {

// Complete elliptic integral of the first kind by the AGM.
double elliptic_k(double k) {
  double a = 1.0, b = std::sqrt(1.0 - k * k);
  for (int i = 0; i < 40; ++i) {
    const double m = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = m;
  }
  return M_PI / (2.0 * a);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;  // unreachable in the checks below
}

}  // namespace

TEST_CASE("Weierstrass parameters") {
  const auto w = WeierstrassParams::from_invariants(4.0, 0.0);
  CHECK(w.e1 == doctest::Approx(1.0));
  CHECK(w.e2 == doctest::Approx(0.0).scale(1.0));
  CHECK(w.e3 == doctest::Approx(-1.0));
  CHECK(w.omega1 == doctest::Approx(elliptic_k(std::sqrt(0.5)) / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(w.period() == doctest::Approx(2.0 * w.omega1));

  for (auto [g2, g3] : {std::pair{4.0, -1.0}, std::pair{3.0, 0.5}}) {
    const auto p = WeierstrassParams::from_invariants(g2, g3);
    CHECK(p.e1 > p.e2);
    CHECK(p.e2 > p.e3);
    CHECK(p.e1 + p.e2 + p.e3 == doctest::Approx(0.0).scale(1.0));
    for (double e : {p.e1, p.e2, p.e3}) CHECK(4 * e * e * e - g2 * e - g3 == doctest::Approx(0.0).scale(1.0));
    const double k = std::sqrt((p.e2 - p.e3) / (p.e1 - p.e3));
    CHECK(p.omega1 == doctest::Approx(elliptic_k(k) / std::sqrt(p.e1 - p.e3)).epsilon(1e-12));
  }
  CHECK(kind_of([] { WeierstrassParams::from_invariants(0.0, 1.0); }) == ErrorKind::DomainError);
  CHECK(kind_of([] { WeierstrassParams::from_invariants(3.0, 1.0); }) == ErrorKind::DomainError);
}

TEST_CASE("Weierstrass function values") {
  const auto w = WeierstrassParams::from_invariants(4.0, 0.0);
  const double x = 1e-3;
  CHECK(x * x * weierstrass_p(x, w).first == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(weierstrass_p(w.omega1, w).first == doctest::Approx(w.e1).epsilon(1e-10));
  CHECK(weierstrass_p(w.omega1, w).second == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  CHECK(weierstrass_p(0.0, w, WeierstrassBranch::Shifted).first == doctest::Approx(w.e3).epsilon(1e-10));
  CHECK(weierstrass_p(w.omega1, w, WeierstrassBranch::Shifted).first == doctest::Approx(w.e2).scale(1.0));
  // Evenness and periodicity.
  CHECK(weierstrass_p(-0.4, w).first == doctest::Approx(weierstrass_p(0.4, w).first));
  CHECK(weierstrass_p(0.4 + w.period(), w).first == doctest::Approx(weierstrass_p(0.4, w).first));
  CHECK(kind_of([&] { weierstrass_p(1e-12, w); }) == ErrorKind::NearPole);
  CHECK(kind_of([&] { weierstrass_p(w.period() + 1e-12, w); }) == ErrorKind::NearPole);

  for (auto [g2, g3] : {std::pair{4.0, 0.0}, std::pair{4.0, -1.0}, std::pair{3.0, 0.5}}) {
    const auto p = WeierstrassParams::from_invariants(g2, g3);
    double r = 0.0;
    for (double s : linspace(0.05, 2 * p.omega1 - 0.05, 97)) {
      r = std::max(r, weierstrass_ode_residual(s, p));
      r = std::max(r, weierstrass_ode_residual(s, p, WeierstrassBranch::Shifted));
      const double v = weierstrass_p(s, p, WeierstrassBranch::Shifted).first;
      CHECK(v >= p.e3 - 1e-12);
      CHECK(v <= p.e2 + 1e-12);
    }
    CHECK(r <= 1e-10);
  }
}

TEST_CASE("traveling waves") {
  for (double lambda : {0.0, 1.0}) {
    const auto w = WeierstrassParams::from_invariants(4.0, -1.0);
    const auto f = traveling_wave_period(lambda, w, 256);
    CHECK(f.L == doctest::Approx(w.period()));
    CHECK(traveling_wave_residual(f, lambda) <= 1e-8);

    // Initial data recovers the invariants.
    const double s0 = 0.3;
    const auto [p, pp] = weierstrass_p(s0 + 0.0, w, WeierstrassBranch::Shifted);
    const double f0 = -2 * p + lambda / 6, f0p = -2 * pp, f0pp = -2 * (6 * p * p - w.g2 / 2);
    CHECK(traveling_wave_at(s0, lambda, w) == doctest::Approx(f0));
    const auto [g2, g3] = invariants_from_initial_data(lambda, f0, f0p, f0pp);
    CHECK(g2 == doctest::Approx(w.g2).epsilon(1e-10));
    CHECK(g3 == doctest::Approx(w.g3).epsilon(1e-10));

    const auto grid = linspace(s0, s0 + w.period(), 200);
    const auto ode = traveling_wave_ode(lambda, f0, f0p, f0pp, grid);
    const auto closed = traveling_wave(lambda, w, grid);
    double e = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) e = std::max(e, std::abs(ode[i] - closed[i]));
    CHECK(e <= 1e-8);
  }
}

TEST_CASE("stationary control -2/s^2") {
  const auto s = linspace(1.0, 5.0, 81);
  const auto f = traveling_wave_ode(0.0, -2.0, 4.0, -12.0, s);
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) e = std::max(e, std::abs(f[i] + 2.0 / (s[i] * s[i])));
  CHECK(e < 1e-10);
}

TEST_CASE("Lax pair") {
  const auto w = WeierstrassParams::from_invariants(4.0, 0.0);
  const double lambda = 1.0;
  const auto motion = hierarchy_motion(2);
  std::vector<double> res;
  for (std::size_t n : {128, 256}) {
    const auto f = traveling_wave_period(lambda, w, n);
    const auto pair = build_lax(motion, f, lambda);
    REQUIRE(pair.L.size() == n);
    res.push_back(lax_residual(pair));
    const auto curve = integrate_frenet(f.values, f.h(), Frame::identity());
    const auto mu = mu_invariant(pair, curve.frames);
    CHECK(mu.mu_spread < 1e-6);
    for (double c : mu.charpoly_spread) CHECK(c < 1e-6);
  }
  CHECK(std::log2(res[0] / res[1]) > 1.8);

  // kappa = sin s is not a traveling wave for this lambda: no convergence.
  std::vector<double> ctrl;
  for (std::size_t n : {128, 256}) {
    CurvatureGrid g{2 * M_PI, std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) g.values[k] = std::sin(g.node(k));
    ctrl.push_back(lax_residual(build_lax(motion, g, 1.0)));
  }
  CHECK(ctrl[1] > 0.5 * ctrl[0]);
  CHECK(ctrl[1] > 1.0);
}

TEST_CASE("characteristic polynomial") {
  Mat4 d = Mat4::Zero();
  d.diagonal() << 1, 2, 3, 4;
  const auto c = charpoly(d);
  CHECK(c[0] == doctest::Approx(-10));
  CHECK(c[1] == doctest::Approx(35));
  CHECK(c[2] == doctest::Approx(-50));
  CHECK(c[3] == doctest::Approx(24));
  // Similarity invariance.
  Mat4 a;
  a << 1, 2, 0, 1, 0, 1, 3, 0, 2, 0, 1, 1, 0, 1, 0, 2;
  const auto c2 = charpoly(a * d * a.inverse());
  for (int i = 0; i < 4; ++i) CHECK(c2[i] == doctest::Approx(c[i]).epsilon(1e-10));
}

TEST_CASE("Painleve II") {
  const auto x = linspace(-2.0, 2.0, 401);
  const auto zero = painleve2_solve(0.0, 0.0, 0.0, x);
  CHECK(zero.complete);
  for (double v : zero.v) CHECK(v == 0.0);

  const auto sol = painleve2_solve(0.5, 0.0, 0.1, x);
  REQUIRE(sol.x.size() == x.size());
  CHECK(sol.x.front() == -2.0);
  // The residual's own difference quotient is fourth order in the spacing.
  const auto fine = painleve2_solve(0.5, 0.0, 0.1, linspace(-2.0, 2.0, 801), 0.0, 1e-12);
  const double r1 = painleve2_residual(sol, 0.5), r2 = painleve2_residual(fine, 0.5);
  CHECK(std::log2(r1 / r2) > 3.5);
  CHECK(r2 < 1e-4);

  // Off-grid x0 is still honoured.
  const auto shifted = painleve2_solve(0.5, 0.0, 0.1, x, 0.0013);
  CHECK(shifted.x.size() == x.size());

  try {
    painleve2_solve(0.0, 2.0, 0.0, linspace(-1.0, 4.0, 101));
    FAIL("expected a pole");
  } catch (const PoleEncountered& e) {
    CHECK(e.kind() == ErrorKind::PoleEncountered);
    const auto& part = e.partial();
    CHECK_FALSE(part.complete);
    REQUIRE(!part.x.empty());
    CHECK(part.x.front() <= 0.0);
    CHECK(part.x.back() >= 0.0);
    CHECK(part.x.back() < 4.0);
  }
}

TEST_CASE("Miura map") {
  const auto x = linspace(-2.0, 2.0, 4001);
  const auto sol = painleve2_solve(0.5, 0.0, 0.1, x, 0.0, 1e-10);
  CHECK(miura_check(sol, 0.5, -3.0) < 1e-6);
  const auto img = miura_map(sol, 0.5, -3.0);
  for (std::size_t i = 0; i < sol.x.size(); i += 500) {
    CHECK(img.kappa[i] == doctest::Approx(sol.vp[i] - sol.v[i] * sol.v[i]));
    CHECK(img.xi[i] == doctest::Approx(sol.x[i]));
  }
  CHECK(miura_check(sol, 0.5, 1.0) < 1e-6);
  const auto up = miura_map(sol, 0.5, 1.0);
  for (std::size_t i = 1; i < up.xi.size(); ++i) CHECK(up.xi[i] > up.xi[i - 1]);
}

TEST_CASE("similarity profiles") {
  const auto s = linspace(-3.0, 3.0, 601);
  std::vector<double> k(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) k[i] = std::exp(-s[i] * s[i]);

  const auto same = similarity_profile(s, k, 1.0, 1.0, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(same[i] == doctest::Approx(k[i]).epsilon(1e-12));

  const double a = 2.0, b = 1.0, t = 1.5;
  const double r = std::cbrt((a * t + b) * (a * t + b));
  const auto out = similarity_profile(s, k, a, b, t);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double y = s[i] / std::sqrt(r);
    CHECK(out[i] == doctest::Approx(std::exp(-y * y) / r).epsilon(1e-6));
  }
  // r > 1 shrinks the preimage, so every node stays in range; r < 1 does not.
  const auto wide = similarity_profile(s, k, -0.5, 1.0, 1.0);
  CHECK(std::isnan(wide.front()));
  CHECK(std::isnan(wide.back()));
  CHECK_FALSE(std::isnan(wide[300]));
  CHECK(kind_of([&] { similarity_profile(s, k, -1.0, 1.0, 1.0); }) == ErrorKind::DomainError);
}

TEST_CASE("the similarity family solves KdV") {
  const auto x = linspace(-1.5, 1.5, 3001);
  const auto sol = painleve2_solve(0.5, 0.0, 0.1, x);
  const auto img = miura_map(sol, 0.5, 1.0);
  // At t = 0 with b = 1: kappa_t = -(s kappa' + 2 kappa)/3 = -kappa''' - 6 kappa kappa'.
  const double dt = 1e-4;
  const auto plus = similarity_profile(img.xi, img.kappa, 1.0, 1.0, dt);
  const auto minus = similarity_profile(img.xi, img.kappa, 1.0, 1.0, -dt);
  double e = 0.0;
  for (std::size_t i = 300; i + 300 < img.xi.size(); ++i) {
    const double kt = (plus[i] - minus[i]) / (2 * dt);
    const double want = -(img.xi[i] * img.kappa_p[i] + 2 * img.kappa[i]) / 3.0;
    e = std::max(e, std::abs(kt - want));
  }
  CHECK(e < 1e-5);
}
