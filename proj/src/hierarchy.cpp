#include "nullkdv/hierarchy.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "nullkdv/error.hpp"

namespace nullkdv {

namespace {

// Internal identities that hold for every admissible input; a failure is a
// bug in this library, not a user error.
void require(bool ok, const char* what) {
  if (!ok) throw std::logic_error(std::string("identity violated: ") + what);
}

}  // namespace

DiffPoly lenard_step(const DiffPoly& g_prev) { return primitive(apply_script_D(g_prev)); }

HierarchyTable generate(int n, int max_depth) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "hierarchy depth must be >= 0");
  if (n > max_depth) {
    throw Error(ErrorKind::InvalidArgument, "hierarchy depth " + std::to_string(n) +
                                                " exceeds the configured bound " +
                                                std::to_string(max_depth));
  }
  HierarchyTable table;
  table.g.reserve(static_cast<std::size_t>(n) + 1);
  table.p.reserve(static_cast<std::size_t>(n) + 1);
  table.g.emplace_back(Rational(1, 2));
  for (int k = 1; k <= n; ++k) table.g.push_back(lenard_step(table.g.back()));
  for (const DiffPoly& g : table.g) table.p.push_back(potential_from_gradient(g));
  return table;
}

DiffPoly kdv_rhs(const HierarchyTable& table, int n) {
  if (n < 1 || n > table.depth()) {
    throw Error(ErrorKind::InvalidArgument, "kdv_rhs needs 1 <= n <= table depth");
  }
  const auto idx = static_cast<std::size_t>(n);
  DiffPoly rhs = -total_derivative(table.g[idx]);
  require(rhs == -apply_script_D(table.g[idx - 1]), "-D g_n == -script_D g_{n-1}");
  return rhs;
}

DiffPoly kdv_rhs(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "kdv_rhs needs n >= 1");
  return kdv_rhs(generate(n), n);
}

MotionSpec motion_from_p3(const DiffPoly& p3) {
  const DiffPoly u0 = DiffPoly::u(0);
  const DiffPoly u1 = DiffPoly::u(1);
  const DiffPoly flux = u1 * p3;
  if (!is_total_derivative(flux)) {
    throw Error(ErrorKind::NotAdmissible,
                "u1*p3 is not a total derivative for p3 = " + to_string(p3));
  }
  const DiffPoly integral = primitive(flux);
  const DiffPoly dp3 = total_derivative(p3);
  const DiffPoly d2p3 = total_derivative(dp3);
  const Rational half(1, 2);

  MotionSpec m;
  m.p3 = p3;
  m.p1 = half * d2p3 + integral;
  m.p2 = -dp3;
  m.p4 = -(half * d2p3) - Rational(2) * (u0 * p3) + integral;
  m.p5 = total_derivative(m.p1) + Rational(2) * (u0 * dp3);
  m.p6 = total_derivative(m.p5) - Rational(2) * (u0 * m.p4);
  m.rhs = half * apply_script_D(m.p4);

  require(m.p5 == half * apply_script_D(p3), "p5 == script_D(p3)/2");
  require(m.rhs == -(half * total_derivative(m.p6)) - u0 * m.p5, "rhs == -D(p6)/2 - u0*p5");
  require(m.rhs == Rational(-1, 4) * apply_script_D(primitive(apply_script_D(p3))),
          "rhs == -script_D D^-1 script_D p3 / 4");
  return m;
}

MotionSpec hierarchy_motion(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "hierarchy_motion needs n >= 1");
  if (n == 1) {
    // No p3 generates the first flow; sliding the curve along itself does.
    MotionSpec m;
    m.p1 = DiffPoly(Rational(-1));
    m.p4 = DiffPoly(Rational(-1));
    m.p6 = Rational(2) * DiffPoly::u(0);
    m.rhs = -Rational(1, 2) * total_derivative(m.p6) - DiffPoly::u(0) * m.p5;
    require(m.rhs == kdv_rhs(1), "hierarchy motion rhs == kdv_rhs(1)");
    return m;
  }
  const HierarchyTable table = generate(n);
  MotionSpec m = motion_from_p3(Rational(4) * table.g[static_cast<std::size_t>(n - 2)]);
  require(m.rhs == kdv_rhs(table, n), "hierarchy motion rhs == kdv_rhs(n)");
  return m;
}

nlohmann::json to_json(const HierarchyTable& table) {
  nlohmann::json j;
  j["n"] = table.depth();
  j["g"] = nlohmann::json::array();
  j["p"] = nlohmann::json::array();
  for (const auto& g : table.g) j["g"].push_back(to_json(g));
  for (const auto& p : table.p) j["p"].push_back(to_json(p));
  j["rhs"] = table.depth() >= 1 ? to_json(kdv_rhs(table, table.depth())) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const MotionSpec& m) {
  return {{"p1", to_json(m.p1)}, {"p2", to_json(m.p2)}, {"p3", to_json(m.p3)},
          {"p4", to_json(m.p4)}, {"p5", to_json(m.p5)}, {"p6", to_json(m.p6)},
          {"rhs", to_json(m.rhs)}};
}

}  // namespace nullkdv
