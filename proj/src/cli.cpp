#include "nullkdv/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nullkdv/diffpoly.hpp"
#include "nullkdv/error.hpp"
#include "nullkdv/evolution.hpp"
#include "nullkdv/geometry.hpp"
#include "nullkdv/hierarchy.hpp"
#include "nullkdv/special.hpp"

namespace nullkdv::cli {

namespace {

using nlohmann::json;
using Meta = std::vector<std::pair<std::string, std::string>>;

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double number(const std::string& text, const std::string& name) {
  try {
    return parse_rational(text).get_d();
  } catch (const Error&) {
    throw Error(ErrorKind::ParseError, "--" + name + ": not a number: '" + text + "'");
  }
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return kUsage;
    case ErrorKind::InvalidArgument:
    case ErrorKind::DomainError: return kDomain;
    case ErrorKind::NotExact:
    case ErrorKind::NotGradient:
    case ErrorKind::JetTooShort:
    case ErrorKind::NotAdmissible: return kSymbolic;
    case ErrorKind::FrameDrift:
    case ErrorKind::NotPseudoArc:
    case ErrorKind::FlexPoint:
    case ErrorKind::NotNull: return kGeometry;
    case ErrorKind::Instability:
    case ErrorKind::NearPole:
    case ErrorKind::PoleEncountered: return kNumerical;
    case ErrorKind::IoError: return kIo;
  }
  return kDomain;
}

// Numeric CSV with optional "# ..." comment lines and one header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(std::size_t i, const std::string& what) const {
    if (i >= columns.size()) throw Error(ErrorKind::InvalidArgument, what + ": missing column");
    return columns[i];
  }
};

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    cells.push_back(cell);
  }
  return cells;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_commas(line);
    if (t.header.empty()) {
      t.header = cells;
      t.columns.resize(cells.size());
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw Error(ErrorKind::ParseError, path + ":" + std::to_string(lineno) + ": expected " +
                                             std::to_string(t.header.size()) + " columns");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(cells[i].c_str(), &end);
      if (cells[i].empty() || *end != '\0') {
        throw Error(ErrorKind::ParseError, path + ":" + std::to_string(lineno) + ": bad number '" + cells[i] + "'");
      }
      t.columns[i].push_back(v);
    }
  }
  if (t.header.empty() || t.columns[0].empty()) throw Error(ErrorKind::ParseError, path + ": no data rows");
  return t;
}

// A uniform s,kappa CSV read as a periodic grid: N rows at s_k = s_0 + k h
// span one period L = N h.
struct SampledCurvature {
  std::vector<double> s, kappa;
  double h = 0.0;
};

SampledCurvature read_kappa(const std::string& path) {
  const Table t = read_csv(path);
  SampledCurvature k;
  k.s = t.column(0, path);
  k.kappa = t.column(1, path);
  if (k.s.size() < 4) throw Error(ErrorKind::InvalidArgument, path + ": need at least 4 samples");
  k.h = k.s[1] - k.s[0];
  for (std::size_t i = 1; i < k.s.size(); ++i) {
    if (!(k.h > 0.0) || std::abs(k.s[i] - k.s[i - 1] - k.h) > 1e-9 * std::max(1.0, k.h)) {
      throw Error(ErrorKind::InvalidArgument, path + ": s column must be uniform and increasing");
    }
  }
  return k;
}

CurvatureGrid periodic_grid(const SampledCurvature& k) {
  CurvatureGrid g{k.h * static_cast<double>(k.kappa.size()), k.kappa};
  g.validate();
  return g;
}

void write_meta_csv(std::ostream& os, const Meta& meta) {
  for (const auto& [key, value] : meta) os << "# " << key << "=" << value << "\n";
}

json meta_json(const Meta& meta) {
  json j = json::object();
  for (const auto& [key, value] : meta) j[key] = value;
  return j;
}

void write_frame_row(std::ostream& os, double s, const Frame& f) {
  os << fmt(s);
  for (const MVec3* v : {&f.point, &f.a1, &f.a2, &f.a3}) {
    for (int i = 0; i < 3; ++i) os << "," << fmt((*v)[i]);
  }
  os << "\n";
}

constexpr const char* kFrameHeader = "s,x1,x2,x3,t1,t2,t3,n1,n2,n3,b1,b2,b3";

MotionSpec motion_from_choice(const std::optional<std::string>& p3, const std::optional<int>& n) {
  if (p3.has_value() == n.has_value()) {
    throw Error(ErrorKind::InvalidArgument, "give exactly one of --p3 and --hierarchy-n");
  }
  if (n) return hierarchy_motion(*n);
  return motion_from_p3(parse_diffpoly(*p3));
}

double max_relative_drift(const std::vector<FlowState>& states, std::size_t k) {
  const double p0 = states.front().conserved[k];
  double worst = 0.0;
  for (const auto& st : states) {
    const double d = std::abs(st.conserved[k] - p0);
    worst = std::max(worst, std::abs(p0) > 1e-300 ? d / std::abs(p0) : d);
  }
  return worst;
}

// Everything a subcommand needs besides its own options.
struct Context {
  std::string name;
  Meta meta;
  std::string output;  // empty: write to the caller's stream
  std::string partial;
};

class Runner {
 public:
  Runner(std::ostream& out) : out_(out) {}

  void emit(const Context& ctx, const std::string& text) {
    if (ctx.output.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(ctx.output, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot write '" + ctx.output + "'");
    f << text;
    if (!f) throw Error(ErrorKind::IoError, "write failed for '" + ctx.output + "'");
  }

 private:
  std::ostream& out_;
};

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  f << text;
}

// --- subcommands ---------------------------------------------------------

std::string cmd_hierarchy(Context& ctx, int n, const std::string& format) {
  const HierarchyTable table = generate(n);
  if (format == "json") {
    json j = to_json(table);
    json text = {{"g", json::array()}, {"p", json::array()}};
    for (const auto& g : table.g) text["g"].push_back(to_string(g));
    for (const auto& p : table.p) text["p"].push_back(to_string(p));
    text["rhs"] = n >= 1 ? json(to_string(kdv_rhs(table, n))) : json(nullptr);
    j["text"] = text;
    j["meta"] = meta_json(ctx.meta);
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  write_meta_csv(os, ctx.meta);
  for (int k = 0; k <= n; ++k) os << "g" << k << " = " << to_string(table.g[static_cast<std::size_t>(k)]) << "\n";
  for (int k = 0; k <= n; ++k) os << "p" << k << " = " << to_string(table.p[static_cast<std::size_t>(k)]) << "\n";
  for (int k = 1; k <= n; ++k) os << "u_t[" << k << "] = " << to_string(kdv_rhs(table, k)) << "\n";
  return os.str();
}

std::string cmd_motion(Context& ctx, const MotionSpec& m, const std::string& format) {
  const std::pair<const char*, const DiffPoly*> parts[] = {
      {"p1", &m.p1}, {"p2", &m.p2}, {"p3", &m.p3}, {"p4", &m.p4},
      {"p5", &m.p5}, {"p6", &m.p6}, {"rhs", &m.rhs}};
  if (format == "json") {
    json j = to_json(m);
    json text = json::object();
    for (const auto& [name, poly] : parts) text[name] = to_string(*poly);
    j["text"] = text;
    j["meta"] = meta_json(ctx.meta);
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  write_meta_csv(os, ctx.meta);
  for (const auto& [name, poly] : parts) os << name << " = " << to_string(*poly) << "\n";
  return os.str();
}

std::string cmd_reconstruct(Context& ctx, const std::string& kappa_path, const std::string& frame0,
                            const std::string& stepper, bool frames) {
  if (frame0 != "identity") throw Error(ErrorKind::InvalidArgument, "--frame0 supports only 'identity'");
  FrenetOptions opts;
  if (stepper == "rkmk") {
    opts.stepper = FrenetStepper::MuntheKaas;
  } else if (stepper == "rk4") {
    opts.stepper = FrenetStepper::ProjectedRK4;
  } else {
    throw Error(ErrorKind::InvalidArgument, "--stepper must be rkmk or rk4");
  }
  const SampledCurvature k = read_kappa(kappa_path);
  const CurveSample c = integrate_frenet(k.kappa, k.h, Frame::identity(), opts, k.s.front());
  double drift = 0.0;
  for (const auto& f : c.frames) drift = std::max(drift, frame_metric_residual(f));
  ctx.meta.emplace_back("frame_metric_residual", fmt(drift));
  std::ostringstream os;
  write_meta_csv(os, ctx.meta);
  if (frames) {
    os << kFrameHeader << "\n";
    for (std::size_t i = 0; i < c.size(); ++i) write_frame_row(os, c.s[i], c.frames[i]);
  } else {
    os << "s,x1,x2,x3\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
      os << fmt(c.s[i]) << "," << fmt(c.points[i][0]) << "," << fmt(c.points[i][1]) << ","
         << fmt(c.points[i][2]) << "\n";
    }
  }
  return os.str();
}

std::string cmd_extract(Context& ctx, const std::string& curve_path, double null_tol,
                        double arc_tol) {
  const Table t = read_csv(curve_path);
  const auto& param = t.column(0, curve_path);
  std::vector<MVec3> pts(param.size());
  for (std::size_t i = 0; i < param.size(); ++i) {
    pts[i] = MVec3(t.column(1, curve_path)[i], t.column(2, curve_path)[i], t.column(3, curve_path)[i]);
  }
  ReparamOptions ro;
  ro.null_tol = null_tol;
  CurvatureOptions co;
  co.pseudo_arc_tol = arc_tol;
  const CurveSample c = pseudo_arc_reparametrize(param, pts, ro);
  const auto kappa = curvature_from_curve(c, co);
  ctx.meta.emplace_back("pseudo_arc_length", fmt(c.s.back()));
  std::ostringstream os;
  write_meta_csv(os, ctx.meta);
  os << "s,kappa\n";
  for (std::size_t i = 0; i < c.size(); ++i) os << fmt(c.s[i]) << "," << fmt(kappa[i]) << "\n";
  return os.str();
}

struct EvolveArgs {
  std::optional<std::string> p3;
  std::optional<int> n;
  std::optional<std::string> kappa0;
  bool soliton = false;
  std::optional<std::string> sine;
  std::optional<std::string> L, N, dt;
  std::string T = "1";
  std::string snap_every = "0";
  std::string format = "csv";
  std::string stepper = "if";
  bool with_curve = false;
  std::string frames_output;
  std::string conserved_log;
};

std::string cmd_evolve(Context& ctx, const EvolveArgs& a) {
  const MotionSpec motion = motion_from_choice(a.p3, a.n);
  const int sources = (a.kappa0 ? 1 : 0) + (a.soliton ? 1 : 0) + (a.sine ? 1 : 0);
  if (sources != 1) throw Error(ErrorKind::InvalidArgument, "give exactly one of --kappa0, --soliton, --sine");
  CurvatureGrid grid;
  if (a.kappa0) {
    grid = periodic_grid(read_kappa(*a.kappa0));
  } else {
    if (!a.L || !a.N) throw Error(ErrorKind::InvalidArgument, "--soliton and --sine need --L and --N");
    grid.L = number(*a.L, "L");
    const double nd = number(*a.N, "N");
    if (!(nd >= 16) || nd != std::floor(nd) || nd > 1e8) throw Error(ErrorKind::InvalidArgument, "--N must be an integer >= 16");
    grid.values.resize(static_cast<std::size_t>(nd));
    const double amp = a.sine ? number(*a.sine, "sine") : 0.0;
    for (std::size_t k = 0; k < grid.N(); ++k) {
      const double s = grid.node(k);
      if (a.soliton) {
        const double c = 1.0 / std::cosh(s - grid.L / 2.0);
        grid.values[k] = 2.0 * c * c;
      } else {
        grid.values[k] = amp * std::sin(2.0 * std::numbers::pi * s / grid.L);
      }
    }
  }
  grid.validate();
  EvolutionOptions eo;
  if (a.stepper == "if") {
    eo.stepper = TimeStepper::IntegratingFactorRK4;
  } else if (a.stepper == "rk4") {
    eo.stepper = TimeStepper::RK4;
  } else {
    throw Error(ErrorKind::InvalidArgument, "--stepper must be if or rk4");
  }
  eo.snap_every = number(a.snap_every, "snap-every");
  const double T = number(a.T, "T");
  const double dt = a.dt ? number(*a.dt, "dt") : std::min(stable_time_step(motion, grid, eo.stepper), 1e-2);
  ctx.meta.emplace_back("rhs", to_string(motion.rhs));
  ctx.meta.emplace_back("L", fmt(grid.L));
  ctx.meta.emplace_back("N", std::to_string(grid.N()));
  ctx.meta.emplace_back("dt_used", fmt(dt));

  const auto states = evolve_curvature(motion, grid, dt, T, eo);
  Meta tail;
  std::ostringstream log;
  log << "t,P0,P1,P2\n";
  for (const auto& st : states) {
    log << fmt(st.t) << "," << fmt(st.conserved[0]) << "," << fmt(st.conserved[1]) << ","
        << fmt(st.conserved[2]) << "\n";
  }
  std::vector<double> drift;
  for (std::size_t k = 0; k < 3; ++k) drift.push_back(max_relative_drift(states, k));
  tail.emplace_back("max_relative_drift", fmt(drift[0]) + "," + fmt(drift[1]) + "," + fmt(drift[2]));

  if (a.with_curve) {
    const CurveSample curve0 = make_periodic_curve(grid);
    CurveFlowOptions co;
    co.snap_every = eo.snap_every;
    tail.emplace_back("consistency", fmt(consistency_check(motion, curve0, grid.L, dt, co)));
    const auto curve_states = evolve_curve(motion, curve0, grid.L, dt, T, co);
    double dev = 0.0;
    const auto& a_end = curve_states.back().grid.values;
    const auto& b_end = states.back().grid.values;
    for (std::size_t k = 0; k < a_end.size(); ++k) dev = std::max(dev, std::abs(a_end[k] - b_end[k]));
    tail.emplace_back("curve_vs_curvature_max_deviation", fmt(dev));
    if (!a.frames_output.empty()) {
      std::ostringstream fr;
      write_meta_csv(fr, ctx.meta);
      fr << "t," << kFrameHeader << "\n";
      const double h = grid.h();
      const std::size_t pad = (curve0.size() - grid.N()) / 2;
      for (const auto& st : curve_states) {
        for (std::size_t i = 0; i < st.frames.size(); ++i) {
          fr << fmt(st.t) << ",";
          write_frame_row(fr, (static_cast<double>(i) - static_cast<double>(pad)) * h, st.frames[i]);
        }
      }
      write_text_file(a.frames_output, fr.str());
    }
  }
  if (!a.conserved_log.empty()) write_text_file(a.conserved_log, log.str());

  std::ostringstream os;
  if (a.format == "json") {
    os << json{{"meta", meta_json(ctx.meta)}}.dump() << "\n";
    for (const auto& st : states) {
      json line = {{"t", st.t}, {"kappa", st.grid.values}, {"P", st.conserved}};
      os << line.dump() << "\n";
    }
    os << json{{"summary", meta_json(tail)}}.dump() << "\n";
  } else {
    write_meta_csv(os, ctx.meta);
    os << "t,s,kappa\n";
    for (const auto& st : states) {
      for (std::size_t k = 0; k < st.grid.N(); ++k) {
        os << fmt(st.t) << "," << fmt(st.grid.node(k)) << "," << fmt(st.grid.values[k]) << "\n";
      }
    }
    for (const auto& st : states) {
      os << "# P t=" << fmt(st.t) << " P0=" << fmt(st.conserved[0]) << " P1=" << fmt(st.conserved[1])
         << " P2=" << fmt(st.conserved[2]) << "\n";
    }
    write_meta_csv(os, tail);
  }
  return os.str();
}

std::string cmd_travelingwave(Context& ctx, double lambda, double g2, double g3, int samples) {
  if (samples < 16 || samples % 2 != 0) throw Error(ErrorKind::InvalidArgument, "--period-samples must be even and >= 16");
  const auto w = WeierstrassParams::from_invariants(g2, g3);
  const CurvatureGrid f = traveling_wave_period(lambda, w, static_cast<std::size_t>(samples));
  std::vector<double> s(f.N() + 1);
  for (std::size_t k = 0; k <= f.N(); ++k) s[k] = f.node(k);
  const double f0 = -2.0 * w.e3 + lambda / 6.0;
  const double f0pp = -2.0 * (6.0 * w.e3 * w.e3 - g2 / 2.0);
  const auto ode = traveling_wave_ode(lambda, f0, 0.0, f0pp, s);
  double agree = 0.0, wres = 0.0;
  for (std::size_t k = 0; k < f.N(); ++k) {
    agree = std::max(agree, std::abs(ode[k] - f.values[k]));
    wres = std::max(wres, weierstrass_ode_residual(s[k], w, WeierstrassBranch::Shifted));
  }
  for (const auto& [key, v] : {std::pair{"e1", w.e1}, {"e2", w.e2}, {"e3", w.e3}, {"omega1", w.omega1},
                               {"omega3", w.omega3}, {"period", w.period()},
                               {"residual", traveling_wave_residual(f, lambda)},
                               {"ode_agreement", agree}, {"weierstrass_residual", wres}}) {
    ctx.meta.emplace_back(key, fmt(v));
  }
  std::ostringstream os;
  write_meta_csv(os, ctx.meta);
  os << "s,kappa\n";
  for (std::size_t k = 0; k < f.N(); ++k) os << fmt(f.node(k)) << "," << fmt(f.values[k]) << "\n";
  return os.str();
}

std::string cmd_lax(Context& ctx, double lambda, const std::string& kappa_path, const std::string& p3) {
  const MotionSpec motion = motion_from_p3(parse_diffpoly(p3));
  const SampledCurvature k = read_kappa(kappa_path);
  const CurvatureGrid grid = periodic_grid(k);
  const LaxPair pair = build_lax(motion, grid, lambda);
  const CurveSample curve = integrate_frenet(k.kappa, k.h, Frame::identity(), {}, k.s.front());
  const MuReport mu = mu_invariant(pair, curve.frames);
  json j = {{"lambda", lambda},
            {"lax_residual", lax_residual(pair)},
            {"mu_spread", mu.mu_spread},
            {"charpoly_spread", mu.charpoly_spread},
            {"h", k.h},
            {"N", grid.N()},
            {"meta", meta_json(ctx.meta)}};
  return j.dump(2) + "\n";
}

std::string painleve_csv(const Meta& meta, const PainleveSolution& sol, double a) {
  const double q = -std::cbrt(a / 3.0);
  std::ostringstream os;
  write_meta_csv(os, meta);
  os << "x,v,vp,xi,kappa\n";
  for (std::size_t k = 0; k < sol.x.size(); ++k) {
    const double v = sol.v[k], vp = sol.vp[k];
    os << fmt(sol.x[k]) << "," << fmt(v) << "," << fmt(vp) << "," << fmt(sol.x[k] / q) << ","
       << fmt(q * q * (vp - v * v)) << "\n";
  }
  return os.str();
}

std::string cmd_painleve(Context& ctx, double c, double v0, double v0p, double xmin, double xmax,
                         double h, double x0, double a) {
  if (!(xmax > xmin) || !(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "need xmin < xmax and h > 0");
  const double count = std::round((xmax - xmin) / h);
  if (count < 4 || count > 1e8) throw Error(ErrorKind::InvalidArgument, "window must hold 5 .. 1e8 nodes");
  std::vector<double> x(static_cast<std::size_t>(count) + 1);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = xmin + (xmax - xmin) * static_cast<double>(k) / count;
  try {
    const PainleveSolution sol = painleve2_solve(c, v0, v0p, x, x0);
    ctx.meta.emplace_back("painleve_residual", fmt(painleve2_residual(sol, c)));
    ctx.meta.emplace_back("miura_residual", fmt(miura_check(sol, c, a)));
    return painleve_csv(ctx.meta, sol, a);
  } catch (const PoleEncountered& e) {
    if (!ctx.output.empty() && !e.partial().x.empty()) {
      ctx.partial = ctx.output + ".partial";
      Meta m = ctx.meta;
      m.emplace_back("stopped", e.detail());
      write_text_file(ctx.partial, painleve_csv(m, e.partial(), a));
    }
    throw;
  }
}

std::string cmd_similarity(Context& ctx, const std::string& kappa_path, double a, double b, double t) {
  const SampledCurvature k = read_kappa(kappa_path);
  const auto out = similarity_profile(k.s, k.kappa, a, b, t);
  const double base = a * t + b;
  ctx.meta.emplace_back("r", fmt(std::cbrt(base * base)));
  std::ostringstream os;
  write_meta_csv(os, ctx.meta);
  os << "s,kappa\n";
  for (std::size_t i = 0; i < out.size(); ++i) os << fmt(k.s[i]) << "," << fmt(out[i]) << "\n";
  return os.str();
}

void record_options(const CLI::App* sub, Context& ctx) {
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name.empty() || name == "--help") continue;
    std::string key = opt->get_lnames().empty() ? name : opt->get_lnames().front();
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? " " : "") + res[i];
      if (opt->get_type_size() == 0 && value.empty()) value = "true";
    } else {
      value = opt->get_default_str();
      if (value.empty()) continue;
    }
    ctx.meta.emplace_back(key, value);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Null curves in Minkowski 3-space and the KdV hierarchy"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  Context ctx;
  std::string format = "text";

  auto add_output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", ctx.output, "Output file (default: standard output)");
  };

  int n_hier = 3;
  auto* hier = app.add_subcommand("hierarchy", "Lenard recursion table g_k, p_k and flows");
  hier->add_option("--n", n_hier, "Depth")->required();
  hier->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  add_output(hier);

  std::optional<std::string> m_p3;
  std::optional<int> m_n;
  auto* mot = app.add_subcommand("motion", "Local motion generated by p3");
  mot->add_option("--p3", m_p3, "Generator p3 as a polynomial, e.g. \"4*u0\"");
  mot->add_option("--hierarchy-n", m_n, "Use p3 = 4 g[n-2]");
  mot->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  add_output(mot);

  std::string r_kappa, r_frame0 = "identity", r_stepper = "rkmk";
  bool r_frames = false;
  auto* rec = app.add_subcommand("reconstruct", "Curve from curvature samples");
  rec->add_option("--kappa", r_kappa, "Curvature CSV s,kappa")->required();
  rec->add_option("--frame0", r_frame0, "Initial frame");
  rec->add_option("--stepper", r_stepper, "rkmk or rk4");
  rec->add_flag("--frames", r_frames, "Write full frames instead of points");
  add_output(rec);

  std::string x_curve, x_null = "1e-6", x_arc = "1e-3";
  auto* ext = app.add_subcommand("extract", "Curvature of a sampled null curve");
  ext->add_option("--curve", x_curve, "Curve CSV t,x1,x2,x3")->required();
  ext->add_option("--null-tol", x_null, "Relative tolerance on <gamma',gamma'>");
  ext->add_option("--pseudo-arc-tol", x_arc, "Tolerance on <gamma'',gamma''> - 1");
  add_output(ext);

  EvolveArgs ev;
  auto* evo = app.add_subcommand("evolve", "Evolve curvature (and optionally the curve)");
  evo->add_option("--p3", ev.p3, "Generator p3");
  evo->add_option("--hierarchy-n", ev.n, "Hierarchy member n >= 1");
  evo->add_option("--kappa0", ev.kappa0, "Initial curvature CSV over one period");
  evo->add_flag("--soliton", ev.soliton, "Initial 2 sech^2(s - L/2)");
  evo->add_option("--sine", ev.sine, "Initial A sin(2 pi s / L) with this A");
  evo->add_option("--L", ev.L, "Period for --soliton/--sine");
  evo->add_option("--N", ev.N, "Samples for --soliton/--sine");
  evo->add_option("--dt", ev.dt, "Time step (default: stability estimate)");
  evo->add_option("--T", ev.T, "Final time");
  evo->add_option("--snap-every", ev.snap_every, "Snapshot cadence in time units");
  evo->add_option("--format", ev.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  evo->add_option("--stepper", ev.stepper, "if (integrating factor) or rk4");
  evo->add_flag("--with-curve", ev.with_curve, "Co-evolve the curve and report consistency");
  evo->add_option("--frames-output", ev.frames_output, "Frame snapshots CSV (with --with-curve)");
  evo->add_option("--conserved-log", ev.conserved_log, "CSV log t,P0,P1,P2");
  add_output(evo);

  std::string t_lambda = "0", t_g2, t_g3;
  int t_samples = 256;
  auto* tw = app.add_subcommand("travelingwave", "Weierstrass traveling-wave profile");
  tw->add_option("--lambda", t_lambda, "Wave speed");
  tw->add_option("--g2", t_g2, "Invariant g2")->required();
  tw->add_option("--g3", t_g3, "Invariant g3")->required();
  tw->add_option("--period-samples", t_samples, "Samples per period");
  add_output(tw);

  std::string l_lambda = "0", l_kappa, l_p3 = "2";
  auto* lax = app.add_subcommand("lax", "Lax pair residual and spectral invariants");
  lax->add_option("--lambda", l_lambda, "Spectral parameter")->required();
  lax->add_option("--kappa", l_kappa, "Periodic curvature CSV")->required();
  lax->add_option("--p3", l_p3, "Generator p3");
  add_output(lax);

  std::string p_c = "0", p_v0 = "0", p_v0p = "0", p_xmin = "-5", p_xmax = "2", p_h = "1e-3",
              p_x0 = "0", p_a = "1";
  auto* pii = app.add_subcommand("painleve", "Painleve II solution and its Miura image");
  pii->add_option("--c", p_c, "Constant c");
  pii->add_option("--v0", p_v0, "v(x0)");
  pii->add_option("--v0p", p_v0p, "v'(x0)");
  pii->add_option("--xmin", p_xmin, "Window start");
  pii->add_option("--xmax", p_xmax, "Window end");
  pii->add_option("--step", p_h, "Output spacing");
  pii->add_option("--x0", p_x0, "Point carrying the initial data");
  pii->add_option("--a", p_a, "Similarity parameter a");
  add_output(pii);

  std::string s_kappa, s_a = "1", s_b = "1", s_t = "0";
  auto* sim = app.add_subcommand("similarity", "Similarity-rescaled curvature profile");
  sim->add_option("--kappa", s_kappa, "Curvature CSV s,kappa")->required();
  sim->add_option("--a", s_a, "a in r = (a t + b)^(2/3)");
  sim->add_option("--b", s_b, "b in r = (a t + b)^(2/3)");
  sim->add_option("--t", s_t, "Time");
  add_output(sim);

  auto fail = [&](std::string_view kind, const std::string& detail, int code) {
    json e = {{"error", kind}, {"detail", detail},
              {"partial", ctx.partial.empty() ? json(nullptr) : json(ctx.partial)}};
    err << e.dump() << "\n";
    return code;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what(), kUsage);
  }

  CLI::App* sub = app.get_subcommands().front();
  ctx.name = sub->get_name();
  {
    std::string line = "nullkdv";
    for (const auto& a : args) line += " " + a;
    ctx.meta.emplace_back("command", line);
  }
  record_options(sub, ctx);

  Runner runner(out);
  try {
    std::string text;
    if (sub == hier) {
      text = cmd_hierarchy(ctx, n_hier, format);
    } else if (sub == mot) {
      text = cmd_motion(ctx, motion_from_choice(m_p3, m_n), format);
    } else if (sub == rec) {
      text = cmd_reconstruct(ctx, r_kappa, r_frame0, r_stepper, r_frames);
    } else if (sub == ext) {
      text = cmd_extract(ctx, x_curve, number(x_null, "null-tol"), number(x_arc, "pseudo-arc-tol"));
    } else if (sub == evo) {
      text = cmd_evolve(ctx, ev);
    } else if (sub == tw) {
      text = cmd_travelingwave(ctx, number(t_lambda, "lambda"), number(t_g2, "g2"), number(t_g3, "g3"), t_samples);
    } else if (sub == lax) {
      text = cmd_lax(ctx, number(l_lambda, "lambda"), l_kappa, l_p3);
    } else if (sub == pii) {
      text = cmd_painleve(ctx, number(p_c, "c"), number(p_v0, "v0"), number(p_v0p, "v0p"),
                          number(p_xmin, "xmin"), number(p_xmax, "xmax"), number(p_h, "step"),
                          number(p_x0, "x0"), number(p_a, "a"));
    } else if (sub == sim) {
      text = cmd_similarity(ctx, s_kappa, number(s_a, "a"), number(s_b, "b"), number(s_t, "t"));
    }
    runner.emit(ctx, text);
  } catch (const Error& e) {
    return fail(to_string(e.kind()), e.detail(), exit_code(e.kind()));
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), 1);
  }
  return kOk;
}

}  // namespace nullkdv::cli
