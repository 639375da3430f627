#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "nullkdv/cli.hpp"

namespace fs = std::filesystem;
using nullkdv::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "nullkdv_cli_test";
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// Numeric rows of a CSV with '#' metadata and one header line.
std::vector<std::vector<double>> rows(const std::string& csv) {
  std::vector<std::vector<double>> out;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> r;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
    out.push_back(r);
  }
  return out;
}

std::string meta(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  const std::string prefix = "# " + key + "=";
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  }
  return {};
}

std::string kappa_csv(const std::function<double(double)>& f, double h, int n) {
  std::ostringstream os;
  os.precision(17);
  os << "s,kappa\n";
  for (int i = 0; i < n; ++i) os << i * h << "," << f(i * h) << "\n";
  return os.str();
}

}  // namespace

TEST_CASE("hierarchy") {
  const auto r = call({"hierarchy", "--n", "3"});
  CHECK(r.code == 0);
  CHECK(r.out.find("10*u0^3 + 10*u0*u2 + 5*u1^2 + u4") != std::string::npos);
  CHECK(meta(r.out, "n") == "3");

  const auto j = call({"hierarchy", "--n", "2", "--format", "json"});
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["g"].size() == 3);
  CHECK(doc["n"] == 2);
}

TEST_CASE("motion") {
  const auto r = call({"motion", "--hierarchy-n", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("-6*u0*u1 - u3") != std::string::npos);
  CHECK(call({"motion", "--p3", "4*u0"}).code == 0);
  CHECK(call({"motion", "--p3", "u1"}).code == nullkdv::cli::kSymbolic);
  CHECK(call({"motion"}).code == nullkdv::cli::kDomain);
}

TEST_CASE("reconstruct and extract") {
  const auto dir = scratch();
  write(dir / "zero.csv", kappa_csv([](double) { return 0.0; }, 0.01, 201));
  const auto r = call({"reconstruct", "--kappa", (dir / "zero.csv").string()});
  REQUIRE(r.code == 0);
  const auto pts = rows(r.out);
  REQUIRE(pts.size() == 201);
  for (const auto& p : pts) {
    const double s = p[0];
    CHECK(p[1] == doctest::Approx(s).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(s * s / 2).epsilon(1e-12));
    CHECK(p[3] == doctest::Approx(s * s * s / 6).epsilon(1e-12));
  }

  const double h = 2 * M_PI / 512;
  write(dir / "sine.csv", kappa_csv([](double s) { return std::sin(s); }, h, 513));
  const auto curve = dir / "curve.csv";
  REQUIRE(call({"reconstruct", "--kappa", (dir / "sine.csv").string(), "-o", curve.string()}).code == 0);
  const auto e = call({"extract", "--curve", curve.string()});
  REQUIRE(e.code == 0);
  const auto k = rows(e.out);
  REQUIRE(k.size() > 100);
  double err = 0.0;
  for (std::size_t i = 4; i + 4 < k.size(); ++i) err = std::max(err, std::abs(k[i][1] - std::sin(k[i][0])));
  CHECK(err < 1e-3);

  write(dir / "spacelike.csv", "t,x1,x2,x3\n0,0,0,0\n0.1,0,0.1,0.01\n0.2,0,0.2,0.04\n0.3,0,0.3,0.09\n"
                               "0.4,0,0.4,0.16\n0.5,0,0.5,0.25\n0.6,0,0.6,0.36\n");
  CHECK(call({"extract", "--curve", (dir / "spacelike.csv").string()}).code == nullkdv::cli::kGeometry);
}

TEST_CASE("evolve") {
  const std::vector<std::string> args{"evolve", "--hierarchy-n", "2", "--soliton", "--L", "40",
                                      "--N",    "256",           "--T", "0.2",       "--dt", "1e-3"};
  const auto r = call(args);
  REQUIRE(r.code == 0);
  const std::string drift = meta(r.out, "max_relative_drift");
  REQUIRE(!drift.empty());
  std::istringstream ds(drift);
  std::string cell;
  while (std::getline(ds, cell, ',')) CHECK(std::stod(cell) <= 1e-6);
  CHECK(call(args).out == r.out);

  const auto c = call({"evolve", "--hierarchy-n", "2", "--sine", "0.3", "--L", "6.283185307179586", "--N", "256",
                       "--T", "1e-5", "--dt", "1e-6", "--with-curve"});
  CHECK(c.code == 0);
  CHECK(!meta(c.out, "consistency").empty());
}

TEST_CASE("traveling wave and Lax pair") {
  const auto dir = scratch();
  const auto wave = dir / "wave.csv";
  const auto r = call({"travelingwave", "--lambda", "1/2", "--g2", "4", "--g3", "0", "--period-samples", "256",
                       "-o", wave.string()});
  REQUIRE(r.code == 0);
  std::ifstream in(wave);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(std::stod(meta(text, "residual")) < 1e-8);
  CHECK(std::stod(meta(text, "e1")) == doctest::Approx(1.0));
  // Rational and decimal spellings of a parameter agree.
  const auto dec = call({"travelingwave", "--lambda", "0.5", "--g2", "4", "--g3", "0", "--period-samples", "32"});
  const auto rat = call({"travelingwave", "--lambda", "1/2", "--g2", "4", "--g3", "0", "--period-samples", "32"});
  CHECK(rows(dec.out) == rows(rat.out));

  const auto lax = call({"lax", "--lambda", "1/2", "--kappa", wave.string(), "--p3", "2"});
  REQUIRE(lax.code == 0);
  const auto doc = nlohmann::json::parse(lax.out);
  CHECK(doc["lax_residual"].get<double>() < 1e-2);
  CHECK(doc["mu_spread"].get<double>() < 1e-6);
}

TEST_CASE("painleve and similarity") {
  const auto dir = scratch();
  const auto r = call({"painleve", "--c", "0.5", "--v0", "0", "--v0p", "0.1", "--xmin", "-1", "--xmax", "1"});
  REQUIRE(r.code == 0);
  CHECK(rows(r.out).size() > 10);

  const auto out = dir / "pole.csv";
  fs::remove(out.string() + ".partial");
  const auto p = call({"painleve", "--c", "0", "--v0", "2", "--v0p", "0", "--xmin", "-1", "--xmax", "4", "-o",
                       out.string()});
  CHECK(p.code == nullkdv::cli::kNumerical);
  const auto err = nlohmann::json::parse(p.err);
  CHECK(err["error"] == "PoleEncountered");
  CHECK(err["partial"] == out.string() + ".partial");
  CHECK(fs::exists(out.string() + ".partial"));

  write(dir / "bump.csv", kappa_csv([](double s) { return std::exp(-(s - 2) * (s - 2)); }, 0.01, 401));
  const auto s = call({"similarity", "--kappa", (dir / "bump.csv").string(), "--a", "1", "--b", "1", "--t", "0"});
  REQUIRE(s.code == 0);
  const auto k = rows(s.out);
  REQUIRE(k.size() == 401);
  CHECK(k[200][1] == doctest::Approx(1.0));
  CHECK(call({"similarity", "--kappa", (dir / "bump.csv").string(), "--a", "-1", "--t", "2"}).code ==
        nullkdv::cli::kDomain);
}

TEST_CASE("errors") {
  CHECK(call({}).code == nullkdv::cli::kUsage);
  CHECK(call({"bogus"}).code == nullkdv::cli::kUsage);
  CHECK(call({"motion", "--p3", "u0^"}).code == nullkdv::cli::kUsage);
  CHECK(call({"hierarchy", "--n", "99"}).code == nullkdv::cli::kDomain);
  CHECK(call({"travelingwave", "--g2", "1", "--g3", "1"}).code == nullkdv::cli::kDomain);
  const auto io = call({"reconstruct", "--kappa", "/nonexistent/k.csv"});
  CHECK(io.code == nullkdv::cli::kIo);
  const auto doc = nlohmann::json::parse(io.err);
  CHECK(doc["error"] == "IoError");
  CHECK(doc["partial"].is_null());
  CHECK(doc.contains("detail"));
}
