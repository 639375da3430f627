#include "nullkdv/diffpoly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nullkdv/error.hpp"

namespace nullkdv {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::vector<int> exponents) : exps_(std::move(exponents)) {
  for (int e : exps_) {
    if (e < 0) throw Error(ErrorKind::InvalidArgument, "negative exponent in monomial");
  }
  trim();
}

Monomial Monomial::jet(int order, int power) {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "negative jet order");
  std::vector<int> e(static_cast<std::size_t>(order) + 1, 0);
  e[static_cast<std::size_t>(order)] = power;
  return Monomial(std::move(e));
}

void Monomial::trim() {
  while (!exps_.empty() && exps_.back() == 0) exps_.pop_back();
}

int Monomial::exponent(int order) const noexcept {
  if (order < 0 || order >= static_cast<int>(exps_.size())) return 0;
  return exps_[static_cast<std::size_t>(order)];
}

int Monomial::degree() const noexcept {
  return std::accumulate(exps_.begin(), exps_.end(), 0);
}

Monomial Monomial::operator*(const Monomial& other) const {
  std::vector<int> e(std::max(exps_.size(), other.exps_.size()), 0);
  for (std::size_t i = 0; i < exps_.size(); ++i) e[i] += exps_[i];
  for (std::size_t i = 0; i < other.exps_.size(); ++i) e[i] += other.exps_[i];
  return Monomial(std::move(e));
}

Monomial Monomial::shifted(int order, int delta) const {
  std::vector<int> e = exps_;
  if (e.size() <= static_cast<std::size_t>(order)) e.resize(static_cast<std::size_t>(order) + 1, 0);
  e[static_cast<std::size_t>(order)] += delta;
  return Monomial(std::move(e));
}

std::strong_ordering Monomial::operator<=>(const Monomial& other) const {
  if (auto c = degree() <=> other.degree(); c != 0) return c;
  if (auto c = order() <=> other.order(); c != 0) return c;
  // Same size here; compare from the highest order down so that
  // u0*u2 > u1^2 > u0^2 style ordering is stable and readable.
  for (std::size_t i = exps_.size(); i-- > 0;) {
    if (auto c = exps_[i] <=> other.exps_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------- DiffPoly

DiffPoly::DiffPoly(const Rational& constant) { add_term(Monomial{}, constant); }

DiffPoly::DiffPoly(long constant) : DiffPoly(Rational(constant)) {}

DiffPoly::DiffPoly(const Monomial& m, const Rational& coeff) { add_term(m, coeff); }

DiffPoly DiffPoly::u(int order, int power) { return DiffPoly(Monomial::jet(order, power)); }

int DiffPoly::degree() const noexcept {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

int DiffPoly::order() const noexcept {
  int o = -1;
  for (const auto& [m, c] : terms_) o = std::max(o, m.order());
  return o;
}

Rational DiffPoly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void DiffPoly::add_term(const Monomial& m, const Rational& coeff) {
  if (coeff == 0) return;
  // Callers may build p/q without reducing it; equality needs lowest terms.
  Rational c = coeff;
  c.canonicalize();
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

DiffPoly DiffPoly::operator-() const {
  DiffPoly r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

DiffPoly& DiffPoly::operator*=(const Rational& r) {
  if (r == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) {
    c *= r;
    c.canonicalize();
  }
  return *this;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
  DiffPoly r;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
  }
  return r;
}

DiffPoly add(const DiffPoly& a, const DiffPoly& b) { return a + b; }
DiffPoly mul(const DiffPoly& a, const DiffPoly& b) { return a * b; }
DiffPoly scale(const DiffPoly& a, const Rational& r) { return a * r; }

// ---------------------------------------------------------------- calculus

DiffPoly partial(const DiffPoly& w, int order) {
  DiffPoly r;
  for (const auto& [m, c] : w.terms()) {
    const int e = m.exponent(order);
    if (e == 0) continue;
    r.add_term(m.shifted(order, -1), c * e);
  }
  return r;
}

DiffPoly total_derivative(const DiffPoly& w) {
  DiffPoly r;
  for (const auto& [m, c] : w.terms()) {
    for (int p = 0; p <= m.order(); ++p) {
      const int e = m.exponent(p);
      if (e == 0) continue;
      r.add_term(m.shifted(p, -1).shifted(p + 1, 1), c * e);
    }
  }
  return r;
}

DiffPoly total_derivative(const DiffPoly& w, int times) {
  DiffPoly r = w;
  for (int i = 0; i < times; ++i) r = total_derivative(r);
  return r;
}

DiffPoly euler_operator(const DiffPoly& w) {
  DiffPoly r;
  const int top = w.order();
  for (int l = 0; l <= top; ++l) {
    DiffPoly term = total_derivative(partial(w, l), l);
    if (l % 2 == 0) {
      r += term;
    } else {
      r -= term;
    }
  }
  return r;
}

bool is_total_derivative(const DiffPoly& w) { return euler_operator(w).is_zero(); }

namespace {

// Antiderivative of a in the variable u_(order): each monomial's exponent
// e of u_(order) becomes e + 1 with coefficient divided by e + 1.
DiffPoly integrate_in(const DiffPoly& a, int order) {
  DiffPoly r;
  for (const auto& [m, c] : a.terms()) {
    const int e = m.exponent(order);
    r.add_term(m.shifted(order, 1), c / (e + 1));
  }
  return r;
}

}  // namespace

DiffPoly primitive(const DiffPoly& w) {
  if (!is_total_derivative(w)) {
    throw Error(ErrorKind::NotExact, "E(w) != 0 for w = " + to_string(w));
  }
  if (w.constant_term() != 0) {
    throw Error(ErrorKind::NotExact,
                "nonzero constant term has no s-autonomous primitive: " + to_string(w));
  }
  // Peel off the highest jet variable: w = A*u_(m) + B with A, B of order < m.
  // P = int A du_(m-1) satisfies D P = A*u_(m) + (order < m), so w - D P
  // drops in order. E(w) = 0 keeps w linear in its top variable throughout.
  DiffPoly rest = w;
  DiffPoly result;
  while (!rest.is_zero()) {
    const int m = rest.order();
    if (m <= 0) {
      throw Error(ErrorKind::NotExact, "order-0 remainder " + to_string(rest));
    }
    DiffPoly a = partial(rest, m);
    if (a.order() >= m) {
      throw Error(ErrorKind::NotExact, "remainder nonlinear in top jet variable: " + to_string(rest));
    }
    DiffPoly p = integrate_in(a, m - 1);
    result += p;
    rest -= total_derivative(p);
  }
  return result;
}

DiffPoly apply_script_D(const DiffPoly& w) {
  const DiffPoly dw = total_derivative(w);
  return total_derivative(dw, 2) + Rational(4) * (DiffPoly::u(0) * dw) +
         Rational(2) * (DiffPoly::u(1) * w);
}

DiffPoly potential_from_gradient(const DiffPoly& g) {
  // g[eps u] scales a degree-d monomial by eps^d; times u_(0) and integrated
  // over eps in [0, 1] gives the factor 1/(d + 1).
  DiffPoly p;
  const Monomial u0 = Monomial::jet(0);
  for (const auto& [m, c] : g.terms()) p.add_term(m * u0, c / (m.degree() + 1));
  if (euler_operator(p) != g) {
    throw Error(ErrorKind::NotGradient, "homotopy reconstruction does not reproduce " + to_string(g));
  }
  return p;
}

bool equal_mod_D(const DiffPoly& a, const DiffPoly& b) { return is_total_derivative(a - b); }

// ---------------------------------------------------------------- evaluation

NumericPoly::NumericPoly(const DiffPoly& w) {
  terms_.reserve(w.terms().size());
  for (const auto& [m, c] : w.terms()) {
    Term t{c.get_d(), {}};
    for (int j = 0; j <= m.order(); ++j) {
      if (m.exponent(j) > 0) t.factors.emplace_back(j, m.exponent(j));
    }
    terms_.push_back(std::move(t));
    order_ = std::max(order_, m.order());
  }
}

double NumericPoly::operator()(std::span<const double> jet) const {
  if (order_ >= static_cast<int>(jet.size())) {
    throw Error(ErrorKind::JetTooShort, "need jet order " + std::to_string(order_) + ", got " +
                                            std::to_string(jet.size()) + " values");
  }
  double sum = 0.0;
  for (const Term& t : terms_) {
    double v = t.coeff;
    for (const auto& [j, e] : t.factors) {
      const double x = jet[static_cast<std::size_t>(j)];
      double xp = x;
      for (int k = 1; k < e; ++k) xp *= x;
      v *= xp;
    }
    sum += v;
  }
  return sum;
}

double evaluate(const DiffPoly& w, std::span<const double> jet) { return NumericPoly(w)(jet); }

// ---------------------------------------------------------------- text I/O

std::string to_string(const Rational& r) { return r.get_str(); }

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); }),
          s.end());
  if (s.empty()) throw Error(ErrorKind::ParseError, "empty number");
  const auto bad = [&] { return Error(ErrorKind::ParseError, "not a rational number: '" + s + "'"); };
  Rational r;
  if (auto dot = s.find('.'); dot != std::string::npos || s.find_first_of("eE") != std::string::npos) {
    // Exact decimal: digits with an optional fraction and exponent.
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    std::string digits;
    int scale10 = 0;
    bool seen_dot = false;
    for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
      if (s[i] == '.') {
        if (seen_dot) throw bad();
        seen_dot = true;
      } else if (std::isdigit(static_cast<unsigned char>(s[i]))) {
        digits += s[i];
        if (seen_dot) --scale10;
      } else {
        throw bad();
      }
    }
    if (digits.empty()) throw bad();
    if (i < s.size()) {
      try {
        std::size_t used = 0;
        scale10 += std::stoi(s.substr(i + 1), &used);
        if (used != s.size() - i - 1) throw bad();
      } catch (const std::logic_error&) {
        throw bad();
      }
    }
    mpz_class num(digits, 10);
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(scale10)));
    r = scale10 >= 0 ? Rational(num * pow10) : Rational(num, pow10);
    r.canonicalize();
    return neg ? Rational(-r) : r;
  }
  if (r.set_str(s, 10) != 0) throw bad();
  if (r.get_den() == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + s + "'");
  r.canonicalize();
  return r;
}

namespace {

std::string monomial_text(const Monomial& m) {
  std::string out;
  for (int j = 0; j <= m.order(); ++j) {
    const int e = m.exponent(j);
    if (e == 0) continue;
    if (!out.empty()) out += '*';
    out += 'u' + std::to_string(j);
    if (e > 1) out += '^' + std::to_string(e);
  }
  return out;
}

}  // namespace

std::string to_string(const DiffPoly& w) {
  if (w.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = w.terms().rbegin(); it != w.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    const bool negative = c < 0;
    const Rational mag = abs(c);
    if (first) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    if (m.is_constant()) {
      out += mag.get_str();
    } else if (mag == 1) {
      out += monomial_text(m);
    } else {
      out += mag.get_str() + '*' + monomial_text(m);
    }
  }
  return out;
}

namespace {

class PolyParser {
 public:
  explicit PolyParser(std::string_view text) : text_(text) {}

  DiffPoly parse() {
    DiffPoly result;
    skip_ws();
    if (at_end()) throw fail("empty polynomial");
    bool first = true;
    while (!at_end()) {
      Rational sign = 1;
      if (peek() == '+' || peek() == '-') {
        if (peek() == '-') sign = -1;
        ++pos_;
        skip_ws();
      } else if (!first) {
        throw fail("expected '+' or '-'");
      }
      first = false;
      auto [m, c] = parse_term();
      result.add_term(m, sign * c);
      skip_ws();
    }
    return result;
  }

 private:
  std::pair<Monomial, Rational> parse_term() {
    Rational coeff = 1;
    Monomial mono;
    bool any = false;
    if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
      coeff = parse_number();
      any = true;
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        mono = parse_factor();
      } else {
        return {mono, coeff};
      }
    } else {
      mono = parse_factor();
      any = true;
    }
    skip_ws();
    while (peek() == '*') {
      ++pos_;
      skip_ws();
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        coeff *= parse_number();
      } else {
        mono = mono * parse_factor();
      }
      skip_ws();
    }
    if (!any) throw fail("empty term");
    return {mono, coeff};
  }

  Monomial parse_factor() {
    if (peek() != 'u') throw fail("expected factor 'u<order>'");
    ++pos_;
    const int order = parse_int();
    int power = 1;
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      power = parse_int();
      if (power < 1) throw fail("exponent must be positive");
    }
    return Monomial::jet(order, power);
  }

  Rational parse_number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++pos_;
    std::size_t save = pos_;
    skip_ws();
    if (peek() == '/') {
      ++pos_;
      skip_ws();
      const std::size_t dstart = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      if (dstart == pos_) throw fail("missing denominator");
      return parse_rational(std::string(text_.substr(start, save - start)) + "/" +
                            std::string(text_.substr(dstart, pos_ - dstart)));
    }
    pos_ = save;
    return parse_rational(text_.substr(start, save - start));
  }

  int parse_int() {
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) throw fail("expected integer");
    return std::stoi(std::string(text_.substr(start, pos_ - start)));
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  Error fail(const std::string& what) const {
    return Error(ErrorKind::ParseError,
                 what + " at position " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

DiffPoly parse_diffpoly(std::string_view text) { return PolyParser(text).parse(); }

nlohmann::json to_json(const DiffPoly& w) {
  nlohmann::json arr = nlohmann::json::array();
  for (auto it = w.terms().rbegin(); it != w.terms().rend(); ++it) {
    nlohmann::json exps = nlohmann::json::object();
    for (int j = 0; j <= it->first.order(); ++j) {
      if (it->first.exponent(j) > 0) exps[std::to_string(j)] = it->first.exponent(j);
    }
    arr.push_back({{"coeff", it->second.get_str()}, {"exponents", exps}});
  }
  return arr;
}

DiffPoly diffpoly_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorKind::ParseError, "polynomial JSON must be an array");
  DiffPoly w;
  for (const auto& term : j) {
    try {
      const Rational c = parse_rational(term.at("coeff").get<std::string>());
      std::vector<int> exps;
      for (const auto& [key, value] : term.at("exponents").items()) {
        const int order = std::stoi(key);
        if (order < 0) throw Error(ErrorKind::ParseError, "negative jet order in JSON");
        if (exps.size() <= static_cast<std::size_t>(order)) exps.resize(static_cast<std::size_t>(order) + 1, 0);
        exps[static_cast<std::size_t>(order)] += value.get<int>();
      }
      w.add_term(Monomial(std::move(exps)), c);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ParseError, std::string("malformed term: ") + e.what());
    }
  }
  return w;
}

}  // namespace nullkdv
