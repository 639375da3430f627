#pragma once

// Exact polynomial differential functions in one dependent variable u.
//
// A DiffPoly is a finite sum of rational multiples of monomials
// prod_j u_(j)^{e_j}, where u_(j) is the j-th jet coordinate (the j-th
// s-derivative of u). The independent variable s never appears: every
// formula handled here is autonomous in s.

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

namespace nullkdv {

using Rational = mpq_class;

/// prod_j u_(j)^{e_j}; exponents are indexed by jet order with trailing
/// zeros trimmed, so the empty exponent vector is the constant monomial 1.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);

  /// u_(order)^power
  static Monomial jet(int order, int power = 1);

  const std::vector<int>& exponents() const noexcept { return exps_; }
  int exponent(int order) const noexcept;
  int degree() const noexcept;
  /// Highest jet order present, -1 for the constant monomial.
  int order() const noexcept { return static_cast<int>(exps_.size()) - 1; }
  bool is_constant() const noexcept { return exps_.empty(); }

  Monomial operator*(const Monomial& other) const;
  /// Exponent of u_(order) shifted by delta (may remove the factor).
  Monomial shifted(int order, int delta) const;

  bool operator==(const Monomial&) const = default;
  /// Graded lexicographic: total degree, then highest jet order, then the
  /// exponent vector.
  std::strong_ordering operator<=>(const Monomial& other) const;

 private:
  void trim();
  std::vector<int> exps_;
};

class DiffPoly {
 public:
  using TermMap = std::map<Monomial, Rational>;

  DiffPoly() = default;
  DiffPoly(const Rational& constant);  // NOLINT(implicit)
  DiffPoly(long constant);             // NOLINT(implicit)
  DiffPoly(const Monomial& m, const Rational& coeff = 1);

  /// u_(order)
  static DiffPoly u(int order, int power = 1);

  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  int degree() const noexcept;
  /// Highest jet order present, -1 for constants and zero.
  int order() const noexcept;
  Rational coefficient(const Monomial& m) const;
  Rational constant_term() const { return coefficient(Monomial{}); }

  void add_term(const Monomial& m, const Rational& coeff);

  DiffPoly operator-() const;
  DiffPoly& operator+=(const DiffPoly& other);
  DiffPoly& operator-=(const DiffPoly& other);
  DiffPoly& operator*=(const Rational& r);

  friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
  friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
  friend DiffPoly operator*(DiffPoly a, const Rational& r) { return a *= r; }
  friend DiffPoly operator*(const Rational& r, DiffPoly a) { return a *= r; }
  friend DiffPoly operator*(DiffPoly a, long r) { return a *= Rational(r); }
  friend DiffPoly operator*(long r, DiffPoly a) { return a *= Rational(r); }

  bool operator==(const DiffPoly&) const = default;

 private:
  TermMap terms_;
};

DiffPoly add(const DiffPoly& a, const DiffPoly& b);
DiffPoly mul(const DiffPoly& a, const DiffPoly& b);
DiffPoly scale(const DiffPoly& a, const Rational& r);

/// Partial derivative with respect to the jet coordinate u_(order).
DiffPoly partial(const DiffPoly& w, int order);

/// Total derivative D w = sum_p dw/du_(p) * u_(p+1).
DiffPoly total_derivative(const DiffPoly& w);
DiffPoly total_derivative(const DiffPoly& w, int times);

/// Euler operator E(w) = sum_l (-1)^l D^l(dw/du_(l)).
DiffPoly euler_operator(const DiffPoly& w);

bool is_total_derivative(const DiffPoly& w);

/// The primitive of w vanishing at u = 0, i.e. p with D p = w and no
/// constant term. Throws NotExact when E(w) != 0, and also for a nonzero
/// constant w (whose primitive needs an explicit s).
DiffPoly primitive(const DiffPoly& w);

/// D^3 w + 4 u_(0) D w + 2 u_(1) w.
DiffPoly apply_script_D(const DiffPoly& w);

/// Homotopy reconstruction p = int_0^1 g[eps u] u_(0) d eps, followed by a
/// check that E(p) == g. Throws NotGradient when g is not a variational
/// gradient.
DiffPoly potential_from_gradient(const DiffPoly& g);

/// True iff a - b is a total derivative.
bool equal_mod_D(const DiffPoly& a, const DiffPoly& b);

/// Numeric value at the jet (u_(0), u_(1), ...). Throws JetTooShort when a
/// jet order used by w is missing.
double evaluate(const DiffPoly& w, std::span<const double> jet);

/// Text form, e.g. "10*u0^3 + 10*u0*u2 + 5*u1^2 + u4". Terms are printed in
/// decreasing monomial order.
std::string to_string(const DiffPoly& w);
/// Parses the text form. Coefficients may be integers, p/q or decimals.
DiffPoly parse_diffpoly(std::string_view text);

/// [{"coeff": "p/q", "exponents": {"j": e}}, ...]
nlohmann::json to_json(const DiffPoly& w);
DiffPoly diffpoly_from_json(const nlohmann::json& j);

/// Exact rational from "p/q", an integer or a decimal literal.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

}  // namespace nullkdv

namespace nullkdv {

/// A DiffPoly with coefficients converted to double once, for repeated
/// pointwise evaluation on grids.
class NumericPoly {
 public:
  NumericPoly() = default;
  explicit NumericPoly(const DiffPoly& w);

  /// Highest jet order needed, -1 for constants.
  int order() const noexcept { return order_; }
  double operator()(std::span<const double> jet) const;

 private:
  struct Term {
    double coeff;
    std::vector<std::pair<int, int>> factors;  // (jet order, exponent)
  };
  std::vector<Term> terms_;
  int order_ = -1;
};

}  // namespace nullkdv
