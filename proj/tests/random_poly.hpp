#pragma once

// Seeded random differential polynomials for property tests.

#include <random>

#include "nullkdv/diffpoly.hpp"

namespace nullkdv::testing {

class PolyGenerator {
 public:
  explicit PolyGenerator(std::uint64_t seed) : rng_(seed) {}

  /// Up to max_terms monomials of total degree 1..max_degree and jet order
  /// <= max_order, coefficients p/q with |p| <= 9, 1 <= q <= 4.
  DiffPoly poly(int max_degree = 4, int max_order = 4, int max_terms = 5) {
    DiffPoly w;
    const int terms = pick(1, max_terms);
    for (int t = 0; t < terms; ++t) {
      const int degree = pick(1, max_degree);
      std::vector<int> exps(static_cast<std::size_t>(max_order) + 1, 0);
      for (int d = 0; d < degree; ++d) ++exps[static_cast<std::size_t>(pick(0, max_order))];
      int num = pick(-9, 9);
      if (num == 0) num = 1;
      w.add_term(Monomial(exps), Rational(num, pick(1, 4)));
    }
    return w;
  }

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace nullkdv::testing
