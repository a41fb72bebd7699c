#pragma once

#include <random>

#include "adg2/excalc.hpp"

namespace testsupport {

using adg2::BigradedForm;
using adg2::Mask;
using adg2::Poly;
using adg2::Rational;

inline Rational rand_rational(std::mt19937_64& rng, int range = 5, int max_den = 4) {
  std::uniform_int_distribution<int> num(-range, range);
  std::uniform_int_distribution<int> den(1, max_den);
  Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

inline Rational rand_nonzero_rational(std::mt19937_64& rng, int range = 5, int max_den = 4) {
  Rational r;
  do r = rand_rational(rng, range, max_den);
  while (r == 0);
  return r;
}

inline Poly rand_poly(std::mt19937_64& rng, int max_degree = 2, int max_terms = 3, unsigned var_mask = 0x7f) {
  std::uniform_int_distribution<int> nterms(0, max_terms);
  std::uniform_int_distribution<int> var(0, adg2::kNumVars - 1);
  std::uniform_int_distribution<int> deg(0, max_degree);
  Poly p;
  int n = nterms(rng);
  for (int k = 0; k < n; ++k) {
    adg2::Exponent e{};
    int d = deg(rng);
    for (int j = 0; j < d; ++j) {
      int v = var(rng);
      if (var_mask & (1u << v)) e[v] += 1;
    }
    p += Poly::monomial(e, rand_rational(rng));
  }
  return p;
}

inline BigradedForm rand_form(std::mt19937_64& rng, int degree, int max_degree = 2, int max_terms = 3,
                              Mask allowed = 0x7f) {
  BigradedForm f(degree);
  for (unsigned m = 0; m < 128; ++m) {
    Mask mm = Mask(m);
    if (adg2::popcount(mm) != degree || (mm & ~allowed)) continue;
    if (rng() % 2) f.add_term(mm, rand_poly(rng, max_degree, max_terms));
  }
  return f;
}

inline std::array<Rational, adg2::kNumVars> rand_vector7(std::mt19937_64& rng) {
  std::array<Rational, adg2::kNumVars> v;
  for (auto& x : v) x = rand_rational(rng);
  return v;
}

inline std::array<Rational, adg2::kNumVars> unit7(int v) {
  std::array<Rational, adg2::kNumVars> e{};
  for (auto& x : e) x = 0;
  e[v] = 1;
  return e;
}

}  // namespace testsupport
