#include <doctest.h>

#include "adg2/g2lin.hpp"
#include "test_support.hpp"

using namespace adg2;
using testsupport::rand_vector7;

namespace {

Vec7 dt(int i) { return basis_vector(var_t(i)); }
Vec7 dx(int a) { return basis_vector(var_x(a)); }

Vec7 rand_vertical(std::mt19937_64& rng) { return vertical_part(rand_vector7(rng)); }
Vec7 rand_horizontal(std::mt19937_64& rng) { return horizontal_part(rand_vector7(rng)); }

Vec7 neg(Vec7 v) {
  for (auto& c : v) c = -c;
  return v;
}

Vec7 apply4(const QMatrix& M, const Vec7& x) {
  Vec7 out = zero7();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) out[var_x(a + 1)] += M(a, b) * x[var_x(b + 1)];
  return out;
}

const Rational kEps[] = {Rational(1), Rational(1, 2), Rational(1, 7)};

}  // namespace

TEST_CASE("standard triple satisfies the hyperkahler relations") {
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      BigradedForm p = wedge(standard_omega(i), standard_omega(j));
      CHECK(p == mu_form() * Poly(i == j ? 2 : 0));
    }
}

TEST_CASE("complex structures of the standard triple") {
  auto cs = complex_structures();
  QMatrix id = QMatrix::identity(4);
  for (int i = 0; i < 3; ++i) CHECK(cs.on_vectors[i] * cs.on_vectors[i] == -id);
  CHECK(cs.on_vectors[0] * cs.on_vectors[1] == cs.on_vectors[2]);
  CHECK(cs.on_vectors[0] * cs.on_vectors[1] * cs.on_vectors[2] == -id);
  CHECK(apply4(cs.on_vectors[0], dx(1)) == dx(2));
  // I₁(dx₁) = −dx₁∘I₁ = dx₂
  QMatrix dx1(4, 1, {1, 0, 0, 0});
  CHECK(cs.on_forms[0] * dx1 == QMatrix(4, 1, {0, 1, 0, 0}));
  // ω_i(X, Y) = g(I_i X, Y) on random vectors; (I a)(X) = −a(I X) on random covectors.
  std::mt19937_64 rng(21);
  for (int n = 0; n < 20; ++n) {
    Vec7 X = rand_vertical(rng), Y = rand_vertical(rng), a = rand_vertical(rng);
    for (int i = 0; i < 3; ++i) {
      Vec7 IX = apply4(cs.on_vectors[i], X);
      Rational gIXY(0), aIX(0), IaX(0);
      for (int k = 0; k < kNumVars; ++k) {
        gIXY += IX[k] * Y[k];
        aIX += a[k] * IX[k];
      }
      Vec7 Ia = apply4(cs.on_forms[i], a);
      for (int k = 0; k < kNumVars; ++k) IaX += Ia[k] * X[k];
      CHECK(evaluate(standard_omega(i + 1), {X, Y}) == gIXY);
      CHECK(IaX == -aIX);
    }
  }
}

TEST_CASE("phi and its dual match the closed forms") {
  for (const auto& eps : kEps) {
    G2Model m(eps);
    std::array<BigradedForm, 3> w = {standard_omega(1), standard_omega(2), standard_omega(3)};
    CHECK(m.phi() == omega_total(w) * Poly(eps) + lambda_form());
    CHECK(m.psi() == psi_formula(eps));
    CHECK(m.psi() == star7(m.phi(), eps));
  }
  CHECK(G2Model(Rational(0)).psi().is_zero());
}

TEST_CASE("phi determines g_eps through the cubic form") {
  // ι_xφ ∧ ι_yφ ∧ φ = 6 g(x, y) vol_g for the oriented metric volume vol_g = ε² vol₇.
  BigradedForm vol7 = -BigradedForm::basis({1, 2, 3}, {1, 2, 3, 4});
  std::mt19937_64 rng(22);
  for (const auto& eps : kEps) {
    G2Model m(eps);
    for (int n = 0; n < 10; ++n) {
      Vec7 x = rand_vector7(rng), y = rand_vector7(rng);
      BigradedForm b = wedge(wedge(interior(x, m.phi()), interior(y, m.phi())), m.phi());
      CHECK(b == vol7 * Poly(m.g(x, y) * 6 * eps * eps));
    }
  }
}

TEST_CASE("cross product examples and defining identity") {
  G2Model m(1);
  CHECK(m.cross(dx(1), dx(2)) == dt(1));
  CHECK(m.cross(dt(1), dt(2)) == neg(dt(3)));
  std::mt19937_64 rng(23);
  for (const auto& eps : kEps) {
    G2Model me(eps);
    for (int n = 0; n < 20; ++n) {
      Vec7 x = rand_vector7(rng), y = rand_vector7(rng), z = rand_vector7(rng);
      CHECK(me.cross(x, x) == zero7());
      CHECK(me.cross(x, y) == neg(me.cross(y, x)));
      CHECK(me.g(me.cross(x, y), z) == evaluate(me.phi(), {x, y, z}));
    }
  }
  CHECK_THROWS_AS(G2Model(Rational(0)).cross(dx(1), dx(2)), std::domain_error);
}

TEST_CASE("cross product expands as limit plus first-order term") {
  std::mt19937_64 rng(24);
  for (const auto& eps : kEps) {
    G2Model m(eps);
    for (int n = 0; n < 20; ++n) {
      Vec7 x = rand_vector7(rng), y = rand_vector7(rng);
      Vec7 expected = cross_limit(x, y), first = cross_first_order(x, y);
      for (int k = 0; k < kNumVars; ++k) expected[k] += eps * first[k];
      CHECK(m.cross(x, y) == expected);
      // the first-order term only sees vertical factors
      CHECK(first == cross_first_order(vertical_part(x), vertical_part(y)));
    }
  }
  // the limit needs at least one horizontal factor
  for (int n = 0; n < 20; ++n) CHECK(cross_limit(rand_vertical(rng), rand_vertical(rng)) == zero7());
  CHECK(cross_limit(dt(1), dx(1)) != zero7());
}

TEST_CASE("chi defining identity over random triples") {
  std::mt19937_64 rng(25);
  for (const auto& eps : kEps) {
    G2Model m(eps);
    for (int n = 0; n < 200; ++n) {
      Vec7 x = rand_vector7(rng), y = rand_vector7(rng), z = rand_vector7(rng), w = rand_vector7(rng);
      Vec7 c = m.chi(x, y, z);
      CHECK(m.g(c, w) == evaluate(m.psi(), {x, y, z, w}));
      if (n < 20) {
        CHECK(m.chi(y, x, z) == neg(c));
        CHECK(m.chi(x, z, y) == neg(c));
      }
    }
  }
}

TEST_CASE("chi scaling case table") {
  std::mt19937_64 rng(26);
  G2Model one(1);
  for (const auto& eps : kEps) {
    G2Model m(eps);
    for (int n = 0; n < 20; ++n) {
      Vec7 v1 = rand_vertical(rng), v2 = rand_vertical(rng), v3 = rand_vertical(rng);
      Vec7 h1 = rand_horizontal(rng), h2 = rand_horizontal(rng), h3 = rand_horizontal(rng);
      Vec7 scaled = one.chi(v1, v2, v3);
      for (auto& c : scaled) c *= eps;
      CHECK(m.chi(v1, v2, v3) == scaled);
      scaled = one.chi(v1, v2, h1);
      for (auto& c : scaled) c *= eps;
      CHECK(m.chi(v1, v2, h1) == scaled);
      CHECK(m.chi(v1, h1, h2) == one.chi(v1, h1, h2));
      CHECK(m.chi(h1, h2, h3) == zero7());
      Vec7 x = rand_vector7(rng), y = rand_vector7(rng), z = rand_vector7(rng);
      CHECK(chi_case_table(x, y, z, eps) == m.chi(x, y, z));
    }
  }
}

TEST_CASE("chi formal limit") {
  G2Model m0(0);
  auto cs = complex_structures();
  std::mt19937_64 rng(27);
  for (int n = 0; n < 20; ++n) {
    Vec7 x = rand_vertical(rng);
    CHECK(m0.chi(x, dt(2), dt(3)) == neg(apply4(cs.on_vectors[0], x)));
    CHECK(m0.chi(x, dt(3), dt(1)) == neg(apply4(cs.on_vectors[1], x)));
    CHECK(m0.chi(x, dt(1), dt(2)) == neg(apply4(cs.on_vectors[2], x)));
    CHECK(m0.chi(x, rand_vertical(rng), rand_horizontal(rng)) == zero7());
  }
  CHECK(m0.chi(dt(1), dt(2), dt(3)) == zero7());
}
