#include <doctest.h>

#include "adg2/clifford.hpp"
#include "adg2/excalc.hpp"
#include "adg2/g2lin.hpp"
#include "adg2/hk.hpp"
#include "test_support.hpp"

using namespace adg2;
using testsupport::rand_rational;

namespace {

TwoForm rand_asd(std::mt19937_64& rng) {
  auto basis = asd_basis();
  TwoForm w(4, 4);
  for (int k = 0; k < 3; ++k) w += basis[k] * rand_rational(rng);
  return w;
}

TwoForm rand_two_form(std::mt19937_64& rng) {
  TwoForm w(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      w(a, b) = rand_rational(rng);
      w(b, a) = -w(a, b);
    }
  return w;
}

TripleVariation rand_asd_variation(std::mt19937_64& rng) { return {rand_asd(rng), rand_asd(rng), rand_asd(rng)}; }

QMatrix rand_antisym(std::mt19937_64& rng, int n) {
  QMatrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      A(i, j) = rand_rational(rng, 3, 3);
      A(j, i) = -A(i, j);
    }
  return A;
}

// Cayley transform: rational special orthogonal matrix.
QMatrix rand_rotation(std::mt19937_64& rng, int n) {
  QMatrix A = rand_antisym(rng, n), id = QMatrix::identity(n);
  return (id - A) * inverse(id + A);
}

QMatrix rotate_form(const QMatrix& R, const QMatrix& W) { return R.transpose() * W * R; }

BigradedForm to_form(const TwoForm& W) { return two_form_from_matrix(W); }

// Euclidean inner product on triples of 2-forms.
Rational inner(const TripleVariation& a, const TripleVariation& b) {
  Rational s(0);
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) s += a[i](p, q) * b[i](p, q);
  return s;
}

QMatrix example_gdot() {
  QMatrix g(4, 4);
  g(0, 2) = g(2, 0) = -1;
  g(1, 3) = g(3, 1) = 1;
  return g;
}

}  // namespace

TEST_CASE("wedge22 agrees with the general wedge product") {
  std::mt19937_64 rng(31);
  for (int n = 0; n < 30; ++n) {
    TwoForm a = rand_two_form(rng), b = rand_two_form(rng);
    CHECK(wedge(to_form(a), to_form(b)) == mu_form() * Poly(wedge22(a, b)));
  }
}

TEST_CASE("metric from the standard triple") {
  HKMetric m = metric_from_triple(HKTriple::standard());
  CHECK(m.g == QMatrix::identity(4));
  CHECK(m.mu == 1);
  for (const auto& g : cyclic_metric_versions(HKTriple::standard())) CHECK(g == QMatrix::identity(4));
  // oracle: ι_Yω₁∧ι_Zω₂∧ω₃ through the general exterior calculus
  for (int y = 1; y <= 4; ++y)
    for (int z = 1; z <= 4; ++z) {
      BigradedForm p = wedge(wedge(interior(basis_vector(var_x(y)), standard_omega(1)),
                                   interior(basis_vector(var_x(z)), standard_omega(2))),
                             standard_omega(3));
      CHECK(p == mu_form() * Poly(y == z ? 1 : 0));
    }
}

TEST_CASE("metric scaling and hyperkahler rotation") {
  std::mt19937_64 rng(32);
  for (int n = 0; n < 10; ++n) {
    Rational c = testsupport::rand_nonzero_rational(rng);
    HKTriple T = HKTriple::standard();
    for (auto& w : T.W) w *= c;
    HKMetric m = metric_from_triple(T);
    CHECK(m.g == QMatrix::identity(4) * c);
    CHECK(m.mu == c * c);
    QMatrix O = rand_rotation(rng, 3);
    HKTriple R;
    for (int i = 0; i < 3; ++i) {
      R.W[i] = QMatrix(4, 4);
      for (int j = 0; j < 3; ++j) R.W[i] += HKTriple::standard().W[j] * O(i, j);
    }
    CHECK(metric_from_triple(R).g == QMatrix::identity(4));
  }
}

TEST_CASE("metric from a general frame-rotated triple") {
  std::mt19937_64 rng(33);
  for (int n = 0; n < 10; ++n) {
    QMatrix P = rand_rotation(rng, 4) + QMatrix::identity(4) * Rational(1, 3);  // generic invertible
    HKTriple T;
    for (int i = 0; i < 3; ++i) T.W[i] = rotate_form(P, HKTriple::standard().W[i]);
    Rational det = wedge22(T.W[0], T.W[0]) / 2;
    if (det == 0) continue;
    HKMetric m = metric_from_triple(T);
    for (const auto& g : cyclic_metric_versions(T)) CHECK(g == m.g);
    CHECK(m.g == m.g.transpose());
    auto I = complex_structures(T);
    CHECK(I[0] * I[1] == I[2]);
    for (int i = 0; i < 3; ++i) CHECK(I[i] * I[i] == -QMatrix::identity(4));
  }
}

TEST_CASE("relation failure reports the failing pair") {
  HKTriple T = HKTriple::standard();
  T.W[1] = T.W[1] + asd_basis()[0];
  try {
    metric_from_triple(T);
    FAIL("expected failure");
  } catch (const HKRelationError& e) {
    CHECK(e.i() == 2);
    CHECK(e.j() == 2);
  }
  T = HKTriple::standard();
  T.W[2] = HKTriple::standard().W[0];
  try {
    metric_from_triple(T);
    FAIL("expected failure");
  } catch (const HKRelationError& e) {
    CHECK(e.i() == 1);
    CHECK(e.j() == 3);
  }
}

TEST_CASE("decompose_variation examples") {
  HKTriple T = HKTriple::standard();
  TripleVariation V = {T.W[1], QMatrix(4, 4), QMatrix(4, 4)};
  auto d = decompose_variation(T, V);
  CHECK(d.coeff(0, 1) == 1);
  CHECK(d.b == 0);
  for (const auto& r : d.asd) CHECK(r.is_zero());

  V = {QMatrix(4, 4), QMatrix(4, 4), asd_basis()[0]};
  d = decompose_variation(T, V);
  CHECK(d.a.is_zero());
  CHECK(d.b == 0);
  CHECK(d.asd[2] == asd_basis()[0]);

  Rational c(3, 5);
  V = {T.W[0] * c, T.W[1] * c, T.W[2] * c};
  d = decompose_variation(T, V);
  CHECK(d.b == c);
  CHECK(d.a.is_zero());
  CHECK(metric_variation(T, V).mudot == 2 * d.b * metric_from_triple(T).mu);
}

TEST_CASE("decomposition is an orthogonal idempotent projection") {
  std::mt19937_64 rng(34);
  HKTriple T = HKTriple::standard();
  for (int n = 0; n < 30; ++n) {
    TripleVariation V = {rand_two_form(rng), rand_two_form(rng), rand_two_form(rng)};
    auto d = decompose_variation(T, V);
    CHECK(d.a == -d.a.transpose());
    TripleVariation rot, conf, sym;
    for (int i = 0; i < 3; ++i) {
      rot[i] = conf[i] = sym[i] = QMatrix(4, 4);
      for (int j = 0; j < 3; ++j) {
        rot[i] += T.W[j] * d.a(i, j);
        sym[i] += T.W[j] * d.sym_traceless(i, j);
      }
      conf[i] = T.W[i] * d.b;
      CHECK(rot[i] + sym[i] + conf[i] + d.asd[i] == V[i]);
      // ASD remainder has no self-dual component
      for (int j = 0; j < 3; ++j) CHECK(wedge22(d.asd[i], T.W[j]) == 0);
    }
    CHECK(inner(rot, conf) == 0);
    CHECK(inner(rot, d.asd) == 0);
    CHECK(inner(conf, d.asd) == 0);
    auto d2 = decompose_variation(T, d.asd);
    CHECK(d2.coeff.is_zero());
    CHECK(d2.asd == d.asd);
    auto d3 = decompose_variation(T, rot);
    CHECK(d3.a == d.a);
    CHECK(d3.b == 0);
  }
}

TEST_CASE("metric variation of the worked example") {
  HKTriple T = HKTriple::standard();
  TripleVariation V = {QMatrix(4, 4), QMatrix(4, 4), asd_basis()[0]};
  auto mv = metric_variation(T, V);
  CHECK(mv.gdot == example_gdot());
  CHECK(mv.mudot == 0);
  CHECK(metric_variation(T, {QMatrix(4, 4), QMatrix(4, 4), QMatrix(4, 4)}).gdot.is_zero());
  std::mt19937_64 rng(35);
  for (int n = 0; n < 10; ++n) {
    QMatrix A = rand_antisym(rng, 3);
    TripleVariation R;
    for (int i = 0; i < 3; ++i) {
      R[i] = QMatrix(4, 4);
      for (int j = 0; j < 3; ++j) R[i] += T.W[j] * A(i, j);
    }
    CHECK(metric_variation(T, R).gdot.is_zero());
  }
}

TEST_CASE("recover_form_variation inverts metric_variation on ASD data") {
  HKTriple T = HKTriple::standard();
  auto rec = recover_form_variation(T, example_gdot());
  CHECK(rec[0].is_zero());
  CHECK(rec[1].is_zero());
  CHECK(rec[2] == asd_basis()[0]);
  for (const auto& w : recover_form_variation(T, QMatrix(4, 4))) CHECK(w.is_zero());
  std::mt19937_64 rng(36);
  for (int n = 0; n < 100; ++n) {
    TripleVariation V = rand_asd_variation(rng);
    auto mv = metric_variation(T, V);
    CHECK(mv.gdot == mv.gdot.transpose());
    CHECK(trace(mv.gdot) == 0);
    CHECK(recover_form_variation(T, mv.gdot) == V);
  }
}

TEST_CASE("variation formulas are frame independent") {
  std::mt19937_64 rng(37);
  for (int n = 0; n < 15; ++n) {
    QMatrix R = rand_rotation(rng, 4);
    HKTriple T;
    for (int i = 0; i < 3; ++i) T.W[i] = rotate_form(R, HKTriple::standard().W[i]);
    CHECK(metric_from_triple(T).g == QMatrix::identity(4));
    TripleVariation V = rand_asd_variation(rng), VR;
    for (int i = 0; i < 3; ++i) VR[i] = rotate_form(R, V[i]);
    QMatrix g0 = metric_variation(HKTriple::standard(), V).gdot;
    QMatrix gR = metric_variation(T, VR).gdot;
    CHECK(gR == rotate_form(R, g0));
    CHECK(recover_form_variation(T, gR) == VR);
    CHECK(cyclic_residual(T, VR, gR, cyclic_conventions()) == 0);
  }
}

TEST_CASE("Clifford action of the worked example") {
  HKTriple T = HKTriple::standard();
  QMatrix g = example_gdot();
  GMatrix c1c2 = gamma_x(0) * gamma_x(1);
  GMatrix direct = clifford_two_form(asd_basis()[0]);
  GMatrix formula = clifford_of_variation(T, g, 3);
  GMatrix Pm = proj_minus_x(), Pp = proj_plus_x();
  CHECK(formula == direct);
  CHECK(direct * Pm == c1c2 * GaussQ(2) * Pm);
  CHECK((direct * Pp).is_zero());
  CHECK(clifford_of_variation(T, g, 1).is_zero());
  CHECK(clifford_of_variation(T, g, 2).is_zero());
  CHECK(clifford_of_variation(T, QMatrix(4, 4), 3).is_zero());
}

TEST_CASE("Clifford formula matches c of the variation for random ASD data") {
  HKTriple T = HKTriple::standard();
  std::mt19937_64 rng(38);
  for (int n = 0; n < 30; ++n) {
    TripleVariation V = rand_asd_variation(rng);
    QMatrix g = metric_variation(T, V).gdot;
    for (int k = 1; k <= 3; ++k) {
      GMatrix direct = clifford_two_form(V[k - 1]);
      CHECK(clifford_of_variation(T, g, k) == direct);
      CHECK((direct * proj_plus_x()).is_zero());
    }
  }
}

TEST_CASE("cyclic symmetry identities") {
  HKTriple T = HKTriple::standard();
  CHECK(cyclic_residual(T, {QMatrix(4, 4), QMatrix(4, 4), asd_basis()[0]}, example_gdot(), cyclic_conventions()) == 0);
  std::mt19937_64 rng(39);
  int corrupted_detected = 0;
  for (int n = 0; n < 100; ++n) {
    TripleVariation V = rand_asd_variation(rng);
    QMatrix g = metric_variation(T, V).gdot;
    CHECK(cyclic_residual(T, V, g, cyclic_conventions()) == 0);
    if (cyclic_residual(T, V, g, corrupted_cyclic_conventions()) != 0) ++corrupted_detected;
  }
  CHECK(corrupted_detected >= 95);
}

TEST_CASE("identities hold with independent tensors in derivative slots") {
  // Each derivative slot ∇_w 𝓛_v ω_i is an independent ASD tensor; the same linear maps apply slotwise.
  HKTriple T = HKTriple::standard();
  std::mt19937_64 rng(40);
  for (int n = 0; n < 25; ++n) {
    std::array<TripleVariation, 4> slots;
    for (auto& s : slots) s = rand_asd_variation(rng);
    for (int w = 0; w < 4; ++w) {
      QMatrix g = metric_variation(T, slots[w]).gdot;
      CHECK(recover_form_variation(T, g) == slots[w]);
      CHECK(cyclic_residual(T, slots[w], g, cyclic_conventions()) == 0);
      for (int k = 1; k <= 3; ++k) CHECK(clifford_of_variation(T, g, k) == clifford_two_form(slots[w][k - 1]));
    }
    // linear in the slot: sum of slots maps to sum of metric slots
    TripleVariation sum;
    for (int i = 0; i < 3; ++i) sum[i] = slots[0][i] + slots[1][i];
    CHECK(metric_variation(T, sum).gdot ==
          metric_variation(T, slots[0]).gdot + metric_variation(T, slots[1]).gdot);
  }
}
