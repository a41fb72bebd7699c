#include <doctest.h>

#include <random>

#include "adg2/clifford.hpp"
#include "adg2/excalc.hpp"
#include "adg2/g2lin.hpp"
#include "adg2/spin.hpp"

using namespace adg2;

namespace {

GMatrix id(std::size_t n) { return GMatrix::identity(n); }

Rational metric_entry(const SpinorModel& m, int v) {
  // g_ε on coordinate vectors
  return v < kNumBase ? Rational(1) : m.eps();
}

// Characteristic polynomial oracle by cofactor expansion.
GaussQ det(const GMatrix& A) {
  const std::size_t n = A.rows();
  if (n == 1) return A(0, 0);
  GaussQ s(0);
  for (std::size_t c = 0; c < n; ++c) {
    GMatrix minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t cc = 0, k = 0; cc < n; ++cc)
        if (cc != c) minor(r - 1, k++) = A(r, cc);
    GaussQ term = A(0, c) * det(minor);
    s += (c % 2 == 0) ? term : -term;
  }
  return s;
}

// Parametrises the compatible jet space: symmetric traceless ASD blocks.
std::vector<AdiabaticJet> compatible_basis() {
  std::vector<AdiabaticJet> out;
  auto asd = asd_basis();
  const int pairs[5][2] = {{0, 1}, {0, 2}, {1, 2}, {0, 0}, {1, 1}};
  for (int slab = -1; slab < 4; ++slab)
    for (const auto& p : pairs)
      for (int a = 0; a < 3; ++a) {
        AdiabaticJet j = AdiabaticJet::zero();
        auto& B = slab < 0 ? j.L : j.D[slab];
        auto [k, l] = p;
        if (k == l) {
          B[k][k] += asd[a];
          B[2][2] -= asd[a];
        } else {
          B[k][l] += asd[a];
          B[l][k] += asd[a];
        }
        out.push_back(j);
      }
  return out;
}

}  // namespace

TEST_CASE("Clifford relations on the total spinor bundle") {
  for (Rational eps : {Rational(1), Rational(1, 3), Rational(5, 2)}) {
    SpinorModel m(eps);
    for (int u = 0; u < kNumVars; ++u)
      for (int v = 0; v < kNumVars; ++v) {
        GMatrix ac = anticommutator(m.c_vector(u), m.c_vector(v));
        GMatrix expect = u == v ? id(8) * GaussQ(Rational(-2) * metric_entry(m, u)) : GMatrix(8, 8);
        CHECK(ac == expect);
        GMatrix acd = anticommutator(m.c_covector(u), m.c_covector(v));
        GMatrix expect_d = u == v ? id(8) * GaussQ(Rational(-2) / metric_entry(m, u)) : GMatrix(8, 8);
        CHECK(acd == expect_d);
      }
  }
}

TEST_CASE("base Clifford generators and quaternion relations on S+") {
  SpinorModel m;
  CHECK(m.cb(0) * m.cb(1) * m.cb(2) == -id(2));
  for (int i = 0; i < 3; ++i) {
    CHECK(m.I_plus(i) * m.I_plus(i) == -id(2));
    CHECK(m.I_plus(i).adjoint() == -m.I_plus(i));
  }
  CHECK(m.I_plus(0) * m.I_plus(1) == m.I_plus(2));
  CHECK(m.I_plus(1) * m.I_plus(2) == m.I_plus(0));
  CHECK(m.I_plus(2) * m.I_plus(0) == m.I_plus(1));
  // self-dual forms act trivially on S−
  for (int i = 1; i <= 3; ++i) CHECK(clifford_two_form(omega_matrix(i)).block(2, 2, 2, 2).is_zero());
}

TEST_CASE("characteristic polynomial agrees with cofactor expansion") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> d(-4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    GMatrix A(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) A(r, c) = GaussQ(Rational(d(rng)), Rational(d(rng)));
    auto cp = characteristic_polynomial(A);
    for (int x = -3; x <= 3; ++x) {
      GaussQ val(0);
      for (std::size_t k = cp.size(); k-- > 0;) val = val * GaussQ(x) + cp[k];
      CHECK(val == det(id(4) * GaussQ(x) - A));
    }
  }
}

TEST_CASE("c(omega) on S+ tensor S_B has spectrum -6 once and 2 three times") {
  for (Rational eps : {Rational(1), Rational(1, 3)}) {
    SpinorModel m(eps);
    auto d = c_omega_decomposition(m);
    std::map<Rational, int> expect = {{Rational(-6), 1}, {Rational(2), 3}};
    CHECK(d.spectrum == expect);
    CHECK(d.eigenspaces.at(Rational(-6)).size() == 1);
    CHECK(d.eigenspaces.at(Rational(2)).size() == 3);
    // independent route: the 8×8 action of ε·Σ ω_i∧dt_i restricted to S+⊗S_B
    GMatrix full = m.c_form(omega_total({standard_omega(1), standard_omega(2), standard_omega(3)})).block(0, 0, 4, 4);
    CHECK(full * GaussQ(eps) == d.c_omega);
  }
}

TEST_CASE("c(Theta) equals c(omega) and the volume forms act by chirality") {
  SpinorModel m;
  GMatrix c_omega = m.c_form(omega_total({standard_omega(1), standard_omega(2), standard_omega(3)})).block(0, 0, 4, 4);
  GMatrix c_theta = m.c_form(theta_from_omegas({standard_omega(1), standard_omega(2), standard_omega(3)})).block(0, 0, 4, 4);
  CHECK(c_theta == c_omega);
  GMatrix cl = m.c_form(lambda_form());
  GMatrix cm = m.c_form(mu_form());
  GMatrix gamma = kron(chirality_x(), id(2));
  CHECK(cl == gamma);
  CHECK(cm == gamma);
  CHECK(cl * cm == id(8));
  CHECK(cl.block(0, 0, 4, 4) == -id(4));
  CHECK(cl.block(4, 4, 4, 4) == id(4));
}

TEST_CASE("canonical identification S+ to S_B") {
  SpinorModel m;
  auto d = c_omega_decomposition(m);
  const auto& line = d.eigenspaces.at(Rational(-6))[0];
  // the −6 line is J-stable
  auto Jv = SpinorModel::real_structure(line);
  GaussQ ratio(0);
  for (int k = 0; k < 4; ++k)
    if (!line[k].is_zero()) {
      ratio = Jv[k] / line[k];
      break;
    }
  for (int k = 0; k < 4; ++k) CHECK(Jv[k] == ratio * line[k]);

  GMatrix eps_form = SpinorModel::volume_form();
  std::vector<GMatrix> phis;
  for (int sign : {1, -1}) {
    auto cp = canonical_phi(m, sign);
    const GMatrix& P = cp.phi;
    CHECK(P.adjoint() * P == id(2));
    CHECK(det(P) == GaussQ(1));
    CHECK(P.transpose() * eps_form * P == eps_form);
    for (int i = 0; i < 3; ++i) CHECK(P * m.I_plus(i) == m.cb(i) * P);
    auto Jr = SpinorModel::real_structure(cp.real_vector);
    for (int k = 0; k < 4; ++k) CHECK(Jr[k] == cp.real_vector[k]);
    phis.push_back(P);
  }
  CHECK(phis[0] == -phis[1]);
}

TEST_CASE("curvature term vanishes on compatible jets") {
  SpinorModel m;
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    AdiabaticJet j = random_compatible_jet(rng);
    REQUIRE(j.flags().all());
    CHECK(j.max_rotation_and_conformal() == 0);
    CHECK(sum_I_R(j, m).is_zero());
    auto sym = dirac_variation_symbol(j, m);
    CHECK(sym.zeroth.is_zero());
    for (const auto& f : sym.first) CHECK(f.is_zero());
  }
}

TEST_CASE("each broken constraint is detected") {
  SpinorModel m;
  std::mt19937_64 rng(77);
  for (JetViolation kind : {JetViolation::dH_omega, JetViolation::dH_mu, JetViolation::dH_theta}) {
    int detected = 0;
    for (int trial = 0; trial < 100; ++trial) {
      AdiabaticJet j = violate(random_compatible_jet(rng), kind, rng);
      JetFlags f = j.flags();
      CHECK_FALSE(f.all());
      CHECK(f.asd == (kind != JetViolation::dH_mu));
      if (kind == JetViolation::dH_omega) CHECK((!f.dH_omega && f.dH_mu && f.dH_theta));
      if (kind == JetViolation::dH_theta) CHECK((f.dH_omega && f.dH_mu && !f.dH_theta));
      if (kind == JetViolation::dH_mu) CHECK((f.dH_omega && !f.dH_mu));
      auto sym = dirac_variation_symbol(j, m);
      bool nonzero = !sym.zeroth.is_zero();
      for (const auto& g : sym.first) nonzero = nonzero || !g.is_zero();
      if (nonzero) ++detected;
    }
    INFO(to_string(kind));
    CHECK(detected >= 95);
  }
}

TEST_CASE("curvature term is linear and kills the compatible subspace") {
  SpinorModel m;
  auto basis = compatible_basis();
  CHECK(basis.size() == 75);
  for (const auto& j : basis) {
    CHECK(j.flags().all());
    CHECK(sum_I_R(j, m).is_zero());
  }
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    AdiabaticJet a = violate(random_compatible_jet(rng), JetViolation::dH_theta, rng);
    AdiabaticJet b = violate(random_compatible_jet(rng), JetViolation::dH_omega, rng);
    Rational s(trial + 1, 3);
    s.canonicalize();
    CHECK(sum_I_R(a + b.scaled(s), m) == sum_I_R(a, m) + sum_I_R(b, m) * GaussQ(s));
  }
}

TEST_CASE("SpinorModel rejects non-positive scale and non-constant forms") {
  CHECK_THROWS_AS(SpinorModel(Rational(0)), std::invalid_argument);
  SpinorModel m;
  BigradedForm f = BigradedForm::dx(1) * Poly::variable(var_t(1));
  CHECK_THROWS_AS(m.c_form(f), std::invalid_argument);
  CHECK_THROWS_AS(canonical_phi(m, 0), std::invalid_argument);
}
