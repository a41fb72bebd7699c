#include "adg2/spin.hpp"

#include <stdexcept>

#include "adg2/clifford.hpp"
#include "adg2/g2lin.hpp"

namespace adg2 {

SpinorModel::SpinorModel(const Rational& eps) : eps_(eps) {
  if (eps <= 0) throw std::invalid_argument("SpinorModel: ε must be positive");
}

GMatrix SpinorModel::cx(int a) const { return gamma_x(a); }
GMatrix SpinorModel::cb(int i) const { return gamma_b(i); }

GMatrix SpinorModel::I_plus(int i) const {
  return clifford_two_form(omega_matrix(i + 1)).block(0, 0, 2, 2) * GaussQ(Rational(1, 2));
}

GMatrix SpinorModel::c_vector(int v) const {
  if (v < kNumBase) return kron(chirality_x(), gamma_b(v));
  GMatrix scale = proj_minus_x() + proj_plus_x() * GaussQ(eps_);
  return kron(gamma_x(v - kNumBase) * scale, GMatrix::identity(2));
}

GMatrix SpinorModel::c_covector(int v) const {
  if (v < kNumBase) return kron(chirality_x(), gamma_b(v));
  GMatrix scale = proj_plus_x() + proj_minus_x() * GaussQ(1 / eps_);
  return kron(gamma_x(v - kNumBase) * scale, GMatrix::identity(2));
}

GMatrix SpinorModel::c_form(const BigradedForm& f) const {
  GMatrix out(8, 8);
  if (f.is_zero()) return out;
  for (const auto& [m, p] : f.terms()) {
    if (!p.is_constant()) throw std::invalid_argument("c_form: coefficients must be constant");
    GMatrix prod = GMatrix::identity(8);
    for (int v = 0; v < kNumVars; ++v)
      if (m & (1u << v)) prod = prod * c_covector(v);
    out += prod * GaussQ(p.constant_term());
  }
  return out;
}

GMatrix SpinorModel::volume_form() { return GMatrix(2, 2, {0, 1, -1, 0}); }

std::vector<GaussQ> SpinorModel::real_structure(const std::vector<GaussQ>& v) {
  GMatrix e = volume_form();
  GMatrix ee = kron(e, e);
  std::vector<GaussQ> out(4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[r] += ee(r, c) * v[c].conj();
  return out;
}

// ---- exact spectra ----

std::vector<GaussQ> characteristic_polynomial(const GMatrix& A) {
  const std::size_t n = A.rows();
  std::vector<GaussQ> c(n + 1);
  c[n] = 1;
  GMatrix M(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    M = A * M + GMatrix::identity(n) * c[n - k + 1];
    GaussQ tr = trace(A * M);
    c[n - k] = -tr / GaussQ(int(k));
  }
  return c;
}

namespace {

GaussQ eval_poly(const std::vector<GaussQ>& c, const GaussQ& x) {
  GaussQ s(0);
  for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
  return s;
}

// Synthetic division by (x − r).
std::vector<GaussQ> deflate(const std::vector<GaussQ>& c, const GaussQ& r) {
  std::size_t n = c.size() - 1;
  std::vector<GaussQ> q(n);
  GaussQ carry(0);
  for (std::size_t k = n; k-- > 0;) {
    carry = c[k + 1] + carry * r;
    q[k] = carry;
  }
  return q;
}

}  // namespace

std::map<Rational, int> exact_spectrum(const GMatrix& A) {
  std::vector<GaussQ> c = characteristic_polynomial(A);
  for (const auto& z : c)
    if (z.im != 0 || z.re.get_den() != 1) throw std::domain_error("exact_spectrum: non-integer characteristic polynomial");
  std::map<Rational, int> spec;
  while (c.size() > 1) {
    if (c[0].is_zero()) {
      spec[Rational(0)] += 1;
      c.erase(c.begin());
      continue;
    }
    mpz_class c0 = abs(c[0].re.get_num());
    bool found = false;
    for (mpz_class d = 1; d * d <= c0 && !found; ++d) {
      if (c0 % d != 0) continue;
      for (mpz_class cand : {d, mpz_class(c0 / d)})
        for (int s : {1, -1}) {
          if (found) break;
          GaussQ r(Rational(cand * s));
          if (eval_poly(c, r).is_zero()) {
            spec[r.re] += 1;
            c = deflate(c, r);
            found = true;
          }
        }
    }
    if (!found) throw std::domain_error("exact_spectrum: characteristic polynomial does not split over Q");
  }
  return spec;
}

COmegaDecomposition c_omega_decomposition(const SpinorModel& m) {
  COmegaDecomposition d;
  d.c_omega = GMatrix(4, 4);
  for (int i = 0; i < 3; ++i) d.c_omega -= kron(m.I_plus(i), m.cb(i)) * GaussQ(2);
  d.spectrum = exact_spectrum(d.c_omega);
  for (const auto& [lambda, mult] : d.spectrum)
    d.eigenspaces[lambda] = nullspace(d.c_omega - GMatrix::identity(4) * GaussQ(lambda));
  return d;
}

CanonicalPhi canonical_phi(const SpinorModel& m, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("canonical_phi: sign must be ±1");
  auto d = c_omega_decomposition(m);
  auto it = d.eigenspaces.find(Rational(-6));
  if (it == d.eigenspaces.end() || it->second.size() != 1) throw std::logic_error("canonical_phi: −6 eigenspace not a line");
  std::vector<GaussQ> v = it->second[0];
  std::vector<GaussQ> Jv = SpinorModel::real_structure(v);
  std::vector<GaussQ> w(4);
  bool zero = true;
  for (int k = 0; k < 4; ++k) {
    w[k] = v[k] + Jv[k];
    if (!w[k].is_zero()) zero = false;
  }
  if (zero)
    for (int k = 0; k < 4; ++k) w[k] = v[k] * GaussQ::i();
  Rational norm2(0);
  for (const auto& z : w) norm2 += z.norm2();
  // Φ†Φ = (|w|²/2)·1 for this eigenline; require an exact rational square root.
  Rational target = norm2 / 2;
  mpz_class num = target.get_num(), den = target.get_den();
  mpz_class rn = sqrt(num), rd = sqrt(den);
  if (rn * rn != num || rd * rd != den) throw std::domain_error("canonical_phi: normalisation is not rational");
  Rational scale = Rational(rd, rn) * sign;
  scale.canonicalize();
  GMatrix V(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) V(a, b) = w[a * 2 + b] * GaussQ(scale);
  CanonicalPhi out;
  out.phi = V.transpose() * SpinorModel::volume_form();
  out.real_vector = w;
  for (auto& z : out.real_vector) z *= GaussQ(scale);
  return out;
}

// ---- jets ----

AdiabaticJet AdiabaticJet::zero() {
  AdiabaticJet j;
  for (auto& row : j.L)
    for (auto& w : row) w = TwoForm(4, 4);
  for (auto& slab : j.D)
    for (auto& row : slab)
      for (auto& w : row) w = TwoForm(4, 4);
  return j;
}

JetFlags AdiabaticJet::flags() const {
  JetFlags f;
  f.dH_omega = f.dH_mu = f.dH_theta = f.asd = true;
  HKTriple T = HKTriple::standard();
  auto check_block = [&](const std::array<std::array<TwoForm, 3>, 3>& B) {
    TwoForm tr(4, 4);
    for (int k = 0; k < 3; ++k) {
      tr += B[k][k];
      for (int l = 0; l < 3; ++l) {
        if (B[k][l] != B[l][k]) f.dH_omega = false;
        for (int j = 0; j < 3; ++j)
          if (wedge22(B[k][l], T.W[j]) != 0) f.asd = false;
      }
      TripleVariation V = {B[k][0], B[k][1], B[k][2]};
      if (decompose_variation(T, V).b != 0) f.dH_mu = false;
    }
    if (!tr.is_zero()) f.dH_theta = false;
  };
  check_block(L);
  for (const auto& slab : D) check_block(slab);
  return f;
}

Rational AdiabaticJet::max_rotation_and_conformal() const {
  HKTriple T = HKTriple::standard();
  Rational worst(0);
  auto visit = [&](const std::array<std::array<TwoForm, 3>, 3>& B) {
    for (int k = 0; k < 3; ++k) {
      auto d = decompose_variation(T, {B[k][0], B[k][1], B[k][2]});
      worst = std::max(worst, Rational(abs(d.b)));
      worst = std::max(worst, max_abs(d.a));
    }
  };
  visit(L);
  for (const auto& slab : D) visit(slab);
  return worst;
}

QMatrix AdiabaticJet::gdot(int k) const {
  return metric_variation(HKTriple::standard(), {L[k][0], L[k][1], L[k][2]}).gdot;
}

QMatrix AdiabaticJet::gdot_derivative(int i, int k) const {
  return metric_variation(HKTriple::standard(), {D[i][k][0], D[i][k][1], D[i][k][2]}).gdot;
}

AdiabaticJet AdiabaticJet::operator+(const AdiabaticJet& o) const {
  AdiabaticJet r = *this;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      r.L[k][l] += o.L[k][l];
      for (int i = 0; i < 4; ++i) r.D[i][k][l] += o.D[i][k][l];
    }
  return r;
}

AdiabaticJet AdiabaticJet::scaled(const Rational& s) const {
  AdiabaticJet r = *this;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      r.L[k][l] *= s;
      for (int i = 0; i < 4; ++i) r.D[i][k][l] *= s;
    }
  return r;
}

const char* to_string(JetViolation v) {
  switch (v) {
    case JetViolation::dH_omega: return "d_H omega";
    case JetViolation::dH_mu: return "d_H mu";
    case JetViolation::dH_theta: return "d_H Theta";
  }
  return "?";
}

namespace {

Rational small_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
  Rational r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

Rational nonzero_rational(std::mt19937_64& rng) {
  Rational r;
  do r = small_rational(rng);
  while (r == 0);
  return r;
}

TwoForm random_asd(std::mt19937_64& rng, bool nonzero = false) {
  auto basis = asd_basis();
  TwoForm w(4, 4);
  do {
    w = TwoForm(4, 4);
    for (int k = 0; k < 3; ++k) w += basis[k] * small_rational(rng);
  } while (nonzero && w.is_zero());
  return w;
}

// Symmetric, trace-free 3×3 block of ASD forms.
std::array<std::array<TwoForm, 3>, 3> random_compatible_block(std::mt19937_64& rng) {
  std::array<std::array<TwoForm, 3>, 3> B;
  for (int k = 0; k < 3; ++k)
    for (int l = k; l < 3; ++l) B[k][l] = B[l][k] = random_asd(rng);
  B[2][2] = TwoForm(4, 4) - B[0][0] - B[1][1];
  return B;
}

}  // namespace

AdiabaticJet random_compatible_jet(std::mt19937_64& rng) {
  AdiabaticJet j;
  j.L = random_compatible_block(rng);
  for (auto& slab : j.D) slab = random_compatible_block(rng);
  return j;
}

AdiabaticJet violate(const AdiabaticJet& j, JetViolation kind, std::mt19937_64& rng) {
  AdiabaticJet r = j;
  HKTriple T = HKTriple::standard();
  switch (kind) {
    case JetViolation::dH_omega:
      // asymmetric ASD term in the (1,2) slot only; trace untouched
      r.L[0][1] += random_asd(rng, true);
      for (auto& slab : r.D) slab[0][1] += random_asd(rng, true);
      break;
    case JetViolation::dH_theta:
      r.L[0][0] += random_asd(rng, true);
      for (auto& slab : r.D) slab[0][0] += random_asd(rng, true);
      break;
    case JetViolation::dH_mu: {
      // T_klj = β_l δ_kj + β_k δ_lj − β_j δ_kl: symmetric in k,l with conformal part b^k = β_k.
      auto add = [&](std::array<std::array<TwoForm, 3>, 3>& B) {
        std::array<Rational, 3> beta = {nonzero_rational(rng), nonzero_rational(rng), nonzero_rational(rng)};
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            for (int jj = 0; jj < 3; ++jj) {
              Rational c = (k == jj ? beta[l] : Rational(0)) + (l == jj ? beta[k] : Rational(0)) -
                           (k == l ? beta[jj] : Rational(0));
              if (c != 0) B[k][l] += T.W[jj] * c;
            }
      };
      add(r.L);
      for (auto& slab : r.D) add(slab);
      break;
    }
  }
  return r;
}

std::array<GMatrix, 3> curvature_operators(const AdiabaticJet& j, const SpinorModel& m) {
  std::array<GMatrix, 3> out;
  std::array<GMatrix, 4> c;
  for (int a = 0; a < 4; ++a) c[a] = m.cx(a);
  for (int k = 0; k < 3; ++k) {
    std::array<QMatrix, 4> gd;
    for (int i = 0; i < 4; ++i) gd[i] = j.gdot_derivative(i, k);
    GMatrix Rk(4, 4);
    for (int l = 0; l < 4; ++l)
      for (int i = 0; i < 4; ++i)
        for (int jj = 0; jj < 4; ++jj) {
          // ⟨R(e_l, ∂t_k) e_j, e_i⟩ = ½[(∇_i ġ_k)(e_l, e_j) − (∇_j ġ_k)(e_l, e_i)]
          Rational R = (gd[i](l, jj) - gd[jj](l, i)) / 2;
          if (R == 0) continue;
          Rk += c[l] * c[i] * c[jj] * GaussQ(R * Rational(-1, 4));
        }
    out[k] = Rk.block(0, 2, 2, 2);
  }
  return out;
}

GMatrix sum_I_R(const AdiabaticJet& j, const SpinorModel& m) {
  auto R = curvature_operators(j, m);
  GMatrix s(2, 2);
  for (int k = 0; k < 3; ++k) s += m.I_plus(k) * R[k];
  return s;
}

DiracVariationSymbol dirac_variation_symbol(const AdiabaticJet& j, const SpinorModel& m) {
  DiracVariationSymbol sym;
  sym.zeroth = -sum_I_R(j, m);
  std::array<QMatrix, 3> g;
  for (int k = 0; k < 3; ++k) g[k] = j.gdot(k);
  for (int i = 0; i < 4; ++i) {
    GMatrix acc(2, 2);
    for (int k = 0; k < 3; ++k) {
      GMatrix inner(4, 4);
      for (int jj = 0; jj < 4; ++jj)
        if (g[k](i, jj) != 0) inner += m.cx(jj) * GaussQ(g[k](i, jj) * Rational(-1, 2));
      acc += m.I_plus(k) * inner.block(0, 2, 2, 2);
    }
    sym.first[i] = acc;
  }
  return sym;
}

}  // namespace adg2
