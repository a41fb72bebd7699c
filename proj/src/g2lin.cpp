#include "adg2/g2lin.hpp"

#include <stdexcept>

namespace adg2 {

Vec7 zero7() {
  Vec7 v;
  for (auto& c : v) c = 0;
  return v;
}

Vec7 basis_vector(int v) {
  Vec7 e = zero7();
  e[v] = 1;
  return e;
}

Vec7 vertical_part(const Vec7& x) {
  Vec7 v = x;
  for (int k = 0; k < kNumBase; ++k) v[k] = 0;
  return v;
}

Vec7 horizontal_part(const Vec7& x) {
  Vec7 v = x;
  for (int k = kNumBase; k < kNumVars; ++k) v[k] = 0;
  return v;
}

bool is_vertical(const Vec7& x) {
  for (int k = 0; k < kNumBase; ++k)
    if (x[k] != 0) return false;
  return true;
}

bool is_horizontal(const Vec7& x) {
  for (int k = kNumBase; k < kNumVars; ++k)
    if (x[k] != 0) return false;
  return true;
}

QMatrix omega_matrix(const BigradedForm& w) {
  if (w.degree() != 2 || !w.is_vertical()) throw std::invalid_argument("omega_matrix: need a vertical 2-form");
  QMatrix W(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) W(a, b) = evaluate(w, {basis_vector(var_x(a + 1)), basis_vector(var_x(b + 1))});
  return W;
}

QMatrix omega_matrix(int i) { return omega_matrix(standard_omega(i)); }

BigradedForm two_form_from_matrix(const QMatrix& W) {
  BigradedForm out(2);
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      if (W(a, b) != 0) out += BigradedForm::basis({}, {a + 1, b + 1}) * Poly(W(a, b));
  return out;
}

ComplexStructures complex_structures() {
  ComplexStructures cs;
  for (int i = 0; i < 3; ++i) {
    // ω_i(X, Y) = g(I_i X, Y) with g Euclidean gives I_i = W_iᵀ.
    QMatrix W = omega_matrix(i + 1);
    cs.on_vectors[i] = W.transpose();
    cs.on_forms[i] = -cs.on_vectors[i].transpose();
  }
  return cs;
}

G2Model::G2Model(const Rational& eps) : eps_(eps), metric_(QMatrix::identity(kNumVars)) {
  if (eps < 0) throw std::invalid_argument("G2Model: ε must be nonnegative");
  std::array<BigradedForm, 3> w = {standard_omega(1), standard_omega(2), standard_omega(3)};
  BigradedForm omega = omega_total(w);
  BigradedForm lambda = lambda_form();
  phi_ = omega * Poly(eps) + lambda;
  for (const auto& [k, f] : star7_scaling(omega)) {
    if (k != 0) throw std::logic_error("G2Model: unexpected scaling of *ω");
    psi1_ = f;
  }
  for (const auto& [k, f] : star7_scaling(lambda)) {
    if (k != 2) throw std::logic_error("G2Model: unexpected scaling of *λ");
    psi2_ = f;
  }
  psi_ = psi1_ * Poly(eps) + psi2_ * Poly(eps * eps);
  for (int a = kNumBase; a < kNumVars; ++a) metric_(a, a) = eps;
}

Rational G2Model::g(const Vec7& x, const Vec7& y) const {
  Rational s(0);
  for (int k = 0; k < kNumVars; ++k) s += metric_(k, k) * x[k] * y[k];
  return s;
}

Vec7 G2Model::raise(const Vec7& c) const {
  if (formal_limit()) throw std::domain_error("G2Model: metric is degenerate at ε = 0");
  Vec7 v = c;
  for (int k = kNumBase; k < kNumVars; ++k) v[k] /= eps_;
  return v;
}

Vec7 G2Model::cross(const Vec7& x, const Vec7& y) const {
  if (formal_limit()) throw std::domain_error("cross: ε = 0 has no cross product; use cross_limit");
  Vec7 c;
  for (int k = 0; k < kNumVars; ++k) c[k] = evaluate(phi_, {x, y, basis_vector(k)});
  return raise(c);
}

namespace {

Vec7 chi_one(const Vec7& x, const Vec7& y, const Vec7& z, const BigradedForm& psi_one) {
  Vec7 c;
  for (int k = 0; k < kNumVars; ++k) c[k] = evaluate(psi_one, {x, y, z, basis_vector(k)});
  return c;  // g₁ is the identity
}

}  // namespace

Vec7 G2Model::chi(const Vec7& x, const Vec7& y, const Vec7& z) const {
  if (formal_limit()) return chi_case_table(x, y, z, Rational(0));
  Vec7 c;
  for (int k = 0; k < kNumVars; ++k) c[k] = evaluate(psi_, {x, y, z, basis_vector(k)});
  return raise(c);
}

Vec7 cross_limit(const Vec7& x, const Vec7& y) {
  std::array<BigradedForm, 3> w = {standard_omega(1), standard_omega(2), standard_omega(3)};
  BigradedForm omega = omega_total(w), lambda = lambda_form();
  Vec7 c = zero7();
  for (int k = 0; k < kNumVars; ++k)
    c[k] = evaluate(k < kNumBase ? lambda : omega, {x, y, basis_vector(k)});
  return c;
}

Vec7 cross_first_order(const Vec7& x, const Vec7& y) {
  std::array<BigradedForm, 3> w = {standard_omega(1), standard_omega(2), standard_omega(3)};
  BigradedForm omega = omega_total(w);
  Vec7 c = zero7();
  for (int k = 0; k < kNumBase; ++k) c[k] = evaluate(omega, {x, y, basis_vector(k)});
  return c;
}

Vec7 chi_case_table(const Vec7& x, const Vec7& y, const Vec7& z, const Rational& eps) {
  static const BigradedForm psi_one = G2Model(Rational(1)).psi();
  const Vec7* args[3] = {&x, &y, &z};
  Vec7 out = zero7();
  for (int pattern = 0; pattern < 8; ++pattern) {
    Vec7 parts[3];
    int nv = 0;
    for (int k = 0; k < 3; ++k) {
      bool vertical = pattern & (1 << k);
      parts[k] = vertical ? vertical_part(*args[k]) : horizontal_part(*args[k]);
      nv += vertical;
    }
    Rational factor = nv == 0 ? Rational(0) : nv == 1 ? Rational(1) : eps;
    if (factor == 0) continue;
    Vec7 piece = chi_one(parts[0], parts[1], parts[2], psi_one);
    for (int k = 0; k < kNumVars; ++k) out[k] += factor * piece[k];
  }
  return out;
}

BigradedForm psi_formula(const Rational& eps) {
  BigradedForm out(4);
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    out -= wedge(standard_omega(i + 1), BigradedForm::basis({j + 1, k + 1}, {})) * Poly(eps);
  }
  BigradedForm w1 = standard_omega(1);
  out += wedge(w1, w1) * Poly(eps * eps / 2);
  return out;
}

}  // namespace adg2
