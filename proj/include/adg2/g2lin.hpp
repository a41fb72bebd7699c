#pragma once

#include <array>

#include "adg2/excalc.hpp"
#include "adg2/gaussian.hpp"

namespace adg2 {

using Vec7 = std::array<Rational, kNumVars>;

// Components of a constant vector field in the order ∂t1 ∂t2 ∂t3 ∂x1 … ∂x4.
Vec7 zero7();
Vec7 basis_vector(int v);
Vec7 vertical_part(const Vec7& x);
Vec7 horizontal_part(const Vec7& x);
bool is_vertical(const Vec7& x);
bool is_horizontal(const Vec7& x);

// ω_i as the antisymmetric matrix W[a][b] = ω_i(∂x_a, ∂x_b), 1-based i.
QMatrix omega_matrix(int i);
QMatrix omega_matrix(const BigradedForm& vertical_two_form);
BigradedForm two_form_from_matrix(const QMatrix& W);

struct ComplexStructures {
  // Action on vertical vectors: (I x)_a = Σ_b I[a][b] x_b.
  std::array<QMatrix, 3> on_vectors;
  // Action on vertical 1-forms in the dx basis, I a = −a∘I.
  std::array<QMatrix, 3> on_forms;
};
ComplexStructures complex_structures();

class G2Model {
 public:
  explicit G2Model(const Rational& eps);

  const Rational& eps() const { return eps_; }
  bool formal_limit() const { return eps_ == 0; }
  const BigradedForm& phi() const { return phi_; }
  // *_ε φ_ε; identically zero when ε = 0.
  const BigradedForm& psi() const { return psi_; }
  // ψ_ε = ε·psi1 + ε²·psi2.
  const BigradedForm& psi1() const { return psi1_; }
  const BigradedForm& psi2() const { return psi2_; }
  const QMatrix& metric() const { return metric_; }

  Rational g(const Vec7& x, const Vec7& y) const;

  // g(x × y, z) = φ(x, y, z); requires ε > 0.
  Vec7 cross(const Vec7& x, const Vec7& y) const;
  // g(χ(x, y, z), w) = ψ(x, y, z, w) for ε > 0; case-table limit for ε = 0.
  Vec7 chi(const Vec7& x, const Vec7& y, const Vec7& z) const;

 private:
  Vec7 raise(const Vec7& covector) const;

  Rational eps_;
  BigradedForm phi_, psi_, psi1_, psi2_;
  QMatrix metric_;
};

// Formal limit objects: cross_ε = cross_limit + ε·cross_first_order.
Vec7 cross_limit(const Vec7& x, const Vec7& y);
Vec7 cross_first_order(const Vec7& x, const Vec7& y);
// χ₁ (ε = 1) with each argument split into horizontal and vertical parts, each piece scaled by the
// case table: none vertical → 0, one vertical → 1, two or more vertical → ε.
Vec7 chi_case_table(const Vec7& x, const Vec7& y, const Vec7& z, const Rational& eps);

// Expected *_ε φ_ε = −ε Σ_cyc ω_i dt_j dt_k + (ε²/2) ω₁².
BigradedForm psi_formula(const Rational& eps);

}  // namespace adg2
