#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "adg2/gaussian.hpp"

namespace adg2 {

// A vertical 2-form as an antisymmetric 4×4 matrix W[a][b] = ω(e_a, e_b).
using TwoForm = QMatrix;
using TripleVariation = std::array<TwoForm, 3>;

struct HKTriple {
  std::array<TwoForm, 3> W;
  static HKTriple standard();
};

// Coefficient of α∧β on dx1dx2dx3dx4.
Rational wedge22(const TwoForm& a, const TwoForm& b);
// u∧v as a 2-form.
TwoForm wedge11(const std::vector<Rational>& u, const std::vector<Rational>& v);
std::vector<Rational> contract(const std::vector<Rational>& X, const TwoForm& w);  // ι_X ω
// Standard anti-self-dual basis dx12 − dx34, dx13 − dx42, dx14 − dx23.
std::array<TwoForm, 3> asd_basis();

class HKRelationError : public std::invalid_argument {
 public:
  HKRelationError(int i, int j)
      : std::invalid_argument("hyperkahler relation fails for pair (" + std::to_string(i) + "," + std::to_string(j) + ")"),
        i_(i), j_(j) {}
  int i() const { return i_; }
  int j() const { return j_; }

 private:
  int i_, j_;
};

struct HKMetric {
  QMatrix g;    // 4×4 symmetric
  Rational mu;  // μ = mu · dx1234
};

// g(Y,Z)·μ = ι_Yω₁∧ι_Zω₂∧ω₃; throws HKRelationError with 1-based indices.
HKMetric metric_from_triple(const HKTriple& T);
// The two other cyclic versions of the defining product, divided by μ.
std::array<QMatrix, 3> cyclic_metric_versions(const HKTriple& T);
// I_i = G⁻¹ W_iᵀ so that ω_i(X, Y) = g(I_i X, Y).
std::array<QMatrix, 3> complex_structures(const HKTriple& T);

struct VariationDecomposition {
  QMatrix coeff;           // ω̇_i = Σ_j coeff_ij ω_j + asd_i
  QMatrix a;               // antisymmetric part
  Rational b;              // trace / 3
  QMatrix sym_traceless;   // remaining symmetric traceless part
  std::array<TwoForm, 3> asd;
};
VariationDecomposition decompose_variation(const HKTriple& T, const TripleVariation& V);

struct MetricVariation {
  QMatrix gdot;
  Rational mudot;  // μ̇ = mudot · dx1234
};
MetricVariation metric_variation(const HKTriple& T, const TripleVariation& V);
// ω̇_i = −½ Σ_j I_i e_j ∧ ι_{e_j} ġ (orthonormal frame sum written with G⁻¹).
TripleVariation recover_form_variation(const HKTriple& T, const QMatrix& gdot);
// ½ Σ_{ij} ġ(I_k e_i, e_j) c_i c_j on S_X; needs a Euclidean triple. k is 1-based.
GMatrix clifford_of_variation(const HKTriple& T, const QMatrix& gdot, int k);

// Identities relating ġ(op Y, Z) to Σ sign·ω̇_i(op_i Y, Z); op 0 is the identity, 1..3 are I_1..I_3.
struct CyclicTerm {
  int sign;
  int op;
};
struct CyclicRow {
  int lhs_op;
  std::array<CyclicTerm, 3> terms;
};
using CyclicTable = std::array<CyclicRow, 4>;
CyclicTable cyclic_conventions();
// Test hook: a copy of the table with one sign flipped.
CyclicTable corrupted_cyclic_conventions();
// Largest |lhs − rhs| over all rows and basis vectors (exact).
Rational cyclic_residual(const HKTriple& T, const TripleVariation& V, const QMatrix& gdot, const CyclicTable& table);

}  // namespace adg2
