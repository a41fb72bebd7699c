#pragma once

#include "adg2/gaussian.hpp"

namespace adg2 {

// Chiral model of Cl(4) on S_X = S⁺ ⊕ S⁻ (indices 0,1 positive, 2,3 negative):
// c_a = [[0, A_a], [−A_a†, 0]] with A = (1, iσ₁, iσ₂, −iσ₃). Fibre metric Euclidean, so c(∂x_a) = c(dx_a).
GMatrix gamma_x(int a);  // 0-based
// c_B(dt_i) = c_B(∂t_i) = −iσ_i, with c_B(dt₁)c_B(dt₂)c_B(dt₃) = −1.
GMatrix gamma_b(int i);  // 0-based
GMatrix pauli(int i);    // 0-based
// diag(−1, −1, 1, 1): −1 on S⁺.
GMatrix chirality_x();
GMatrix proj_plus_x();
GMatrix proj_minus_x();

// c(F) = Σ_{a<b} F_ab c_a c_b for an antisymmetric 4×4 matrix of 2-form components.
GMatrix clifford_two_form(const QMatrix& F);
// Σ_{a,b} M_ab c_a c_b for an arbitrary real coefficient matrix.
GMatrix clifford_bilinear(const QMatrix& M);

}  // namespace adg2
