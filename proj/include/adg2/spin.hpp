#pragma once

#include <array>
#include <map>
#include <random>
#include <vector>

#include "adg2/excalc.hpp"
#include "adg2/gaussian.hpp"
#include "adg2/hk.hpp"

namespace adg2 {

// S = S_X ⊗ S_B with index 2x + b; x ∈ {0,1} is S⁺_X, x ∈ {2,3} is S⁻_X.
// S⁺_X ⊗ S_B is therefore the index range 0..3 and S⁻_X ⊗ S_B is 4..7.
class SpinorModel {
 public:
  explicit SpinorModel(const Rational& eps = Rational(1));

  const Rational& eps() const { return eps_; }
  GMatrix cx(int a) const;       // c_X(∂x_a) on S_X, 0-based
  GMatrix cb(int i) const;       // c_B(dt_i) on S_B, 0-based
  GMatrix I_plus(int i) const;   // ½ c_X(ω_i) restricted to S⁺_X, 0-based
  // Clifford action on S of the coordinate vector / covector for variable v (t1..t3, x1..x4).
  GMatrix c_vector(int v) const;
  GMatrix c_covector(int v) const;
  // Clifford action of a constant-coefficient form, using c of covectors.
  GMatrix c_form(const BigradedForm& f) const;
  // Complex volume forms as the bilinear form ε = [[0,1],[−1,0]] on each 2-dimensional factor.
  static GMatrix volume_form();
  // Real structure on S⁺_X ⊗ S_B: J v = (ε⊗ε) conj(v).
  static std::vector<GaussQ> real_structure(const std::vector<GaussQ>& v);

 private:
  Rational eps_;
};

// Characteristic polynomial coefficients c_0..c_n (c_n = 1) by Faddeev–LeVerrier.
std::vector<GaussQ> characteristic_polynomial(const GMatrix& A);
// Rational eigenvalues with algebraic multiplicities; throws if the polynomial does not split over ℚ.
std::map<Rational, int> exact_spectrum(const GMatrix& A);

struct COmegaDecomposition {
  GMatrix c_omega;  // on S⁺_X ⊗ S_B (4×4)
  std::map<Rational, int> spectrum;
  std::map<Rational, std::vector<std::vector<GaussQ>>> eigenspaces;
};
COmegaDecomposition c_omega_decomposition(const SpinorModel& m);

struct CanonicalPhi {
  GMatrix phi;                  // S⁺_X → S_B, 2×2
  std::vector<GaussQ> real_vector;  // unit J-real vector of the −6 eigenspace
};
// sign = ±1 selects one of the two real unit sections.
CanonicalPhi canonical_phi(const SpinorModel& m, int sign = 1);

// Jet of a triple variation at a point with flat fibre background.
// L[k][l] = 𝓛_{t_k} ω_l, D[i][k][l] = ∇_i 𝓛_{t_k} ω_l (all 0-based).
struct JetFlags {
  bool dH_omega = false;  // symmetric in k, l
  bool dH_mu = false;     // b^k = 0
  bool dH_theta = false;  // Σ_k 𝓛_k ω_k = 0
  bool asd = false;       // every slot anti-self-dual
  bool all() const { return dH_omega && dH_mu && dH_theta && asd; }
};

struct AdiabaticJet {
  std::array<std::array<TwoForm, 3>, 3> L;
  std::array<std::array<std::array<TwoForm, 3>, 3>, 4> D;

  static AdiabaticJet zero();
  JetFlags flags() const;
  // Largest |a^k_ij| and |b^k| over all slots (exact).
  Rational max_rotation_and_conformal() const;
  // ġ_k from the zeroth slots, ġ_k^{(i)} from the derivative slots.
  QMatrix gdot(int k) const;
  QMatrix gdot_derivative(int i, int k) const;
  AdiabaticJet operator+(const AdiabaticJet& o) const;
  AdiabaticJet scaled(const Rational& s) const;
};

enum class JetViolation { dH_omega, dH_mu, dH_theta };
const char* to_string(JetViolation v);

AdiabaticJet random_compatible_jet(std::mt19937_64& rng);
// Adds a random term breaking the named constraint. Breaking d_Hμ (b ≠ 0) while keeping the k,l symmetry
// necessarily breaks the trace condition as well; every other constraint stays intact.
AdiabaticJet violate(const AdiabaticJet& j, JetViolation kind, std::mt19937_64& rng);

// R̃_k: S⁻_X → S⁺_X as 2×2 blocks.
std::array<GMatrix, 3> curvature_operators(const AdiabaticJet& j, const SpinorModel& m);
GMatrix sum_I_R(const AdiabaticJet& j, const SpinorModel& m);

struct DiracVariationSymbol {
  GMatrix zeroth;                // −Σ_k I_k R̃_k
  std::array<GMatrix, 4> first;  // coefficient of ∇_{e_i}
};
DiracVariationSymbol dirac_variation_symbol(const AdiabaticJet& j, const SpinorModel& m);

}  // namespace adg2
