#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "adg2/gaussian.hpp"
#include "adg2/io.hpp"

namespace adg2 {

// Variable order: t1 t2 t3 x1 x2 x3 x4.
constexpr int kNumVars = 7;
constexpr int kNumBase = 3;
constexpr int kNumFibre = 4;
inline constexpr int var_t(int i) { return i - 1; }  // 1-based
inline constexpr int var_x(int a) { return 2 + a; }  // 1-based

using Exponent = std::array<int, kNumVars>;

class Poly {
 public:
  Poly() = default;
  Poly(const Rational& c);  // NOLINT(implicit)
  Poly(int c) : Poly(Rational(c)) {}  // NOLINT(implicit)

  static Poly variable(int v);
  static Poly monomial(const Exponent& e, const Rational& c);

  const std::map<Exponent, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  int total_degree() const;

  Poly derivative(int v) const;
  Rational evaluate(const std::array<Rational, kNumVars>& at) const;
  double evaluate(const std::array<double, kNumVars>& at) const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Rational& s);

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) { return a *= Rational(-1); }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
  friend Poly operator*(const Rational& s, Poly a) { return a *= s; }
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  std::string str() const;

 private:
  void add_term(const Exponent& e, const Rational& c);
  std::map<Exponent, Rational> terms_;
};

// Bit v of a mask is the basis 1-form of variable v; bits 0..2 horizontal, 3..6 vertical.
using Mask = std::uint8_t;
constexpr Mask kBaseMask = 0x07;
constexpr Mask kFibreMask = 0x78;

int popcount(Mask m);
inline int horizontal_degree(Mask m) { return popcount(m & kBaseMask); }
inline int vertical_degree(Mask m) { return popcount(m & kFibreMask); }
// Sign s with e_a ∧ e_b = s e_{a|b}, zero if they overlap.
int wedge_sign(Mask a, Mask b);

class BigradedForm {
 public:
  explicit BigradedForm(int degree = 0) : degree_(degree) {}

  // 1-based index lists, e.g. basis({1}, {2, 3}) = dt1 dx2 dx3 (canonical sign).
  static BigradedForm basis(const std::vector<int>& I, const std::vector<int>& J, const Poly& coeff = Poly(1));
  static BigradedForm from_mask(Mask m, const Poly& coeff = Poly(1));
  static BigradedForm scalar(const Poly& p);
  static BigradedForm dt(int i) { return basis({i}, {}); }
  static BigradedForm dx(int a) { return basis({}, {a}); }

  int degree() const { return degree_; }
  const std::map<Mask, Poly>& terms() const { return terms_; }
  Poly coefficient(Mask m) const;
  bool is_zero() const { return terms_.empty(); }
  bool is_horizontal() const;
  bool is_vertical() const;
  bool has_bigrade(int p, int q) const;
  BigradedForm component(int p, int q) const;
  bool constant_coefficients() const;

  void add_term(Mask m, const Poly& p);

  BigradedForm& operator+=(const BigradedForm& o);
  BigradedForm& operator-=(const BigradedForm& o);
  BigradedForm& operator*=(const Poly& p);

  friend BigradedForm operator+(BigradedForm a, const BigradedForm& b) { return a += b; }
  friend BigradedForm operator-(BigradedForm a, const BigradedForm& b) { return a -= b; }
  friend BigradedForm operator-(BigradedForm a) { return a *= Poly(-1); }
  friend BigradedForm operator*(BigradedForm a, const Poly& p) { return a *= p; }
  friend BigradedForm operator*(const Poly& p, BigradedForm a) { return a *= p; }
  friend bool operator==(const BigradedForm& a, const BigradedForm& b);
  friend bool operator!=(const BigradedForm& a, const BigradedForm& b) { return !(a == b); }

  std::string str() const;

 private:
  int degree_;
  std::map<Mask, Poly> terms_;
};

BigradedForm wedge(const BigradedForm& a, const BigradedForm& b);
BigradedForm exterior_d(const BigradedForm& a);
// Contraction with a constant vector (components in the coordinate frame).
BigradedForm interior(const std::array<Rational, kNumVars>& v, const BigradedForm& a);
// a(v_1, ..., v_n) at a point; vectors are constant.
Rational evaluate(const BigradedForm& a, const std::vector<std::array<Rational, kNumVars>>& vectors,
                  const std::array<Rational, kNumVars>& at = {});

struct HorizontalDistribution {
  // H[i][a] is the coefficient of ∂x_{a+1} in the lift of ∂t_{i+1}.
  std::array<std::array<Poly, kNumFibre>, kNumBase> H;

  static HorizontalDistribution trivial() { return {}; }
  // δ_i f = ∂_{t_i} f + Σ_a H_i^a ∂_{x_a} f, 1-based i.
  Poly lift_derivative(int i, const Poly& f) const;
  // Curvature components Ω_{ij}^a = δ_i H_j^a − δ_j H_i^a, 1-based.
  Poly curvature(int i, int j, int a) const;
  bool is_flat() const;
};

// Forms passed to split_d are written in the adapted coframe {dt_i, e^a = dx_a − Σ H_i^a dt_i};
// masks then index dt_i and e^a instead of dt_i and dx_a.
struct SplitD {
  BigradedForm d_f;
  BigradedForm d_H;
  BigradedForm F_H;
};
SplitD split_d(const BigradedForm& a, const HorizontalDistribution& H);
BigradedForm to_coordinate_frame(const BigradedForm& a, const HorizontalDistribution& H);

// *₄ on vertical forms with vol₄ = dx1dx2dx3dx4 (= μ).
BigradedForm star4(const BigradedForm& a);
// *₃ on horizontal forms with base orientation λ = −dt1dt2dt3.
BigradedForm star3(const BigradedForm& a);
// *_{7,ε} for g_ε = ε Σ dx² + Σ dt², vol₇ = −dt123 dx1234: result = Σ_k ε^k F_k, returned as {k: F_k}.
std::map<int, BigradedForm> star7_scaling(const BigradedForm& a);
// ε > 0 required.
BigradedForm star7(const BigradedForm& a, const Rational& eps);

// Standard self-dual triple and related constant forms.
BigradedForm standard_omega(int i);  // 1-based
BigradedForm lambda_form();          // −dt1dt2dt3
BigradedForm mu_form();              // dx1dx2dx3dx4
// Θ = −Σ_cyc ω_i dt_j dt_k.
BigradedForm theta_from_omegas(const std::array<BigradedForm, 3>& omega);
// ω = Σ ω_i ∧ dt_i.
BigradedForm omega_total(const std::array<BigradedForm, 3>& omega);

struct FibrationData {
  std::array<BigradedForm, 3> omega;
  BigradedForm lambda;
  BigradedForm mu;
  BigradedForm theta;
  HorizontalDistribution H;

  // Constant standard triple, H = 0.
  static FibrationData product();
  static FibrationData from_triple(const std::array<BigradedForm, 3>& omega, const HorizontalDistribution& H);
};

struct DonaldsonResiduals {
  BigradedForm df_omega, dH_omega, df_lambda, dH_mu, df_theta, dH_theta;
  // hk[i][j] = ω_i∧ω_j − 2δ_ij μ
  std::array<std::array<BigradedForm, 3>, 3> hk;

  bool differential_zero() const;
  bool algebraic_zero() const;
  bool all_zero() const { return differential_zero() && algebraic_zero(); }
};
DonaldsonResiduals donaldson_residuals(const FibrationData& F);

Json form_to_json(const BigradedForm& a);
BigradedForm form_from_json(const Json& j, const std::string& at = "");

}  // namespace adg2
