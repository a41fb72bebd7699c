#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adg2/io.hpp"

namespace adg2 {

using Complex = std::complex<double>;
// r×r complex matrix, r ≤ 3.
using LieMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, 3, 3>;

constexpr int kMaxRank = 3;
// Component μ of a connection: 0..2 are t₁..t₃, 3..6 are x₁..x₄.
constexpr int kComponents = 7;

// B × T⁴ with B a box sampled by base_dims nodes (an axis with one node is a point and has no
// derivative) and T⁴ = ℝ⁴/2πℤ⁴ sampled periodically. Node = fibre_index + fibre_count·base_index.
struct FibredGrid {
  std::array<int, 3> base_dims{1, 1, 1};
  std::array<double, 3> base_spacing{1, 1, 1};
  std::array<double, 3> base_origin{0, 0, 0};
  std::array<int, 4> fibre_dims{4, 4, 4, 4};

  static FibredGrid cube(int base_nodes, double base_length, int fibre_nodes);

  std::size_t base_count() const { return std::size_t(base_dims[0]) * base_dims[1] * base_dims[2]; }
  std::size_t fibre_count() const {
    return std::size_t(fibre_dims[0]) * fibre_dims[1] * fibre_dims[2] * fibre_dims[3];
  }
  std::size_t node_count() const { return base_count() * fibre_count(); }
  double fibre_spacing(int a) const;
  double fibre_volume() const;
  // Largest of the base and fibre spacings (over axes with more than one node).
  double max_spacing() const;
  std::array<int, 3> base_coords(std::size_t b) const;
  std::array<int, 4> fibre_coords(std::size_t f) const;
  std::size_t base_index(const std::array<int, 3>& c) const;
  std::size_t fibre_index(const std::array<int, 4>& c) const;
  // (t₁, t₂, t₃, x₁, …, x₄) of a node.
  std::array<double, 7> point(std::size_t node) const;
  std::array<double, 3> base_point(std::size_t b) const;
  // Trapezoid weights on B (1 on a point axis), uniform on T⁴.
  double base_weight(std::size_t b) const;
  double fibre_weight() const;
  // Throws std::invalid_argument on axes with 2 nodes, fewer than 3 fibre nodes or bad spacings.
  void validate() const;
  bool operator==(const FibredGrid& o) const;
};

class LatticeConnection {
 public:
  LatticeConnection() = default;
  LatticeConnection(FibredGrid grid, int rank);

  // A_μ(p) = fn(p)[μ] at every node.
  static LatticeConnection sample(const FibredGrid& grid, int rank,
                                  const std::function<std::array<LieMatrix, 7>(const std::array<double, 7>&)>& fn);

  const FibredGrid& grid() const { return grid_; }
  int rank() const { return rank_; }
  LieMatrix get(std::size_t node, int mu) const;
  void set(std::size_t node, int mu, const LieMatrix& m);
  // Crossing the fibre period in direction a shifts A_μ by √−1·twist(a, μ)·identity.
  Eigen::Matrix<double, 4, 7>& twist() { return twist_; }
  const Eigen::Matrix<double, 4, 7>& twist() const { return twist_; }
  const std::vector<Complex>& raw() const { return data_; }
  std::vector<Complex>& raw() { return data_; }
  // Largest deviation from anti-Hermitian over all entries.
  double anti_hermitian_defect() const;

  LatticeConnection& operator+=(const LatticeConnection& o);
  LatticeConnection operator-(const LatticeConnection& o) const;
  LatticeConnection scaled(double c) const;

 private:
  FibredGrid grid_;
  int rank_ = 1;
  Eigen::Matrix<double, 4, 7> twist_ = Eigen::Matrix<double, 4, 7>::Zero();
  std::vector<Complex> data_;
};

class HiggsField {
 public:
  HiggsField() = default;
  HiggsField(FibredGrid grid, int rank);
  static HiggsField sample(const FibredGrid& grid, int rank,
                           const std::function<LieMatrix(const std::array<double, 7>&)>& fn);
  const FibredGrid& grid() const { return grid_; }
  int rank() const { return rank_; }
  LieMatrix get(std::size_t node) const;
  void set(std::size_t node, const LieMatrix& m);

 private:
  FibredGrid grid_;
  int rank_ = 1;
  std::vector<Complex> data_;
};

// Per-node r×r matrices with a fixed number of components.
struct ResidualField {
  int components = 0;
  int rank = 1;
  std::size_t nodes = 0;
  std::vector<Complex> data;

  ResidualField() = default;
  ResidualField(int components, int rank, std::size_t nodes);
  LieMatrix get(std::size_t node, int c) const;
  void set(std::size_t node, int c, const LieMatrix& m);
  // Largest matrix entry modulus.
  double max_abs() const;
};

// ∂_μ A_ν − ∂_ν A_μ + [A_μ, A_ν] with second-order differences.
LieMatrix curvature(const LatticeConnection& A, std::size_t node, int mu, int nu);
// Second-order difference of component mu along coordinate axis (0..6), twist included.
LieMatrix derivative(const LatticeConnection& A, std::size_t node, int axis, int mu);

struct InstantonResidual {
  ResidualField fibre;  // F^{(0,2)}∧ω_i / μ, i = 1..3
  ResidualField horiz;  // Σ_i I_i ι_{∂t_i} F as a vertical 1-form, components dx₁..dx₄
};
InstantonResidual instanton_residual(const LatticeConnection& A);

// Σ_i I_i X_i for vertical 1-forms X_i = ι_{∂t_i}F given as F_{t_i x_a}; I acts on 1-forms by −(·)∘I.
std::array<Complex, 4> quaternionic_contraction(const std::array<std::array<Complex, 4>, 3>& F_tx);
// Coefficients of F^{(0,2)}∧ω_i against dx₁₂₃₄ from F_{x_a x_b}.
std::array<Complex, 3> fibre_pairing(const std::array<std::array<Complex, 4>, 4>& F_xx);

// Fibre part as in instanton_residual; horizontal part ρ_horiz + (d_AΦ)^{(0,1)}.
InstantonResidual monopole_residual(const LatticeConnection& A, const HiggsField& Phi);

class NotHarmonicError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// 𝓑 as a per-base-node antisymmetric 4×4 real matrix; fibre-constant coefficients are harmonic on T⁴.
struct VerticalTwoForm {
  std::vector<Eigen::Matrix4d> B;  // one per base node
};
// Per-node fibre field 𝓑; throws NotHarmonicError unless it is antisymmetric and constant along every fibre.
VerticalTwoForm harmonic_part(const FibredGrid& grid, const std::vector<Eigen::Matrix4d>& per_node, double tol = 1e-12);
// (√−1/2π) F∧ω_i − (𝓑∧ω_i)·identity, as coefficients against μ.
ResidualField twisted_hym_residual(const LatticeConnection& A, const VerticalTwoForm& B);
// max |(√−1/2πr) Tr F_{x_a x_b} − 𝓑_ab|.
double trace_identity_defect(const LatticeConnection& A, const VerticalTwoForm& B);
// ∫_{T⁴} 𝓑∧h per base node, h given per base node as a vertical 2-form.
std::vector<double> slope_potential(const FibredGrid& grid, const VerticalTwoForm& B,
                                    const std::vector<Eigen::Matrix4d>& h);

// Abelian (r = 1) discrete integration by parts on every fibre:
//   ‖d_vΦ‖² = ⟨d_vΦ, m⟩ − ⟨Φ, Σ_i ∂_{t_i} ρ_fibre,i⟩
// with m the horizontal monopole residual. All pairings are fibre sums summed over base nodes with
// base weights; `defect` is the difference of the two sides.
struct IbpIdentity {
  double dphi_norm2 = 0;
  double residual_pairing = 0;
  double fibre_pairing = 0;
  double defect = 0;
  double residual_norm = 0;  // ‖m‖
  double fibre_term_norm = 0;  // ‖Σ ∂_{t_i} ρ_fibre,i‖
  double phi_norm = 0;         // ‖Φ − fibre mean of Φ‖; bounds |fibre_pairing| with fibre_term_norm
  // ‖d_vΦ‖ ≤ ‖m‖ + sqrt|⟨Φ, Σ ∂_{t_i} ρ_fibre,i⟩|
  double bound() const;
};
IbpIdentity ibp_identity(const LatticeConnection& A, const HiggsField& Phi);

// max |∂_λF_μν + ∂_μF_νλ + ∂_νF_λμ| over nodes and triples (abelian: exact zero up to roundoff).
double bianchi_defect(const LatticeConnection& A);

// True when A − B is a central, fibre-constant 1-form with only dt components.
bool equivalent_up_to_twist(const LatticeConnection& A, const LatticeConnection& B, double tol = 1e-12);

// Sampled path τ_0 < … < τ_m; connections are produced on demand.
struct ConnectionPath {
  std::vector<double> times;
  std::function<LatticeConnection(std::size_t)> at;

  static ConnectionPath from_samples(std::vector<double> times, std::vector<LatticeConnection> samples);
  static ConnectionPath from_function(std::vector<double> times,
                                      const std::function<LatticeConnection(double)>& fn);
  void validate() const;
};

// (−1/4π²)∫_{M×[0,1]} Tr(F∧Ȧ)∧Θ∧dτ, with M oriented by λ∧μ and the path piecewise linear in τ:
// each interval contributes ½(c(F_k, ΔA) + c(F_{k+1}, ΔA)).
double cs_instanton(const ConnectionPath& path);
// Coefficient of dμ∧dν∧dρ∧Θ against λ∧μ.
double cs_density_coefficient(int mu, int nu, int rho);

struct FueterSectionGrid {
  std::array<int, 3> dims{1, 1, 1};
  std::array<double, 3> spacing{1, 1, 1};
  std::array<double, 3> origin{0, 0, 0};
  double period = 0;        // 0: values in ℝ⁴; p > 0: values in ℝ⁴/pℤ⁴
  Eigen::Matrix4Xd values;  // 4 × node_count

  std::size_t node_count() const { return std::size_t(dims[0]) * dims[1] * dims[2]; }
  std::array<double, 3> point(std::size_t n) const;
  // Brings every value into [0, period)⁴.
  void normalize();
  void validate() const;
};

// Standard hypercomplex triple on ℝ⁴ (I₁e₁ = e₂).
const std::array<Eigen::Matrix4d, 3>& fibre_complex_structures();
// Đs = Σ I_i ∂_{t_i}s; differences of torus-valued sections use the nearest lift.
Eigen::Matrix4Xd fueter_residual(const FueterSectionGrid& s);

// ∫_{[0,1]×B} N*Θ^𝓜 for the flat dual-torus bundle with ω_i^𝓜 = (V/4π²)·ω_i, V the fibre volume;
// [0,1]×B oriented by dτ∧dt₁dt₂dt₃. Same piecewise-linear rule in τ as cs_instanton.
double cs_associative(const std::vector<FueterSectionGrid>& path, double fibre_volume);

class NotFlatError : public std::domain_error {
 public:
  NotFlatError(std::size_t node, double curvature);
  std::size_t node() const { return node_; }
  double curvature() const { return curvature_; }

 private:
  std::size_t node_;
  double curvature_;
};

// r = 1: s(b) = fibre average of (A_{x₁}, …, A_{x₄})/√−1 modulo ℤ⁴ (period 1).
// Throws NotFlatError when max |F^{(0,2)}| exceeds flat_tol, std::invalid_argument if r ≠ 1.
FueterSectionGrid holonomy_section(const LatticeConnection& A, double flat_tol = 1e-2);

// Numerical helpers shared by tests and reports.
double pairwise_sum(const std::vector<double>& v);
double correlation(const std::vector<double>& a, const std::vector<double>& b);
// |v_c − v_f| / (h_c² − h_f²) for the model v(h) = v* + C h².
double richardson_constant(double coarse, double fine, double h_coarse, double h_fine);
double observed_order(double e_coarse, double e_fine, double refinement = 2);

Json grid_to_json(const FibredGrid& g);
FibredGrid fibred_grid_from_json(const Json& j, const std::string& at);
Json connection_to_json(const LatticeConnection& A);
LatticeConnection connection_from_json(const Json& j);
Json higgs_to_json(const HiggsField& Phi);
HiggsField higgs_from_json(const Json& j);
Json section_to_json(const FueterSectionGrid& s);
FueterSectionGrid section_from_json(const Json& j);
// CSV: node, base, fibre, then Frobenius norms of ρ_fibre,1..3 and ρ_horiz,1..4.
std::string residual_csv(const FibredGrid& g, const InstantonResidual& r);
std::string fueter_csv(const FueterSectionGrid& s, const Eigen::Matrix4Xd& d);

}  // namespace adg2
