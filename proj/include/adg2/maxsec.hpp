#pragma once

#include <Eigen/Dense>

#include <array>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "adg2/io.hpp"

namespace adg2 {

constexpr int kH2Dim = 22;

// Symmetric 22×22 form of signature (3,19).
struct Pairing319 {
  Eigen::MatrixXd Q;
  // 3U ⊕ 2(−E8): the cup product on H²(K3, ℤ).
  static Pairing319 k3_lattice();
  // Throws std::invalid_argument unless Q is 22×22, symmetric and of signature (3,19).
  void validate() const;
};

// B with Bᵀ Q B = diag(1,1,1,−1,…,−1).
Eigen::MatrixXd adapted_basis(const Eigen::MatrixXd& Q);
// Three Q-orthonormal positive vectors (first columns of adapted_basis).
Eigen::MatrixXd positive_frame(const Eigen::MatrixXd& Q);

// Node (i1, i2, i3) is column i1 + n1·(i2 + n2·i3) of `values`.
struct PositiveSectionGrid {
  std::array<int, 3> dims{};
  std::array<double, 3> spacing{};
  std::array<double, 3> origin{};
  Eigen::MatrixXd Q;
  Eigen::MatrixXd values;  // 22 × node_count

  std::size_t node_count() const { return std::size_t(dims[0]) * dims[1] * dims[2]; }
  std::size_t index(int i1, int i2, int i3) const { return i1 + std::size_t(dims[0]) * (i2 + std::size_t(dims[1]) * i3); }
  std::array<int, 3> coords(std::size_t n) const;
  bool is_boundary(std::size_t n) const;
  std::array<double, 3> point(std::size_t n) const;
  // Trapezoid quadrature weight.
  double weight(std::size_t n) const;
  void validate() const;
};

class NotPositiveError : public std::domain_error {
 public:
  NotPositiveError(std::size_t node, std::array<int, 3> at);
  std::size_t node() const { return node_; }
  const std::array<int, 3>& at() const { return at_; }

 private:
  std::size_t node_;
  std::array<int, 3> at_;
};

// Columns ∂_i h at a node: second-order central inside, first-order one-sided on the boundary.
Eigen::Matrix<double, Eigen::Dynamic, 3> derivative_frame(const PositiveSectionGrid& s, std::size_t n);
std::vector<Eigen::Matrix3d> gram_matrices(const PositiveSectionGrid& s);
// Smallest eigenvalue of G over all nodes and all tetrahedra.
double min_eig_G(const PositiveSectionGrid& s);

// Σ_T |T| det(G_T)^{1/3} over the Kuhn tetrahedra (six per grid cell) of the piecewise-linear
// interpolant; G_T is constant on each tetrahedron.
double area(const PositiveSectionGrid& s);
// ∂Area/∂h at interior nodes (22 × node_count, boundary columns zero).
Eigen::MatrixXd grad_area(const PositiveSectionGrid& s);
// Second derivative of Area applied to an interior perturbation.
Eigen::MatrixXd hessian_vector(const PositiveSectionGrid& s, const Eigen::MatrixXd& direction);
double grad_inf_norm(const Eigen::MatrixXd& g);
// max_n sqrt(g_nᵀ M_n⁻¹ g_n) with M_n the majorant of Q at the positive 3-plane spanned by ∂h(n);
// unchanged when h and g are transported by a Q-isometry.
double grad_majorant_norm(const PositiveSectionGrid& s, const Eigen::MatrixXd& g);

struct SolveOptions {
  double tol = 1e-8;       // on ‖grad‖∞
  double step_tol = 1e-9;  // on the Newton increment ‖δ‖∞
  int max_iter = 500;
  double min_step = 1e-10;
  int linear_max_iter = 2000;
  double linear_tol = 1e-10;
};

struct SolveRecord {
  int iter;
  double area;
  double grad_inf_norm;
  double min_eig_G;
  double step_inf_norm;
};

struct SolveResult {
  PositiveSectionGrid grid;
  bool converged = false;
  int iterations = 0;
  double residual = 0;
  std::vector<SolveRecord> history;
  std::string diagnostic;
};

// Damped inexact Newton on interior nodes with boundary values held fixed. Steps (−H + μM)δ = grad are
// accepted on sufficient area gain (on decrease of ‖grad‖² once area changes are at roundoff); μ grows
// when a step loses positivity. Converged when ‖grad‖∞ ≤ tol and the undamped increment is ≤ step_tol.
// Throws NotPositiveError if the initial data is not positive.
SolveResult solve_dirichlet(const PositiveSectionGrid& init, const SolveOptions& opt = {});
// Boundary-node values are taken from `boundary`, interior values from `init`.
SolveResult solve_dirichlet(const PositiveSectionGrid& boundary, const PositiveSectionGrid& init,
                            const SolveOptions& opt = {});
std::string history_csv(const std::vector<SolveRecord>& history);

bool is_isometry(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& Psi, double tol = 1e-12);
// Node-wise Ψ∘h; throws std::invalid_argument if Ψ is not a Q-isometry.
PositiveSectionGrid dualize(const PositiveSectionGrid& s, const Eigen::MatrixXd& Psi);
// B Ψ_η B⁻¹ with Ψ_η a product of block rotations and hyperbolic rotations of rapidity ≤ max_rapidity.
Eigen::MatrixXd random_isometry(const Eigen::MatrixXd& Q, std::mt19937_64& rng, double max_rapidity = 0.5);

struct BaseMetric {
  std::vector<Eigen::Matrix3d> g;       // ½ G
  std::vector<double> lambda_density;   // sqrt det g
};
BaseMetric base_metric(const PositiveSectionGrid& s);

// h(t) = h0 + V t on the box [origin, origin + (dims−1)·spacing].
PositiveSectionGrid affine_grid(const Eigen::MatrixXd& Q, std::array<int, 3> dims, std::array<double, 3> spacing,
                                const Eigen::VectorXd& h0, const Eigen::MatrixXd& V);
// h(t) = B (t, u(t)) with u_k(t) = amplitude · sin(k·t₁ + t₂) cos(t₃ − k) in the adapted basis.
PositiveSectionGrid graphical_grid(const Eigen::MatrixXd& Q, std::array<int, 3> dims, std::array<double, 3> spacing,
                                   double amplitude);

Json grid_to_json(const PositiveSectionGrid& s);
PositiveSectionGrid grid_from_json(const Json& j);
Json matrix_to_json(const Eigen::MatrixXd& M);
Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& at, long rows, long cols);

}  // namespace adg2
