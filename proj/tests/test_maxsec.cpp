#include <doctest.h>

#include <cmath>
#include <random>

#include "adg2/maxsec.hpp"

using namespace adg2;

namespace {

Eigen::MatrixXd K3() { return Pairing319::k3_lattice().Q; }

Eigen::VectorXd random_vector(std::mt19937_64& rng, double scale = 1) {
  std::normal_distribution<double> n;
  Eigen::VectorXd v(kH2Dim);
  for (int k = 0; k < kH2Dim; ++k) v(k) = scale * n(rng);
  return v;
}

PositiveSectionGrid unit_affine(int n) {
  Eigen::MatrixXd Q = K3();
  double h = 1.0 / (n - 1);
  return affine_grid(Q, {n, n, n}, {h, h, h}, Eigen::VectorXd::Zero(kH2Dim), positive_frame(Q));
}

void perturb_interior(PositiveSectionGrid& s, std::mt19937_64& rng, double size) {
  for (std::size_t n = 0; n < s.node_count(); ++n)
    if (!s.is_boundary(n)) s.values.col(n) += random_vector(rng, size);
}

}  // namespace

TEST_CASE("K3 pairing has signature (3,19) and adapted basis diagonalises it") {
  Pairing319 p = Pairing319::k3_lattice();
  CHECK_NOTHROW(p.validate());
  Eigen::MatrixXd B = adapted_basis(p.Q);
  Eigen::MatrixXd eta = Eigen::MatrixXd::Identity(kH2Dim, kH2Dim);
  for (int k = 3; k < kH2Dim; ++k) eta(k, k) = -1;
  CHECK((B.transpose() * p.Q * B - eta).cwiseAbs().maxCoeff() < 1e-12);

  Pairing319 bad{Eigen::MatrixXd::Identity(kH2Dim, kH2Dim)};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  Pairing319 asym = p;
  asym.Q(0, 5) += 1;
  CHECK_THROWS_AS(asym.validate(), std::invalid_argument);
}

TEST_CASE("area of orthonormal affine data on the unit cube is 1") {
  for (int n : {3, 5, 9}) {
    auto s = unit_affine(n);
    CHECK(std::abs(area(s) - 1) <= 1e-12);
    CHECK(grad_inf_norm(grad_area(s)) <= 1e-13);
  }
}

TEST_CASE("area scales quadratically and ignores constant shifts") {
  std::mt19937_64 rng(3);
  auto s = unit_affine(5);
  perturb_interior(s, rng, 0.005);
  double a = area(s);
  Eigen::MatrixXd g = grad_area(s);
  for (double c : {0.5, 2.0, 3.0}) {
    PositiveSectionGrid t = s;
    t.values *= c;
    CHECK(std::abs(area(t) - c * c * a) <= 1e-12 * c * c * a);
  }
  PositiveSectionGrid shifted = s;
  shifted.values.colwise() += random_vector(rng, 5);
  CHECK(std::abs(area(shifted) - a) <= 1e-12);
  CHECK((grad_area(shifted) - g).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gradient matches central differences of area along unit directions") {
  std::mt19937_64 rng(17);
  for (int instance = 0; instance < 3; ++instance) {
    auto s = unit_affine(5);
    perturb_interior(s, rng, 0.005);
    Eigen::MatrixXd g = grad_area(s);
    const double eps = 1e-5;
    for (int dir = 0; dir < 20; ++dir) {
      Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(kH2Dim, s.node_count());
      for (std::size_t n = 0; n < s.node_count(); ++n)
        if (!s.is_boundary(n)) delta.col(n) = random_vector(rng);
      delta /= delta.norm();
      PositiveSectionGrid plus = s, minus = s;
      plus.values += eps * delta;
      minus.values -= eps * delta;
      double fd = (area(plus) - area(minus)) / (2 * eps);
      double exact = (g.array() * delta.array()).sum();
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(std::abs(exact), 1e-8));
    }
  }
}

TEST_CASE("Hessian-vector product matches differences of the gradient") {
  std::mt19937_64 rng(23);
  auto s = unit_affine(5);
  perturb_interior(s, rng, 0.005);
  for (int dir = 0; dir < 5; ++dir) {
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(kH2Dim, s.node_count());
    for (std::size_t n = 0; n < s.node_count(); ++n)
      if (!s.is_boundary(n)) delta.col(n) = random_vector(rng);
    const double eps = 1e-5;
    PositiveSectionGrid plus = s, minus = s;
    plus.values += eps * delta;
    minus.values -= eps * delta;
    Eigen::MatrixXd fd = (grad_area(plus) - grad_area(minus)) / (2 * eps);
    Eigen::MatrixXd hv = hessian_vector(s, delta);
    CHECK((fd - hv).cwiseAbs().maxCoeff() <= 1e-6 * hv.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("area and gradient are transported by isometries") {
  std::mt19937_64 rng(101);
  auto s = unit_affine(5);
  perturb_interior(s, rng, 0.005);
  double a = area(s);
  Eigen::MatrixXd g = grad_area(s);
  double gnorm = grad_majorant_norm(s, g);
  Eigen::MatrixXd Qinv = s.Q.inverse();
  for (int k = 0; k < 20; ++k) {
    Eigen::MatrixXd Psi = random_isometry(s.Q, rng);
    REQUIRE(is_isometry(s.Q, Psi));
    auto d = dualize(s, Psi);
    CHECK(std::abs(area(d) - a) <= 1e-10 * a);
    Eigen::MatrixXd gd = grad_area(d);
    CHECK(std::abs(grad_majorant_norm(d, gd) - gnorm) <= 1e-10 * gnorm);
    // Q-dual gradient vectors move with Ψ
    Eigen::MatrixXd lhs = Qinv * gd, rhs = Psi * (Qinv * g);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * rhs.cwiseAbs().maxCoeff());
    // base metric only sees periods through G
    auto m0 = base_metric(s), m1 = base_metric(d);
    for (std::size_t n = 0; n < m0.g.size(); n += 7) CHECK((m0.g[n] - m1.g[n]).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("dualize special cases") {
  std::mt19937_64 rng(4);
  auto s = unit_affine(5);
  perturb_interior(s, rng, 0.005);
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(kH2Dim, kH2Dim);
  auto same = dualize(s, I);
  CHECK(same.values == s.values);

  Eigen::MatrixXd B = adapted_basis(s.Q), Binv = B.inverse();
  double r0 = grad_majorant_norm(s, grad_area(s));
  // rotation in the positive 3-plane
  Eigen::MatrixXd R = I;
  double th = 0.7;
  R(0, 0) = R(1, 1) = std::cos(th);
  R(0, 1) = -std::sin(th);
  R(1, 0) = std::sin(th);
  auto rot = dualize(s, B * R * Binv);
  CHECK(std::abs(grad_majorant_norm(rot, grad_area(rot)) - r0) <= 1e-10 * r0);
  // −1 on a negative definite 2-plane
  Eigen::MatrixXd N = I;
  N(5, 5) = N(6, 6) = -1;
  auto refl = dualize(s, B * N * Binv);
  CHECK(std::abs(grad_majorant_norm(refl, grad_area(refl)) - r0) <= 1e-10 * r0);
  CHECK((refl.values - s.values).cwiseAbs().maxCoeff() > 1e-3);

  Eigen::MatrixXd notiso = I;
  notiso(0, 0) = 2;
  CHECK_THROWS_AS(dualize(s, notiso), std::invalid_argument);
}

TEST_CASE("base metric of orthonormal and scaled sections") {
  auto s = unit_affine(5);
  auto m = base_metric(s);
  for (std::size_t n = 0; n < m.g.size(); ++n) {
    CHECK((m.g[n] - 0.5 * Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(m.lambda_density[n] - std::sqrt(0.125)) <= 1e-12);
  }
  PositiveSectionGrid t = s;
  t.values *= 3;
  auto m3 = base_metric(t);
  CHECK((m3.g[10] - 9 * m.g[10]).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("non-positive data is rejected with the offending node") {
  auto s = unit_affine(5);
  // collapse the t3 derivative at one corner
  std::size_t corner = s.index(4, 4, 4);
  s.values.col(corner) = s.values.col(s.index(4, 4, 3));
  CHECK_THROWS_AS(area(s), NotPositiveError);
  try {
    area(s);
  } catch (const NotPositiveError& e) {
    CHECK(e.at() == std::array<int, 3>{4, 4, 4});
  }
}

TEST_CASE("solver on affine boundary data") {
  auto exact = unit_affine(9);
  auto r0 = solve_dirichlet(exact);
  CHECK(r0.converged);
  CHECK(r0.iterations == 0);

  std::mt19937_64 rng(8);
  PositiveSectionGrid init = exact;
  perturb_interior(init, rng, 0.005);
  auto res = solve_dirichlet(init);
  CHECK(res.converged);
  CHECK(res.residual <= 1e-8);
  CHECK(res.iterations <= 500);
  CHECK((res.grid.values - exact.values).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(res.history.size() == std::size_t(res.iterations + 1));
  CHECK(history_csv(res.history).rfind("iter,area,grad_inf_norm,min_eig_G\n", 0) == 0);

  SolveOptions few;
  few.max_iter = 0;
  auto capped = solve_dirichlet(init, few);
  CHECK_FALSE(capped.converged);
  CHECK(capped.diagnostic == "maximum iterations reached");
}

TEST_CASE("solver deviation from affine does not grow with the grid") {
  std::mt19937_64 rng(12);
  for (int n : {5, 9, 13}) {
    auto exact = unit_affine(n);
    PositiveSectionGrid init = exact;
    perturb_interior(init, rng, 0.003);
    auto res = solve_dirichlet(exact, init);
    CHECK(res.converged);
    CHECK((res.grid.values - exact.values).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("solver on graphical boundary data") {
  Eigen::MatrixXd Q = K3();
  auto s = graphical_grid(Q, {7, 7, 7}, {1.0 / 6, 1.0 / 6, 1.0 / 6}, 0.02);
  CHECK(grad_inf_norm(grad_area(s)) > 1e-6);
  auto res = solve_dirichlet(s);
  CHECK(res.converged);
  CHECK(res.residual <= 1e-8);
  CHECK(min_eig_G(res.grid) > 0);
}

TEST_CASE("grid JSON round trip and schema errors") {
  auto s = unit_affine(3);
  Json j = grid_to_json(s);
  auto back = grid_from_json(j);
  CHECK(back.dims == s.dims);
  CHECK(back.values == s.values);
  CHECK(back.Q == s.Q);

  Json missing = j;
  missing.erase("Q");
  try {
    grid_from_json(missing);
    CHECK(false);
  } catch (const SchemaError& e) {
    CHECK(e.pointer() == "/Q");
  }
  Json bad = j;
  bad["nodes"][4][7] = "x";
  try {
    grid_from_json(bad);
    CHECK(false);
  } catch (const SchemaError& e) {
    CHECK(e.pointer() == "/nodes/4/7");
  }
  Json small = j;
  small["dims"][1] = 2;
  try {
    grid_from_json(small);
    CHECK(false);
  } catch (const SchemaError& e) {
    CHECK(e.pointer() == "/dims/1");
  }
}
