#pragma once

#include <array>
#include <cmath>
#include <random>

#include "adg2/gauge_fueter.hpp"

namespace fixtures {

using adg2::Complex;
using adg2::FibredGrid;
using adg2::LatticeConnection;
using adg2::LieMatrix;

constexpr double kPi = 3.14159265358979323846;
inline const Complex kI(0, 1);

inline LieMatrix scalar(Complex z, int r = 1) { return LieMatrix::Identity(r, r) * z; }

inline std::array<LieMatrix, 7> zeros(int r = 1) {
  std::array<LieMatrix, 7> a;
  for (auto& m : a) m = LieMatrix::Zero(r, r);
  return a;
}

inline FibredGrid make_grid(std::array<int, 3> base, double length, int fibre) {
  FibredGrid g;
  g.base_dims = base;
  for (int i = 0; i < 3; ++i) g.base_spacing[i] = base[i] > 1 ? length / (base[i] - 1) : 1.0;
  g.fibre_dims = {fibre, fibre, fibre, fibre};
  g.validate();
  return g;
}

// χ = sin(x₁ + 2x₂) + cos(2x₃ − x₄): dχ sampled analytically is exact in the continuum, but its
// central-difference curvature is O(h²) and nonzero.
inline std::array<double, 4> fibre_noise_gradient(const std::array<double, 7>& p) {
  double c = std::cos(p[3] + 2 * p[4]), s = std::sin(2 * p[5] - p[6]);
  return {c, 2 * c, -2 * s, s};
}

inline double fibre_noise(const std::array<double, 7>& p) { return std::sin(p[3] + 2 * p[4]) + std::cos(2 * p[5] - p[6]); }

// i(x₁dx₂ − x₃dx₄) + ε·i dχ: anti-self-dual, twisted along x₁ and x₃.
inline LatticeConnection asd_connection(const FibredGrid& g, double noise) {
  auto A = LatticeConnection::sample(g, 1, [&](const std::array<double, 7>& p) {
    auto a = zeros();
    auto dchi = fibre_noise_gradient(p);
    for (int c = 0; c < 4; ++c) a[3 + c] = scalar(kI * noise * dchi[c]);
    a[4] += scalar(kI * p[3]);
    a[6] -= scalar(kI * p[5]);
    return a;
  });
  A.twist()(0, 4) = 2 * kPi;
  A.twist()(2, 6) = -2 * kPi;
  return A;
}

// Random fibrewise-flat abelian connection family
//   A(τ) = i Σ_a θ_a(t, τ) dx_a + i ε dχ(t, x, τ),
//   θ_a = α_a + β_a·t + τ·γ_a sin(k_a·t + φ_a) + τ²·δ_a cos(t₁ − t₃) + w·sin(πτ)·bump(t)·0.3(a+1)
// where the bump vanishes on the boundary of the base box and w is the homotopy weight.
struct FlatAbelian {
  std::array<double, 4> alpha{};
  std::array<std::array<double, 3>, 4> beta{};
  std::array<double, 4> gamma{};
  std::array<std::array<double, 3>, 4> k{};
  std::array<double, 4> phi{};
  std::array<double, 4> delta{};
  double noise = 0;
  double box = 1;  // base box side for the bump

  static FlatAbelian random(std::mt19937_64& rng, double noise, double box) {
    std::uniform_real_distribution<double> u(-1, 1);
    FlatAbelian f;
    f.noise = noise;
    f.box = box;
    for (int a = 0; a < 4; ++a) {
      f.alpha[a] = u(rng);
      f.gamma[a] = 0.5 * u(rng);
      f.phi[a] = kPi * u(rng);
      f.delta[a] = 0.5 * u(rng);
      for (int i = 0; i < 3; ++i) {
        f.beta[a][i] = 0.4 * u(rng);
        f.k[a][i] = 1.5 * u(rng);
      }
    }
    return f;
  }

  double bump(const std::array<double, 3>& t) const {
    double v = 1;
    for (double x : t) v *= std::pow(std::sin(kPi * x / box), 2);
    return v;
  }

  // bump_weight = 0 gives the base path; other values give homotopic paths with the same endpoints
  // when the τ-profile vanishes at τ = 0, 1.
  std::array<double, 4> theta(const std::array<double, 3>& t, double tau, double bump_weight = 0) const {
    std::array<double, 4> th{};
    for (int a = 0; a < 4; ++a) {
      double kt = phi[a], bt = alpha[a];
      for (int i = 0; i < 3; ++i) {
        kt += k[a][i] * t[i];
        bt += beta[a][i] * t[i];
      }
      th[a] = bt + tau * gamma[a] * std::sin(kt) + tau * tau * delta[a] * std::cos(t[0] - t[2]) +
              bump_weight * std::sin(kPi * tau) * bump(t) * (a + 1) * 0.3;
    }
    return th;
  }

  // Gauge function ε·(1 + τ t₁ + t₂ t₃)·χ(x); filled base node by base node.
  LatticeConnection connection(const FibredGrid& g, double tau, double bump_weight = 0) const {
    LatticeConnection A(g, 1);
    const std::size_t nf = g.fibre_count();
    std::vector<double> chi(nf);
    std::vector<std::array<double, 4>> dchi(nf);
    for (std::size_t f = 0; f < nf; ++f) {
      auto p = g.point(f);
      chi[f] = fibre_noise(p);
      dchi[f] = fibre_noise_gradient(p);
    }
    auto& raw = A.raw();
    for (std::size_t b = 0; b < g.base_count(); ++b) {
      auto t = g.base_point(b);
      auto th = theta(t, tau, bump_weight);
      double amp = 1 + tau * t[0] + t[1] * t[2];
      for (std::size_t f = 0; f < nf; ++f) {
        Complex* a = raw.data() + (f + nf * b) * adg2::kComponents;
        a[0] = kI * noise * tau * chi[f];
        a[1] = kI * noise * t[2] * chi[f];
        a[2] = kI * noise * t[1] * chi[f];
        for (int c = 0; c < 4; ++c) a[3 + c] = kI * (th[c] + noise * amp * dchi[f][c]);
      }
    }
    return A;
  }
};

inline std::vector<double> uniform_times(int m) {
  std::vector<double> t(m + 1);
  for (int k = 0; k <= m; ++k) t[k] = double(k) / m;
  return t;
}

}  // namespace fixtures
