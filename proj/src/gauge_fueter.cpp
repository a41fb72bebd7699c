#include "adg2/gauge_fueter.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "adg2/parallel.hpp"

namespace adg2 {

namespace {

constexpr double kPi = 3.14159265358979323846;
const Complex kI(0, 1);

// ω_i(e_a, e_b) for the standard triple dx12 + dx34, dx13 + dx42, dx14 + dx23.
const std::array<Eigen::Matrix4d, 3>& omega_matrices() {
  static const std::array<Eigen::Matrix4d, 3> W = [] {
    std::array<Eigen::Matrix4d, 3> w;
    const int pairs[3][2][2] = {{{0, 1}, {2, 3}}, {{0, 2}, {3, 1}}, {{0, 3}, {1, 2}}};
    for (int i = 0; i < 3; ++i) {
      w[i].setZero();
      for (const auto& p : pairs[i]) {
        w[i](p[0], p[1]) = 1;
        w[i](p[1], p[0]) = -1;
      }
    }
    return w;
  }();
  return W;
}

LieMatrix zero_matrix(int r) { return LieMatrix::Zero(r, r); }
LieMatrix identity_matrix(int r) { return LieMatrix::Identity(r, r); }

// Neighbours and weights of the second-order difference along one axis at one node.
// kind 0: no derivative (point axis); 1: central (v[up] − v[down])·inv; 2: forward
// (−3v₀ + 4v[up] − v[down])·inv; 3: backward (3v₀ − 4v[up] + v[down])·inv.
// `wraps` counts fibre-period crossings, each adding shift·inv.
struct Stencil {
  int kind = 0;
  std::size_t up = 0, down = 0;
  double inv = 0;
  int wraps = 0;
};

Stencil axis_stencil(const FibredGrid& g, std::size_t node, int axis) {
  Stencil st;
  const std::size_t nf = g.fibre_count();
  if (axis < 3) {
    const auto c = g.base_coords(node / nf);
    const int n = g.base_dims[axis];
    if (n == 1) return st;
    std::size_t stride = axis == 0 ? 1 : axis == 1 ? std::size_t(g.base_dims[0]) : std::size_t(g.base_dims[0]) * g.base_dims[1];
    stride *= nf;
    st.inv = 1 / (2 * g.base_spacing[axis]);
    if (c[axis] == 0) {
      st.kind = 2;
      st.up = node + stride;
      st.down = node + 2 * stride;
    } else if (c[axis] == n - 1) {
      st.kind = 3;
      st.up = node - stride;
      st.down = node - 2 * stride;
    } else {
      st.kind = 1;
      st.up = node + stride;
      st.down = node - stride;
    }
    return st;
  }
  const int a = axis - 3;
  const std::size_t f = node % nf;
  const int n = g.fibre_dims[a];
  std::size_t stride = 1;
  for (int k = 0; k < a; ++k) stride *= std::size_t(g.fibre_dims[k]);
  const int ca = int((f / stride) % n);
  const std::size_t base = node - f;
  st.kind = 1;
  st.inv = 1 / (2 * g.fibre_spacing(a));
  st.up = base + (ca == n - 1 ? f - std::size_t(n - 1) * stride : f + stride);
  st.down = base + (ca == 0 ? f + std::size_t(n - 1) * stride : f - stride);
  st.wraps = int(ca == n - 1) + int(ca == 0);
  return st;
}

std::array<Stencil, 7> node_stencils(const FibredGrid& g, std::size_t node) {
  std::array<Stencil, 7> out;
  for (int axis = 0; axis < 7; ++axis) out[axis] = axis_stencil(g, node, axis);
  return out;
}

template <class Get>
LieMatrix apply(const Stencil& st, std::size_t node, const Get& get, int r) {
  switch (st.kind) {
    case 1: return (get(st.up) - get(st.down)) * st.inv;
    case 2: return (-3.0 * get(node) + 4.0 * get(st.up) - get(st.down)) * st.inv;
    case 3: return (3.0 * get(node) - 4.0 * get(st.up) + get(st.down)) * st.inv;
    default: return LieMatrix::Zero(r, r);
  }
}

template <class Get>
LieMatrix difference(const FibredGrid& g, std::size_t node, int axis, const Get& get, int r) {
  return apply(axis_stencil(g, node, axis), node, get, r);
}

using RawMap = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// Derivatives and curvature of a connection at one node, read from raw storage.
class Jet {
 public:
  Jet(const LatticeConnection& A, std::size_t node)
      : A_(A), data_(A.raw().data()), node_(node), r_(A.rank()), st_(node_stencils(A.grid(), node)) {}

  LieMatrix value(std::size_t m, int mu) const {
    return RawMap(data_ + (m * kComponents + mu) * r_ * r_, r_, r_);
  }
  LieMatrix at(int mu) const { return value(node_, mu); }

  LieMatrix D(int axis, int mu) const {
    const Stencil& st = st_[axis];
    LieMatrix d = apply(st, node_, [&](std::size_t m) { return value(m, mu); }, r_);
    if (st.wraps) {
      double t = A_.twist()(axis - 3, mu);
      if (t != 0) d += LieMatrix::Identity(r_, r_) * (kI * t * st.inv * double(st.wraps));
    }
    return d;
  }

  LieMatrix F(int mu, int nu) const {
    LieMatrix f = D(mu, nu) - D(nu, mu);
    if (r_ > 1) {
      LieMatrix Am = at(mu), An = at(nu);
      f += Am * An - An * Am;
    }
    return f;
  }

  // Rank-1 versions.
  Complex value1(std::size_t m, int mu) const { return data_[m * kComponents + mu]; }

  Complex D1(int axis, int mu) const {
    const Stencil& st = st_[axis];
    Complex d;
    switch (st.kind) {
      case 1: d = (value1(st.up, mu) - value1(st.down, mu)) * st.inv; break;
      case 2: d = (-3.0 * value1(node_, mu) + 4.0 * value1(st.up, mu) - value1(st.down, mu)) * st.inv; break;
      case 3: d = (3.0 * value1(node_, mu) - 4.0 * value1(st.up, mu) + value1(st.down, mu)) * st.inv; break;
      default: return 0;
    }
    if (st.wraps) d += kI * A_.twist()(axis - 3, mu) * st.inv * double(st.wraps);
    return d;
  }

  Complex F1(int mu, int nu) const { return D1(mu, nu) - D1(nu, mu); }

 private:
  const LatticeConnection& A_;
  const Complex* data_;
  std::size_t node_;
  int r_;
  std::array<Stencil, 7> st_;
};

double frob(const LieMatrix& m) { return m.norm(); }

}  // namespace

// ---- grid ----

FibredGrid FibredGrid::cube(int base_nodes, double base_length, int fibre_nodes) {
  FibredGrid g;
  g.base_dims = {base_nodes, base_nodes, base_nodes};
  double h = base_nodes > 1 ? base_length / (base_nodes - 1) : 1.0;
  g.base_spacing = {h, h, h};
  g.fibre_dims = {fibre_nodes, fibre_nodes, fibre_nodes, fibre_nodes};
  g.validate();
  return g;
}

double FibredGrid::fibre_spacing(int a) const { return 2 * kPi / fibre_dims[a]; }
double FibredGrid::fibre_volume() const { return std::pow(2 * kPi, 4); }

double FibredGrid::max_spacing() const {
  double h = 0;
  for (int i = 0; i < 3; ++i)
    if (base_dims[i] > 1) h = std::max(h, base_spacing[i]);
  for (int a = 0; a < 4; ++a) h = std::max(h, fibre_spacing(a));
  return h;
}

std::array<int, 3> FibredGrid::base_coords(std::size_t b) const {
  return {int(b % base_dims[0]), int((b / base_dims[0]) % base_dims[1]), int(b / (std::size_t(base_dims[0]) * base_dims[1]))};
}

std::array<int, 4> FibredGrid::fibre_coords(std::size_t f) const {
  std::array<int, 4> c{};
  for (int a = 0; a < 4; ++a) {
    c[a] = int(f % fibre_dims[a]);
    f /= fibre_dims[a];
  }
  return c;
}

std::size_t FibredGrid::base_index(const std::array<int, 3>& c) const {
  return c[0] + std::size_t(base_dims[0]) * (c[1] + std::size_t(base_dims[1]) * c[2]);
}

std::size_t FibredGrid::fibre_index(const std::array<int, 4>& c) const {
  std::size_t f = 0;
  for (int a = 3; a >= 0; --a) f = f * fibre_dims[a] + c[a];
  return f;
}

std::array<double, 3> FibredGrid::base_point(std::size_t b) const {
  auto c = base_coords(b);
  return {base_origin[0] + c[0] * base_spacing[0], base_origin[1] + c[1] * base_spacing[1],
          base_origin[2] + c[2] * base_spacing[2]};
}

std::array<double, 7> FibredGrid::point(std::size_t node) const {
  auto t = base_point(node / fibre_count());
  auto x = fibre_coords(node % fibre_count());
  std::array<double, 7> p{};
  for (int i = 0; i < 3; ++i) p[i] = t[i];
  for (int a = 0; a < 4; ++a) p[3 + a] = x[a] * fibre_spacing(a);
  return p;
}

double FibredGrid::base_weight(std::size_t b) const {
  auto c = base_coords(b);
  double w = 1;
  for (int i = 0; i < 3; ++i) {
    if (base_dims[i] == 1) continue;
    w *= (c[i] == 0 || c[i] == base_dims[i] - 1) ? base_spacing[i] / 2 : base_spacing[i];
  }
  return w;
}

double FibredGrid::fibre_weight() const { return fibre_volume() / double(fibre_count()); }

void FibredGrid::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (base_dims[i] < 1 || base_dims[i] == 2)
      throw std::invalid_argument("base axis " + std::to_string(i) + " needs 1 or at least 3 nodes");
    if (!(base_spacing[i] > 0) || !std::isfinite(base_spacing[i]))
      throw std::invalid_argument("base spacing must be positive");
  }
  for (int a = 0; a < 4; ++a)
    if (fibre_dims[a] < 3) throw std::invalid_argument("fibre axis needs at least 3 nodes");
}

bool FibredGrid::operator==(const FibredGrid& o) const {
  return base_dims == o.base_dims && base_spacing == o.base_spacing && base_origin == o.base_origin &&
         fibre_dims == o.fibre_dims;
}

// ---- fields ----

LatticeConnection::LatticeConnection(FibredGrid grid, int rank) : grid_(grid), rank_(rank) {
  grid_.validate();
  if (rank < 1 || rank > kMaxRank) throw std::invalid_argument("rank must be 1, 2 or 3");
  data_.assign(grid_.node_count() * kComponents * rank * rank, Complex(0));
}

LatticeConnection LatticeConnection::sample(
    const FibredGrid& grid, int rank,
    const std::function<std::array<LieMatrix, 7>(const std::array<double, 7>&)>& fn) {
  LatticeConnection A(grid, rank);
  parallel_for(grid.node_count(), [&](std::size_t n) {
    auto v = fn(grid.point(n));
    for (int mu = 0; mu < kComponents; ++mu) A.set(n, mu, v[mu]);
  });
  return A;
}

LieMatrix LatticeConnection::get(std::size_t node, int mu) const {
  const int r = rank_;
  LieMatrix m(r, r);
  const Complex* p = data_.data() + (node * kComponents + mu) * r * r;
  for (int i = 0; i < r * r; ++i) m.data()[i] = p[i];
  return m;
}

void LatticeConnection::set(std::size_t node, int mu, const LieMatrix& m) {
  const int r = rank_;
  if (m.rows() != r || m.cols() != r) throw std::invalid_argument("matrix size does not match the rank");
  Complex* p = data_.data() + (node * kComponents + mu) * r * r;
  for (int i = 0; i < r * r; ++i) p[i] = m.data()[i];
}

double LatticeConnection::anti_hermitian_defect() const {
  double worst = 0;
  for (std::size_t n = 0; n < grid_.node_count(); ++n)
    for (int mu = 0; mu < kComponents; ++mu) {
      LieMatrix m = get(n, mu);
      worst = std::max(worst, (m + m.adjoint()).cwiseAbs().maxCoeff());
    }
  return worst;
}

LatticeConnection& LatticeConnection::operator+=(const LatticeConnection& o) {
  if (!(grid_ == o.grid_) || rank_ != o.rank_) throw std::invalid_argument("connections live on different grids");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  twist_ += o.twist_;
  return *this;
}

LatticeConnection LatticeConnection::operator-(const LatticeConnection& o) const {
  LatticeConnection out = *this;
  out += o.scaled(-1);
  return out;
}

LatticeConnection LatticeConnection::scaled(double c) const {
  LatticeConnection out = *this;
  for (auto& z : out.data_) z *= c;
  out.twist_ *= c;
  return out;
}

HiggsField::HiggsField(FibredGrid grid, int rank) : grid_(grid), rank_(rank) {
  grid_.validate();
  if (rank < 1 || rank > kMaxRank) throw std::invalid_argument("rank must be 1, 2 or 3");
  data_.assign(grid_.node_count() * rank * rank, Complex(0));
}

HiggsField HiggsField::sample(const FibredGrid& grid, int rank,
                              const std::function<LieMatrix(const std::array<double, 7>&)>& fn) {
  HiggsField h(grid, rank);
  parallel_for(grid.node_count(), [&](std::size_t n) { h.set(n, fn(grid.point(n))); });
  return h;
}

LieMatrix HiggsField::get(std::size_t node) const {
  LieMatrix m(rank_, rank_);
  for (int i = 0; i < rank_ * rank_; ++i) m.data()[i] = data_[node * rank_ * rank_ + i];
  return m;
}

void HiggsField::set(std::size_t node, const LieMatrix& m) {
  if (m.rows() != rank_ || m.cols() != rank_) throw std::invalid_argument("matrix size does not match the rank");
  for (int i = 0; i < rank_ * rank_; ++i) data_[node * rank_ * rank_ + i] = m.data()[i];
}

ResidualField::ResidualField(int components_, int rank_, std::size_t nodes_)
    : components(components_), rank(rank_), nodes(nodes_),
      data(nodes_ * components_ * rank_ * rank_, Complex(0)) {}

LieMatrix ResidualField::get(std::size_t node, int c) const {
  LieMatrix m(rank, rank);
  const Complex* p = data.data() + (node * components + c) * rank * rank;
  for (int i = 0; i < rank * rank; ++i) m.data()[i] = p[i];
  return m;
}

void ResidualField::set(std::size_t node, int c, const LieMatrix& m) {
  Complex* p = data.data() + (node * components + c) * rank * rank;
  for (int i = 0; i < rank * rank; ++i) p[i] = m.data()[i];
}

double ResidualField::max_abs() const {
  double m = 0;
  for (const auto& z : data) m = std::max(m, std::abs(z));
  return m;
}

// ---- curvature ----

LieMatrix derivative(const LatticeConnection& A, std::size_t node, int axis, int mu) {
  return Jet(A, node).D(axis, mu);
}

LieMatrix curvature(const LatticeConnection& A, std::size_t node, int mu, int nu) {
  return Jet(A, node).F(mu, nu);
}

std::array<Complex, 3> fibre_pairing(const std::array<std::array<Complex, 4>, 4>& F) {
  std::array<Complex, 3> out{};
  const auto& W = omega_matrices();
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) out[i] += W[i](a, b) * F[a][b];
  return out;
}

std::array<Complex, 4> quaternionic_contraction(const std::array<std::array<Complex, 4>, 3>& X) {
  std::array<Complex, 4> out{};
  const auto& I = fibre_complex_structures();
  for (int i = 0; i < 3; ++i)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) out[b] -= X[i][c] * I[i](c, b);
  return out;
}

namespace {

// Matrix-valued versions of fibre_pairing / quaternionic_contraction.
std::array<LieMatrix, 3> fibre_pairing_m(const std::array<std::array<LieMatrix, 4>, 4>& F, int r) {
  std::array<LieMatrix, 3> out{zero_matrix(r), zero_matrix(r), zero_matrix(r)};
  const auto& W = omega_matrices();
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        if (W[i](a, b) != 0) out[i] += W[i](a, b) * F[a][b];
  return out;
}

std::array<LieMatrix, 4> quaternionic_contraction_m(const std::array<std::array<LieMatrix, 4>, 3>& X, int r) {
  std::array<LieMatrix, 4> out{zero_matrix(r), zero_matrix(r), zero_matrix(r), zero_matrix(r)};
  const auto& I = fibre_complex_structures();
  for (int i = 0; i < 3; ++i)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        if (I[i](c, b) != 0) out[b] -= I[i](c, b) * X[i][c];
  return out;
}

std::array<std::array<LieMatrix, 4>, 4> vertical_curvature(const LatticeConnection& A, std::size_t n) {
  const int r = A.rank();
  const Jet jet(A, n);
  std::array<std::array<LieMatrix, 4>, 4> F;
  for (int a = 0; a < 4; ++a) {
    F[a][a] = zero_matrix(r);
    for (int b = a + 1; b < 4; ++b) {
      F[a][b] = jet.F(3 + a, 3 + b);
      F[b][a] = -F[a][b];
    }
  }
  return F;
}

std::array<std::array<LieMatrix, 4>, 3> mixed_curvature(const LatticeConnection& A, std::size_t n) {
  std::array<std::array<LieMatrix, 4>, 3> X;
  const Jet jet(A, n);
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 4; ++a) X[i][a] = jet.F(i, 3 + a);
  return X;
}

}  // namespace

InstantonResidual instanton_residual(const LatticeConnection& A) {
  const auto& g = A.grid();
  const int r = A.rank();
  InstantonResidual out{ResidualField(3, r, g.node_count()), ResidualField(4, r, g.node_count())};
  if (r == 1) {
    parallel_for(g.node_count(), [&](std::size_t n) {
      const Jet jet(A, n);
      std::array<std::array<Complex, 4>, 4> F{};
      std::array<std::array<Complex, 4>, 3> X{};
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
          F[a][b] = jet.F1(3 + a, 3 + b);
          F[b][a] = -F[a][b];
        }
      for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 4; ++a) X[i][a] = jet.F1(i, 3 + a);
      auto rf = fibre_pairing(F);
      auto rh = quaternionic_contraction(X);
      for (int i = 0; i < 3; ++i) out.fibre.data[n * 3 + i] = rf[i];
      for (int b = 0; b < 4; ++b) out.horiz.data[n * 4 + b] = rh[b];
    });
    return out;
  }
  parallel_for(g.node_count(), [&](std::size_t n) {
    auto rf = fibre_pairing_m(vertical_curvature(A, n), r);
    for (int i = 0; i < 3; ++i) out.fibre.set(n, i, rf[i]);
    auto rh = quaternionic_contraction_m(mixed_curvature(A, n), r);
    for (int b = 0; b < 4; ++b) out.horiz.set(n, b, rh[b]);
  });
  return out;
}

namespace {

// (d_AΦ)_a = ∂_aΦ + [A_a, Φ] along fibre direction a.
LieMatrix covariant_fibre_derivative(const LatticeConnection& A, const HiggsField& Phi, std::size_t n, int a) {
  const int r = Phi.rank();
  LieMatrix d = difference(Phi.grid(), n, 3 + a, [&](std::size_t m) { return Phi.get(m); }, r);
  LieMatrix Aa = A.get(n, 3 + a), P = Phi.get(n);
  return d + Aa * P - P * Aa;
}

void require_same(const LatticeConnection& A, const HiggsField& Phi) {
  if (!(A.grid() == Phi.grid()) || A.rank() != Phi.rank())
    throw std::invalid_argument("connection and Higgs field live on different grids");
}

}  // namespace

InstantonResidual monopole_residual(const LatticeConnection& A, const HiggsField& Phi) {
  require_same(A, Phi);
  InstantonResidual out = instanton_residual(A);
  parallel_for(A.grid().node_count(), [&](std::size_t n) {
    for (int a = 0; a < 4; ++a) out.horiz.set(n, a, out.horiz.get(n, a) + covariant_fibre_derivative(A, Phi, n, a));
  });
  return out;
}

// ---- twisted HYM ----

VerticalTwoForm harmonic_part(const FibredGrid& grid, const std::vector<Eigen::Matrix4d>& per_node, double tol) {
  if (per_node.size() != grid.node_count()) throw std::invalid_argument("two-form field has the wrong number of nodes");
  VerticalTwoForm out;
  const std::size_t nf = grid.fibre_count();
  for (std::size_t b = 0; b < grid.base_count(); ++b) {
    const Eigen::Matrix4d& ref = per_node[b * nf];
    double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
    if ((ref + ref.transpose()).cwiseAbs().maxCoeff() > tol * scale)
      throw NotHarmonicError("two-form is not antisymmetric at base node " + std::to_string(b));
    for (std::size_t f = 1; f < nf; ++f)
      if ((per_node[b * nf + f] - ref).cwiseAbs().maxCoeff() > tol * scale)
        throw NotHarmonicError("two-form varies along the fibre over base node " + std::to_string(b) +
                               " and is not harmonic on the flat torus");
    out.B.push_back(ref);
  }
  return out;
}

ResidualField twisted_hym_residual(const LatticeConnection& A, const VerticalTwoForm& B) {
  const auto& g = A.grid();
  const int r = A.rank();
  if (B.B.size() != g.base_count()) throw std::invalid_argument("two-form has the wrong number of base nodes");
  ResidualField out(3, r, g.node_count());
  const auto& W = omega_matrices();
  parallel_for(g.node_count(), [&](std::size_t n) {
    auto rf = fibre_pairing_m(vertical_curvature(A, n), r);
    const Eigen::Matrix4d& Bn = B.B[n / g.fibre_count()];
    for (int i = 0; i < 3; ++i) {
      double bi = 0;
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) bi += W[i](a, b) * Bn(a, b);
      out.set(n, i, kI / (2 * kPi) * rf[i] - bi * identity_matrix(r));
    }
  });
  return out;
}

double trace_identity_defect(const LatticeConnection& A, const VerticalTwoForm& B) {
  const auto& g = A.grid();
  if (B.B.size() != g.base_count()) throw std::invalid_argument("two-form has the wrong number of base nodes");
  std::vector<double> worst(g.node_count(), 0);
  parallel_for(g.node_count(), [&](std::size_t n) {
    auto F = vertical_curvature(A, n);
    const Eigen::Matrix4d& Bn = B.B[n / g.fibre_count()];
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        Complex c = kI / (2 * kPi * A.rank()) * F[a][b].trace();
        worst[n] = std::max(worst[n], std::abs(c - Bn(a, b)));
      }
  });
  return *std::max_element(worst.begin(), worst.end());
}

std::vector<double> slope_potential(const FibredGrid& grid, const VerticalTwoForm& B,
                                    const std::vector<Eigen::Matrix4d>& h) {
  if (B.B.size() != grid.base_count() || h.size() != grid.base_count())
    throw std::invalid_argument("slope potential needs one value per base node");
  std::vector<double> out(grid.base_count());
  for (std::size_t b = 0; b < out.size(); ++b) {
    const auto& x = B.B[b];
    const auto& y = h[b];
    double w = x(0, 1) * y(2, 3) - x(0, 2) * y(1, 3) + x(0, 3) * y(1, 2) + x(1, 2) * y(0, 3) - x(1, 3) * y(0, 2) +
               x(2, 3) * y(0, 1);
    out[b] = grid.fibre_volume() * w;
  }
  return out;
}

// ---- integration by parts ----

double IbpIdentity::bound() const { return residual_norm + std::sqrt(std::abs(fibre_pairing)); }

IbpIdentity ibp_identity(const LatticeConnection& A, const HiggsField& Phi) {
  require_same(A, Phi);
  if (A.rank() != 1) throw std::invalid_argument("integration by parts identity is implemented for rank 1");
  const auto& g = A.grid();
  const std::size_t N = g.node_count(), nf = g.fibre_count();
  InstantonResidual m = monopole_residual(A, Phi);
  std::vector<Complex> mean(g.base_count());
  for (std::size_t b = 0; b < g.base_count(); ++b) {
    std::vector<double> re(nf), im(nf);
    for (std::size_t f = 0; f < nf; ++f) {
      Complex z = Phi.get(b * nf + f)(0, 0);
      re[f] = z.real();
      im[f] = z.imag();
    }
    mean[b] = Complex(pairwise_sum(re), pairwise_sum(im)) / double(nf);
  }
  auto inner = [](Complex x, Complex y) { return (std::conj(x) * y).real(); };
  // per node: |d_vΦ|², ⟨d_vΦ, m⟩, ⟨Φ, Σ ∂_t ρ_fibre⟩, |m|², |Σ∂_tρ|², |Φ|²
  std::vector<std::array<double, 6>> terms(N);
  parallel_for(N, [&](std::size_t n) {
    auto& t = terms[n];
    t.fill(0);
    for (int a = 0; a < 4; ++a) {
      Complex d = covariant_fibre_derivative(A, Phi, n, a)(0, 0);
      Complex mv = m.horiz.get(n, a)(0, 0);
      t[0] += std::norm(d);
      t[1] += inner(d, mv);
      t[3] += std::norm(mv);
    }
    Complex div(0);
    for (int i = 0; i < 3; ++i)
      div += difference(g, n, i, [&](std::size_t k) { return m.fibre.get(k, i); }, 1)(0, 0);
    Complex p = Phi.get(n)(0, 0);
    t[2] = inner(p, div);
    t[4] = std::norm(div);
    t[5] = std::norm(p - mean[n / nf]);
  });
  std::array<std::vector<double>, 6> weighted;
  for (auto& v : weighted) v.resize(N);
  for (std::size_t n = 0; n < N; ++n) {
    double w = g.base_weight(n / nf) * g.fibre_weight();
    for (int k = 0; k < 6; ++k) weighted[k][n] = w * terms[n][k];
  }
  IbpIdentity id;
  id.dphi_norm2 = pairwise_sum(weighted[0]);
  id.residual_pairing = pairwise_sum(weighted[1]);
  id.fibre_pairing = pairwise_sum(weighted[2]);
  id.residual_norm = std::sqrt(pairwise_sum(weighted[3]));
  id.fibre_term_norm = std::sqrt(pairwise_sum(weighted[4]));
  id.phi_norm = std::sqrt(pairwise_sum(weighted[5]));
  id.defect = id.dphi_norm2 - (id.residual_pairing - id.fibre_pairing);
  return id;
}

double bianchi_defect(const LatticeConnection& A) {
  const auto& g = A.grid();
  const int r = A.rank();
  const std::size_t N = g.node_count();
  // F_μν for μ < ν, 21 components
  int slot[7][7];
  int k = 0;
  for (int mu = 0; mu < 7; ++mu)
    for (int nu = mu + 1; nu < 7; ++nu) slot[mu][nu] = k++;
  ResidualField F(21, r, N);
  parallel_for(N, [&](std::size_t n) {
    const Jet jet(A, n);
    for (int mu = 0; mu < 7; ++mu)
      for (int nu = mu + 1; nu < 7; ++nu) F.set(n, slot[mu][nu], jet.F(mu, nu));
  });
  std::vector<double> worst(N, 0);
  parallel_for(N, [&](std::size_t n) {
    auto DF = [&](int l, int mu, int nu) {
      LieMatrix d = difference(g, n, l, [&](std::size_t m) { return F.get(m, slot[mu][nu]); }, r);
      LieMatrix Al = A.get(n, l), Fn = F.get(n, slot[mu][nu]);
      return LieMatrix(d + Al * Fn - Fn * Al);
    };
    for (int l = 0; l < 7; ++l)
      for (int mu = l + 1; mu < 7; ++mu)
        for (int nu = mu + 1; nu < 7; ++nu) {
          // F_{νλ} = F_{λν} up to sign: the cyclic sum with ordered slots
          LieMatrix s = DF(l, mu, nu) + DF(mu, l, nu) * Complex(-1) + DF(nu, l, mu);
          worst[n] = std::max(worst[n], s.cwiseAbs().maxCoeff());
        }
  });
  return *std::max_element(worst.begin(), worst.end());
}

bool equivalent_up_to_twist(const LatticeConnection& A, const LatticeConnection& B, double tol) {
  if (!(A.grid() == B.grid()) || A.rank() != B.rank()) return false;
  if ((A.twist() - B.twist()).cwiseAbs().maxCoeff() > tol) return false;
  const auto& g = A.grid();
  const int r = A.rank();
  const std::size_t nf = g.fibre_count();
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    for (int a = 0; a < 4; ++a)
      if ((A.get(n, 3 + a) - B.get(n, 3 + a)).cwiseAbs().maxCoeff() > tol) return false;
    std::size_t ref = n - n % nf;
    for (int i = 0; i < 3; ++i) {
      LieMatrix d = A.get(n, i) - B.get(n, i);
      LieMatrix central = d.trace() / double(r) * identity_matrix(r);
      if ((d - central).cwiseAbs().maxCoeff() > tol) return false;
      if ((d - (A.get(ref, i) - B.get(ref, i))).cwiseAbs().maxCoeff() > tol) return false;
    }
  }
  return true;
}

// ---- Chern–Simons ----

ConnectionPath ConnectionPath::from_samples(std::vector<double> times, std::vector<LatticeConnection> samples) {
  if (times.size() != samples.size()) throw std::invalid_argument("path needs one time per sample");
  ConnectionPath p;
  p.times = std::move(times);
  auto shared = std::make_shared<std::vector<LatticeConnection>>(std::move(samples));
  p.at = [shared](std::size_t k) { return (*shared)[k]; };
  return p;
}

ConnectionPath ConnectionPath::from_function(std::vector<double> times,
                                             const std::function<LatticeConnection(double)>& fn) {
  ConnectionPath p;
  p.times = std::move(times);
  auto ts = p.times;
  p.at = [ts, fn](std::size_t k) { return fn(ts[k]); };
  return p;
}

void ConnectionPath::validate() const {
  if (times.size() < 2) throw std::invalid_argument("path needs at least two samples");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("path times must increase");
  if (!at) throw std::invalid_argument("path has no samples");
}

double cs_density_coefficient(int mu, int nu, int rho) {
  const auto& W = omega_matrices();
  double total = 0;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        if (W[i](a, b) == 0) continue;
        std::array<int, 7> idx = {mu, nu, rho, j, k, 3 + a, 3 + b};
        std::array<int, 7> seen{};
        bool ok = true;
        for (int v : idx) ok = ok && ++seen[v] == 1;
        if (!ok) continue;
        int inversions = 0;
        for (int p = 0; p < 7; ++p)
          for (int q = p + 1; q < 7; ++q) inversions += idx[p] > idx[q];
        double sign = inversions % 2 ? -1 : 1;
        // Θ term −W_ab dt_j dt_k dx_a dx_b; λ∧μ = −dt₁₂₃dx₁₂₃₄
        total += sign * -W[i](a, b) * -1;
      }
  }
  return total;
}

namespace {

// Σ_nodes w Σ_{μ<ν, ρ} C_{μνρ} Tr(F_μν ΔA_ρ)
double cs_pairing(const LatticeConnection& A, const LatticeConnection& dA) {
  static const auto table = [] {
    std::array<std::array<std::array<double, 7>, 7>, 7> t{};
    for (int mu = 0; mu < 7; ++mu)
      for (int nu = 0; nu < 7; ++nu)
        for (int rho = 0; rho < 7; ++rho) t[mu][nu][rho] = cs_density_coefficient(mu, nu, rho);
    return t;
  }();
  struct Entry {
    int mu, nu, rho;
    double c;
  };
  static const auto entries = [] {
    std::vector<Entry> e;
    for (int mu = 0; mu < 7; ++mu)
      for (int nu = mu + 1; nu < 7; ++nu)
        for (int rho = 0; rho < 7; ++rho)
          if (table[mu][nu][rho] != 0) e.push_back({mu, nu, rho, table[mu][nu][rho]});
    return e;
  }();
  const auto& g = A.grid();
  std::vector<double> per_node(g.node_count());
  const double wf = g.fibre_weight();
  parallel_for(g.node_count(), [&](std::size_t n) {
    double s = 0;
    const Jet jet(A, n);
    if (A.rank() == 1) {
      const Complex* d = dA.raw().data() + n * kComponents;
      for (const auto& [mu, nu, rho, c] : entries) s += c * (jet.F1(mu, nu) * d[rho]).real();
      per_node[n] = s * wf * g.base_weight(n / g.fibre_count());
      return;
    }
    for (int mu = 0; mu < 7; ++mu)
      for (int nu = mu + 1; nu < 7; ++nu) {
        bool any = false;
        for (int rho = 0; rho < 7; ++rho) any = any || table[mu][nu][rho] != 0;
        if (!any) continue;
        LieMatrix F = jet.F(mu, nu);
        for (int rho = 0; rho < 7; ++rho)
          if (table[mu][nu][rho] != 0) s += table[mu][nu][rho] * (F * dA.get(n, rho)).trace().real();
      }
    per_node[n] = s * wf * g.base_weight(n / g.fibre_count());
  });
  return pairwise_sum(per_node);
}

}  // namespace

double cs_instanton(const ConnectionPath& path) {
  path.validate();
  std::vector<double> pieces;
  LatticeConnection prev = path.at(0);
  for (std::size_t k = 1; k < path.times.size(); ++k) {
    LatticeConnection next = path.at(k);
    if (!(next.grid() == prev.grid()) || next.rank() != prev.rank())
      throw std::invalid_argument("path samples live on different grids");
    if ((next.twist() - prev.twist()).cwiseAbs().maxCoeff() != 0)
      throw std::invalid_argument("path samples must share the bundle twist");
    LatticeConnection dA = next - prev;
    pieces.push_back(0.5 * (cs_pairing(prev, dA) + cs_pairing(next, dA)));
    prev = std::move(next);
  }
  return -pairwise_sum(pieces) / (4 * kPi * kPi);
}

// ---- Fueter ----

const std::array<Eigen::Matrix4d, 3>& fibre_complex_structures() {
  static const std::array<Eigen::Matrix4d, 3> I = [] {
    std::array<Eigen::Matrix4d, 3> out;
    for (int i = 0; i < 3; ++i) out[i] = omega_matrices()[i].transpose();
    return out;
  }();
  return I;
}

std::array<double, 3> FueterSectionGrid::point(std::size_t n) const {
  std::array<int, 3> c = {int(n % dims[0]), int((n / dims[0]) % dims[1]), int(n / (std::size_t(dims[0]) * dims[1]))};
  return {origin[0] + c[0] * spacing[0], origin[1] + c[1] * spacing[1], origin[2] + c[2] * spacing[2]};
}

void FueterSectionGrid::normalize() {
  if (period <= 0) return;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    double v = std::fmod(values.data()[k], period);
    if (v < 0) v += period;
    if (v >= period) v -= period;
    values.data()[k] = v;
  }
}

void FueterSectionGrid::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (dims[i] < 1 || dims[i] == 2) throw std::invalid_argument("section axis needs 1 or at least 3 nodes");
    if (!(spacing[i] > 0)) throw std::invalid_argument("section spacing must be positive");
  }
  if (period < 0) throw std::invalid_argument("period must be nonnegative");
  if (values.cols() != Eigen::Index(node_count())) throw std::invalid_argument("section has the wrong number of nodes");
}

namespace {

Eigen::Vector4d lift(const Eigen::Vector4d& d, double period) {
  if (period <= 0) return d;
  Eigen::Vector4d out;
  for (int a = 0; a < 4; ++a) out(a) = d(a) - period * std::round(d(a) / period);
  return out;
}

// ∂_{t_i}s at node n with nearest-lift differences.
Eigen::Vector4d section_derivative(const FueterSectionGrid& s, std::size_t n, int i) {
  const int N = s.dims[i];
  if (N == 1) return Eigen::Vector4d::Zero();
  std::size_t stride = i == 0 ? 1 : i == 1 ? std::size_t(s.dims[0]) : std::size_t(s.dims[0]) * s.dims[1];
  std::array<int, 3> c = {int(n % s.dims[0]), int((n / s.dims[0]) % s.dims[1]), int(n / (std::size_t(s.dims[0]) * s.dims[1]))};
  const double h = s.spacing[i];
  Eigen::Vector4d v0 = s.values.col(n);
  auto d = [&](std::size_t m) { return lift(s.values.col(m) - v0, s.period); };
  if (c[i] == 0) return (4 * d(n + stride) - d(n + 2 * stride)) / (2 * h);
  if (c[i] == N - 1) return (-4 * d(n - stride) + d(n - 2 * stride)) / (2 * h);
  return (d(n + stride) - d(n - stride)) / (2 * h);
}

double section_weight(const FueterSectionGrid& s, std::size_t n) {
  std::array<int, 3> c = {int(n % s.dims[0]), int((n / s.dims[0]) % s.dims[1]), int(n / (std::size_t(s.dims[0]) * s.dims[1]))};
  double w = 1;
  for (int i = 0; i < 3; ++i) {
    if (s.dims[i] == 1) continue;
    w *= (c[i] == 0 || c[i] == s.dims[i] - 1) ? s.spacing[i] / 2 : s.spacing[i];
  }
  return w;
}

}  // namespace

Eigen::Matrix4Xd fueter_residual(const FueterSectionGrid& s) {
  s.validate();
  Eigen::Matrix4Xd out(4, s.node_count());
  const auto& I = fibre_complex_structures();
  for (std::size_t n = 0; n < s.node_count(); ++n) {
    Eigen::Vector4d v = Eigen::Vector4d::Zero();
    for (int i = 0; i < 3; ++i) v += I[i] * section_derivative(s, n, i);
    out.col(n) = v;
  }
  return out;
}

double cs_associative(const std::vector<FueterSectionGrid>& path, double fibre_volume) {
  if (path.size() < 2) throw std::invalid_argument("path needs at least two sections");
  for (const auto& s : path) {
    s.validate();
    if (s.dims != path[0].dims || s.spacing != path[0].spacing || s.period != path[0].period)
      throw std::invalid_argument("path sections live on different grids");
  }
  const auto& W = omega_matrices();
  const std::size_t N = path[0].node_count();
  std::vector<double> pieces;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    std::vector<double> per_node(N);
    for (std::size_t n = 0; n < N; ++n) {
      Eigen::Vector4d ds = lift(path[k + 1].values.col(n) - path[k].values.col(n), path[0].period);
      double v = 0;
      for (int i = 0; i < 3; ++i) {
        Eigen::Vector4d avg = 0.5 * (section_derivative(path[k], n, i) + section_derivative(path[k + 1], n, i));
        v += avg.dot(W[i] * ds);
      }
      per_node[n] = section_weight(path[0], n) * v;
    }
    pieces.push_back(pairwise_sum(per_node));
  }
  return fibre_volume / (4 * kPi * kPi) * pairwise_sum(pieces);
}

NotFlatError::NotFlatError(std::size_t node, double curvature)
    : std::domain_error("fibrewise curvature " + std::to_string(curvature) + " at node " + std::to_string(node) +
                        " exceeds the flatness tolerance"),
      node_(node), curvature_(curvature) {}

FueterSectionGrid holonomy_section(const LatticeConnection& A, double flat_tol) {
  if (A.rank() != 1) throw std::invalid_argument("holonomy sections are defined for rank 1");
  const auto& g = A.grid();
  const std::size_t nf = g.fibre_count();
  std::vector<double> curv(g.node_count());
  parallel_for(g.node_count(), [&](std::size_t n) {
    double m = 0;
    const Jet jet(A, n);
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) m = std::max(m, std::abs(jet.F1(3 + a, 3 + b)));
    curv[n] = m;
  });
  for (std::size_t n = 0; n < curv.size(); ++n)
    if (curv[n] > flat_tol) throw NotFlatError(n, curv[n]);
  FueterSectionGrid s;
  s.dims = g.base_dims;
  s.spacing = g.base_spacing;
  s.origin = g.base_origin;
  s.period = 1;
  s.values.resize(4, g.base_count());
  for (std::size_t b = 0; b < g.base_count(); ++b)
    for (int a = 0; a < 4; ++a) {
      std::vector<double> v(nf);
      for (std::size_t f = 0; f < nf; ++f) v[f] = A.get(b * nf + f, 3 + a)(0, 0).imag();
      s.values(a, b) = pairwise_sum(v) / double(nf);
    }
  s.normalize();
  return s;
}

// ---- numerics ----

double pairwise_sum(const std::vector<double>& v) {
  std::function<double(std::size_t, std::size_t)> rec = [&](std::size_t lo, std::size_t hi) -> double {
    if (hi - lo <= 8) {
      double s = 0;
      for (std::size_t k = lo; k < hi; ++k) s += v[k];
      return s;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return rec(lo, mid) + rec(mid, hi);
  };
  return rec(0, v.size());
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("correlation needs two equal-length samples");
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / b.size();
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += (a[k] - ma) * (b[k] - mb);
    saa += (a[k] - ma) * (a[k] - ma);
    sbb += (b[k] - mb) * (b[k] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double richardson_constant(double coarse, double fine, double h_coarse, double h_fine) {
  return std::abs(coarse - fine) / (h_coarse * h_coarse - h_fine * h_fine);
}

double observed_order(double e_coarse, double e_fine, double refinement) {
  return std::log(e_coarse / e_fine) / std::log(refinement);
}

// ---- JSON / CSV ----

namespace {

template <std::size_t N, class T>
std::array<T, N> read_array(const Json& j, const std::string& key, const std::string& at, bool integer) {
  const Json& v = require(j, key, at);
  std::string p = pointer_join(at, key);
  require_array(v, p, N);
  std::array<T, N> out{};
  for (std::size_t k = 0; k < N; ++k)
    out[k] = integer ? T(require_int(v[k], pointer_join(p, k))) : T(require_number(v[k], pointer_join(p, k)));
  return out;
}

void check_grid(const FibredGrid& g, const std::string& at) {
  for (int i = 0; i < 3; ++i) {
    if (g.base_dims[i] < 1 || g.base_dims[i] == 2)
      throw SchemaError(at + "/dims/base/" + std::to_string(i), "base axis needs 1 or at least 3 nodes");
    if (!(g.base_spacing[i] > 0)) throw SchemaError(at + "/spacing/" + std::to_string(i), "spacing must be positive");
  }
  for (int a = 0; a < 4; ++a)
    if (g.fibre_dims[a] < 3) throw SchemaError(at + "/dims/fibre/" + std::to_string(a), "fibre axis needs at least 3 nodes");
}

Json matrices_json(const std::vector<Complex>& data, std::size_t per_node, std::size_t nodes) {
  Json arr = Json::array();
  for (std::size_t n = 0; n < nodes; ++n) {
    Json node = Json::array();
    for (std::size_t k = 0; k < per_node; ++k) {
      node.push_back(data[n * per_node + k].real());
      node.push_back(data[n * per_node + k].imag());
    }
    arr.push_back(node);
  }
  return arr;
}

void matrices_from_json(const Json& j, const std::string& at, std::vector<Complex>& data, std::size_t per_node,
                        std::size_t nodes) {
  require_array(j, at, nodes);
  for (std::size_t n = 0; n < nodes; ++n) {
    std::string p = pointer_join(at, n);
    require_array(j[n], p, 2 * per_node);
    for (std::size_t k = 0; k < per_node; ++k)
      data[n * per_node + k] = Complex(require_number(j[n][2 * k], pointer_join(p, 2 * k)),
                                       require_number(j[n][2 * k + 1], pointer_join(p, 2 * k + 1)));
  }
}

}  // namespace

Json grid_to_json(const FibredGrid& g) {
  Json j;
  j["base"] = g.base_dims;
  j["fibre"] = g.fibre_dims;
  return j;
}

FibredGrid fibred_grid_from_json(const Json& j, const std::string& at) {
  FibredGrid g;
  const Json& dims = require(j, "dims", at);
  g.base_dims = read_array<3, int>(dims, "base", pointer_join(at, "dims"), true);
  g.fibre_dims = read_array<4, int>(dims, "fibre", pointer_join(at, "dims"), true);
  if (j.contains("spacing")) g.base_spacing = read_array<3, double>(j, "spacing", at, false);
  if (j.contains("origin")) g.base_origin = read_array<3, double>(j, "origin", at, false);
  check_grid(g, at);
  return g;
}

Json connection_to_json(const LatticeConnection& A) {
  Json j;
  j["dims"] = grid_to_json(A.grid());
  j["spacing"] = A.grid().base_spacing;
  j["origin"] = A.grid().base_origin;
  j["rank"] = A.rank();
  Json tw = Json::array();
  for (int a = 0; a < 4; ++a) {
    Json row = Json::array();
    for (int mu = 0; mu < 7; ++mu) row.push_back(A.twist()(a, mu));
    tw.push_back(row);
  }
  j["twist"] = tw;
  j["nodes"] = matrices_json(A.raw(), std::size_t(kComponents) * A.rank() * A.rank(), A.grid().node_count());
  return j;
}

LatticeConnection connection_from_json(const Json& j) {
  FibredGrid g = fibred_grid_from_json(j, "");
  long long r = require_int(require(j, "rank", ""), "/rank");
  if (r < 1 || r > kMaxRank) throw SchemaError("/rank", "rank must be 1, 2 or 3");
  LatticeConnection A(g, int(r));
  if (j.contains("twist")) {
    require_array(j["twist"], "/twist", 4);
    for (int a = 0; a < 4; ++a) {
      std::string p = pointer_join("/twist", std::size_t(a));
      require_array(j["twist"][a], p, 7);
      for (int mu = 0; mu < 7; ++mu) A.twist()(a, mu) = require_number(j["twist"][a][mu], pointer_join(p, std::size_t(mu)));
    }
  }
  matrices_from_json(require(j, "nodes", ""), "/nodes", A.raw(), std::size_t(kComponents) * r * r, g.node_count());
  return A;
}

Json higgs_to_json(const HiggsField& Phi) {
  Json j;
  j["dims"] = grid_to_json(Phi.grid());
  j["spacing"] = Phi.grid().base_spacing;
  j["origin"] = Phi.grid().base_origin;
  j["rank"] = Phi.rank();
  std::vector<Complex> data(Phi.grid().node_count() * Phi.rank() * Phi.rank());
  for (std::size_t n = 0; n < Phi.grid().node_count(); ++n) {
    LieMatrix m = Phi.get(n);
    for (int k = 0; k < Phi.rank() * Phi.rank(); ++k) data[n * Phi.rank() * Phi.rank() + k] = m.data()[k];
  }
  j["nodes"] = matrices_json(data, std::size_t(Phi.rank()) * Phi.rank(), Phi.grid().node_count());
  return j;
}

HiggsField higgs_from_json(const Json& j) {
  FibredGrid g = fibred_grid_from_json(j, "");
  long long r = require_int(require(j, "rank", ""), "/rank");
  if (r < 1 || r > kMaxRank) throw SchemaError("/rank", "rank must be 1, 2 or 3");
  HiggsField Phi(g, int(r));
  std::vector<Complex> data(g.node_count() * r * r);
  matrices_from_json(require(j, "nodes", ""), "/nodes", data, std::size_t(r * r), g.node_count());
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    LieMatrix m(r, r);
    for (int k = 0; k < r * r; ++k) m.data()[k] = data[n * r * r + k];
    Phi.set(n, m);
  }
  return Phi;
}

Json section_to_json(const FueterSectionGrid& s) {
  Json j;
  j["dims"] = s.dims;
  j["spacing"] = s.spacing;
  j["origin"] = s.origin;
  j["period"] = s.period;
  Json nodes = Json::array();
  for (std::size_t n = 0; n < s.node_count(); ++n)
    nodes.push_back({s.values(0, n), s.values(1, n), s.values(2, n), s.values(3, n)});
  j["nodes"] = nodes;
  return j;
}

FueterSectionGrid section_from_json(const Json& j) {
  FueterSectionGrid s;
  s.dims = read_array<3, int>(j, "dims", "", true);
  for (int i = 0; i < 3; ++i)
    if (s.dims[i] < 1 || s.dims[i] == 2) throw SchemaError("/dims/" + std::to_string(i), "axis needs 1 or at least 3 nodes");
  if (j.contains("spacing")) s.spacing = read_array<3, double>(j, "spacing", "", false);
  for (int i = 0; i < 3; ++i)
    if (!(s.spacing[i] > 0)) throw SchemaError("/spacing/" + std::to_string(i), "spacing must be positive");
  if (j.contains("origin")) s.origin = read_array<3, double>(j, "origin", "", false);
  if (j.contains("period")) s.period = require_number(j["period"], "/period");
  if (s.period < 0) throw SchemaError("/period", "period must be nonnegative");
  const Json& nodes = require(j, "nodes", "");
  require_array(nodes, "/nodes", s.node_count());
  s.values.resize(4, s.node_count());
  for (std::size_t n = 0; n < s.node_count(); ++n) {
    std::string p = pointer_join("/nodes", n);
    require_array(nodes[n], p, 4);
    for (int a = 0; a < 4; ++a) s.values(a, n) = require_number(nodes[n][a], pointer_join(p, std::size_t(a)));
  }
  return s;
}

std::string residual_csv(const FibredGrid& g, const InstantonResidual& r) {
  std::ostringstream os;
  os << "node,base,fibre,rho_fibre_1,rho_fibre_2,rho_fibre_3,rho_horiz_1,rho_horiz_2,rho_horiz_3,rho_horiz_4\n"
     << std::setprecision(17);
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    os << n << ',' << n / g.fibre_count() << ',' << n % g.fibre_count();
    for (int i = 0; i < 3; ++i) os << ',' << frob(r.fibre.get(n, i));
    for (int a = 0; a < 4; ++a) os << ',' << frob(r.horiz.get(n, a));
    os << '\n';
  }
  return os.str();
}

std::string fueter_csv(const FueterSectionGrid& s, const Eigen::Matrix4Xd& d) {
  std::ostringstream os;
  os << "node,t1,t2,t3,D1,D2,D3,D4\n" << std::setprecision(17);
  for (std::size_t n = 0; n < s.node_count(); ++n) {
    auto p = s.point(n);
    os << n << ',' << p[0] << ',' << p[1] << ',' << p[2];
    for (int a = 0; a < 4; ++a) os << ',' << d(a, n);
    os << '\n';
  }
  return os.str();
}

}  // namespace adg2
