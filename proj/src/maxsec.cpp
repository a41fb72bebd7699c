#include "adg2/maxsec.hpp"

#include <Eigen/Sparse>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "adg2/parallel.hpp"

namespace adg2 {

using Frame = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// ---- pairing ----

Pairing319 Pairing319::k3_lattice() {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(kH2Dim, kH2Dim);
  for (int k = 0; k < 3; ++k) Q(2 * k, 2 * k + 1) = Q(2 * k + 1, 2 * k) = 1;
  // Cartan matrix of E8 (Bourbaki labelling), negated.
  const int edges[7][2] = {{0, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}};
  for (int b = 0; b < 2; ++b) {
    int off = 6 + 8 * b;
    for (int i = 0; i < 8; ++i) Q(off + i, off + i) = -2;
    for (const auto& e : edges) Q(off + e[0], off + e[1]) = Q(off + e[1], off + e[0]) = 1;
  }
  return {Q};
}

void Pairing319::validate() const {
  if (Q.rows() != kH2Dim || Q.cols() != kH2Dim) throw std::invalid_argument("pairing must be 22×22");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("pairing is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  const auto& ev = es.eigenvalues();
  double scale = ev.cwiseAbs().maxCoeff();
  int pos = 0, neg = 0;
  for (int k = 0; k < ev.size(); ++k) {
    if (ev(k) > 1e-12 * scale) ++pos;
    else if (ev(k) < -1e-12 * scale) ++neg;
  }
  if (pos != 3 || neg != 19)
    throw std::invalid_argument("pairing has signature (" + std::to_string(pos) + "," + std::to_string(neg) + "), expected (3,19)");
}

Eigen::MatrixXd adapted_basis(const Eigen::MatrixXd& Q) {
  Pairing319{Q}.validate();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  Eigen::MatrixXd B(kH2Dim, kH2Dim);
  // eigenvalues ascending: 19 negative then 3 positive
  for (int k = 0; k < 3; ++k) B.col(k) = es.eigenvectors().col(19 + k) / std::sqrt(es.eigenvalues()(19 + k));
  for (int k = 0; k < 19; ++k) B.col(3 + k) = es.eigenvectors().col(k) / std::sqrt(-es.eigenvalues()(k));
  return B;
}

Eigen::MatrixXd positive_frame(const Eigen::MatrixXd& Q) { return adapted_basis(Q).leftCols(3); }

// ---- grid ----

std::array<int, 3> PositiveSectionGrid::coords(std::size_t n) const {
  int i1 = int(n % dims[0]);
  int i2 = int((n / dims[0]) % dims[1]);
  int i3 = int(n / (std::size_t(dims[0]) * dims[1]));
  return {i1, i2, i3};
}

bool PositiveSectionGrid::is_boundary(std::size_t n) const {
  auto c = coords(n);
  for (int d = 0; d < 3; ++d)
    if (c[d] == 0 || c[d] == dims[d] - 1) return true;
  return false;
}

std::array<double, 3> PositiveSectionGrid::point(std::size_t n) const {
  auto c = coords(n);
  return {origin[0] + c[0] * spacing[0], origin[1] + c[1] * spacing[1], origin[2] + c[2] * spacing[2]};
}

double PositiveSectionGrid::weight(std::size_t n) const {
  auto c = coords(n);
  double w = 1;
  for (int d = 0; d < 3; ++d) w *= (c[d] == 0 || c[d] == dims[d] - 1) ? spacing[d] / 2 : spacing[d];
  return w;
}

void PositiveSectionGrid::validate() const {
  for (int d = 0; d < 3; ++d) {
    if (dims[d] < 3) throw std::invalid_argument("grid needs at least 3 nodes per axis");
    if (!(spacing[d] > 0)) throw std::invalid_argument("grid spacing must be positive");
  }
  Pairing319{Q}.validate();
  if (values.rows() != kH2Dim || std::size_t(values.cols()) != node_count())
    throw std::invalid_argument("grid values must be 22 × node_count");
}

NotPositiveError::NotPositiveError(std::size_t node, std::array<int, 3> at)
    : std::domain_error("Gram matrix not positive definite at node (" + std::to_string(at[0]) + "," +
                        std::to_string(at[1]) + "," + std::to_string(at[2]) + ")"),
      node_(node), at_(at) {}

namespace {

struct Stencil {
  std::size_t plus, minus;
  double coeff;  // D u = coeff · (u[plus] − u[minus])
};

Stencil stencil(const PositiveSectionGrid& s, std::size_t n, int axis) {
  auto c = s.coords(n);
  std::size_t stride = axis == 0 ? 1 : axis == 1 ? std::size_t(s.dims[0]) : std::size_t(s.dims[0]) * s.dims[1];
  double h = s.spacing[axis];
  if (c[axis] == 0) return {n + stride, n, 1 / h};
  if (c[axis] == s.dims[axis] - 1) return {n, n - stride, 1 / h};
  return {n + stride, n - stride, 1 / (2 * h)};
}

Frame frame_of(const PositiveSectionGrid& s, const Eigen::MatrixXd& field, std::size_t n) {
  Frame A(kH2Dim, 3);
  for (int i = 0; i < 3; ++i) {
    Stencil st = stencil(s, n, i);
    A.col(i) = st.coeff * (field.col(st.plus) - field.col(st.minus));
  }
  return A;
}

// Tetrahedron of the Kuhn subdivision: the vertex path v0 → v1 → v2 → v3 steps once along each axis,
// so each column of the (constant) derivative is a single edge difference.
struct Element {
  std::array<Stencil, 3> d;
  double weight;
  std::size_t corner;  // v0
};

std::vector<Element> elements(const PositiveSectionGrid& s) {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  const std::size_t stride[3] = {1, std::size_t(s.dims[0]), std::size_t(s.dims[0]) * s.dims[1]};
  const double w = s.spacing[0] * s.spacing[1] * s.spacing[2] / 6;
  std::vector<Element> out;
  out.reserve(6 * std::size_t(s.dims[0] - 1) * (s.dims[1] - 1) * (s.dims[2] - 1));
  for (int i3 = 0; i3 + 1 < s.dims[2]; ++i3)
    for (int i2 = 0; i2 + 1 < s.dims[1]; ++i2)
      for (int i1 = 0; i1 + 1 < s.dims[0]; ++i1)
        for (const auto& p : perms) {
          Element e;
          e.weight = w;
          e.corner = s.index(i1, i2, i3);
          std::size_t v = e.corner;
          for (int k = 0; k < 3; ++k) {
            std::size_t next = v + stride[p[k]];
            e.d[p[k]] = {next, v, 1 / s.spacing[p[k]]};
            v = next;
          }
          out.push_back(e);
        }
  return out;
}

Frame element_frame(const Element& e, const Eigen::MatrixXd& field) {
  Frame A(kH2Dim, 3);
  for (int i = 0; i < 3; ++i) A.col(i) = e.d[i].coeff * (field.col(e.d[i].plus) - field.col(e.d[i].minus));
  return A;
}

// Adds the adjoint of the element derivative applied to per-element covectors C[e] (22×3) into out.
void scatter_transpose(const std::vector<Element>& els, const std::vector<Frame>& C, Eigen::MatrixXd& out) {
  for (std::size_t k = 0; k < els.size(); ++k)
    for (int i = 0; i < 3; ++i) {
      const Stencil& st = els[k].d[i];
      out.col(st.plus) += st.coeff * C[k].col(i);
      out.col(st.minus) -= st.coeff * C[k].col(i);
    }
}

void zero_boundary(const PositiveSectionGrid& s, Eigen::MatrixXd& g) {
  for (std::size_t n = 0; n < s.node_count(); ++n)
    if (s.is_boundary(n)) g.col(n).setZero();
}

struct ElementData {
  Frame A;   // ∂_i h
  Frame QA;  // Q ∂_i h
  Eigen::Matrix3d G, Ginv, P;
  double f;  // det(G)^{1/3}
};

void check_nodes(const PositiveSectionGrid& s) {
  std::vector<char> bad(s.node_count(), 0);
  parallel_for(s.node_count(), [&](std::size_t n) {
    Frame A = frame_of(s, s.values, n);
    Eigen::Matrix3d G = A.transpose() * s.Q * A;
    Eigen::LLT<Eigen::Matrix3d> llt(G);
    bad[n] = llt.info() != Eigen::Success;
  });
  for (std::size_t n = 0; n < bad.size(); ++n)
    if (bad[n]) throw NotPositiveError(n, s.coords(n));
}

// Throws NotPositiveError at the first node, or the corner of the first element, where G fails to be positive.
std::vector<ElementData> element_data(const PositiveSectionGrid& s, const std::vector<Element>& els) {
  check_nodes(s);
  std::vector<ElementData> out(els.size());
  std::vector<char> bad(els.size(), 0);
  parallel_for(els.size(), [&](std::size_t k) {
    ElementData& d = out[k];
    d.A = element_frame(els[k], s.values);
    d.QA = s.Q * d.A;
    d.G = d.A.transpose() * d.QA;
    Eigen::LLT<Eigen::Matrix3d> llt(d.G);
    if (llt.info() != Eigen::Success) {
      bad[k] = 1;
      return;
    }
    d.Ginv = llt.solve(Eigen::Matrix3d::Identity());
    d.f = std::cbrt(d.G.determinant());
    d.P = d.f / 3 * d.Ginv;
  });
  for (std::size_t k = 0; k < bad.size(); ++k)
    if (bad[k]) throw NotPositiveError(els[k].corner, s.coords(els[k].corner));
  return out;
}

Eigen::MatrixXd gradient_of(const PositiveSectionGrid& s, const std::vector<Element>& els,
                            const std::vector<ElementData>& data) {
  std::vector<Frame> C(data.size());
  parallel_for(data.size(), [&](std::size_t k) { C[k] = 2 * els[k].weight * data[k].QA * data[k].P; });
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(kH2Dim, s.node_count());
  scatter_transpose(els, C, g);
  zero_boundary(s, g);
  return g;
}

double area_of(const std::vector<Element>& els, const std::vector<ElementData>& data) {
  double a = 0;
  for (std::size_t k = 0; k < data.size(); ++k) a += els[k].weight * data[k].f;
  return a;
}

}  // namespace

Frame derivative_frame(const PositiveSectionGrid& s, std::size_t n) { return frame_of(s, s.values, n); }

std::vector<Eigen::Matrix3d> gram_matrices(const PositiveSectionGrid& s) {
  std::vector<Eigen::Matrix3d> G(s.node_count());
  for (std::size_t n = 0; n < G.size(); ++n) {
    Frame A = frame_of(s, s.values, n);
    G[n] = A.transpose() * s.Q * A;
  }
  return G;
}

double min_eig_G(const PositiveSectionGrid& s) {
  double m = std::numeric_limits<double>::infinity();
  auto bottom = [](const Eigen::Matrix3d& G) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(G, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };
  for (const auto& G : gram_matrices(s)) m = std::min(m, bottom(G));
  for (const auto& e : elements(s)) {
    Frame A = element_frame(e, s.values);
    m = std::min(m, bottom(A.transpose() * s.Q * A));
  }
  return m;
}

// Evaluated in extended precision: finite differences of area at small steps are roundoff limited otherwise.
double area(const PositiveSectionGrid& s) {
  auto els = elements(s);
  element_data(s, els);  // positivity checks
  using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const LMat Q = s.Q.cast<long double>();
  std::vector<long double> f(els.size());
  parallel_for(els.size(), [&](std::size_t k) {
    LMat A = element_frame(els[k], s.values).cast<long double>();
    Eigen::Matrix<long double, 3, 3> G = A.transpose() * (Q * A);
    f[k] = els[k].weight * std::cbrt(G.determinant());
  });
  long double a = 0;
  for (long double x : f) a += x;
  return double(a);
}

Eigen::MatrixXd grad_area(const PositiveSectionGrid& s) {
  auto els = elements(s);
  return gradient_of(s, els, element_data(s, els));
}

namespace {

Eigen::MatrixXd hessian_apply(const PositiveSectionGrid& s, const std::vector<Element>& els,
                              const std::vector<ElementData>& data, const Eigen::MatrixXd& direction) {
  Eigen::MatrixXd dir = direction;
  zero_boundary(s, dir);
  std::vector<Frame> C(data.size());
  parallel_for(data.size(), [&](std::size_t k) {
    const ElementData& d = data[k];
    Frame Adot = element_frame(els[k], dir);
    Eigen::Matrix3d dG = Adot.transpose() * d.QA;
    dG += dG.transpose().eval();
    double df = (d.P * dG).trace();
    Eigen::Matrix3d dP = (df * d.Ginv - d.f * d.Ginv * dG * d.Ginv) / 3;
    C[k] = 2 * els[k].weight * (d.QA * dP + s.Q * Adot * d.P);
  });
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(kH2Dim, s.node_count());
  scatter_transpose(els, C, out);
  zero_boundary(s, out);
  return out;
}

}  // namespace

Eigen::MatrixXd hessian_vector(const PositiveSectionGrid& s, const Eigen::MatrixXd& direction) {
  auto els = elements(s);
  return hessian_apply(s, els, element_data(s, els), direction);
}

double grad_inf_norm(const Eigen::MatrixXd& g) { return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff(); }

double grad_majorant_norm(const PositiveSectionGrid& s, const Eigen::MatrixXd& g) {
  Eigen::MatrixXd Qinv = s.Q.inverse();
  double worst = 0;
  for (std::size_t n = 0; n < s.node_count(); ++n) {
    if (s.is_boundary(n)) continue;
    Frame A = frame_of(s, s.values, n);
    Eigen::Matrix3d G = A.transpose() * s.Q * A;
    Eigen::VectorXd gn = g.col(n);
    Eigen::Vector3d Ag = A.transpose() * gn;
    double q = 2 * Ag.dot(G.ldlt().solve(Ag)) - gn.dot(Qinv * gn);
    worst = std::max(worst, std::sqrt(std::max(q, 0.0)));
  }
  return worst;
}

// ---- solver ----

namespace {

std::vector<std::size_t> interior_nodes(const PositiveSectionGrid& s) {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < s.node_count(); ++n)
    if (!s.is_boundary(n)) out.push_back(n);
  return out;
}

Eigen::VectorXd pack(const Eigen::MatrixXd& field, const std::vector<std::size_t>& nodes) {
  Eigen::VectorXd v(kH2Dim * nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) v.segment(kH2Dim * k, kH2Dim) = field.col(nodes[k]);
  return v;
}

Eigen::MatrixXd unpack(const Eigen::VectorXd& v, const std::vector<std::size_t>& nodes, std::size_t count) {
  Eigen::MatrixXd field = Eigen::MatrixXd::Zero(kH2Dim, count);
  for (std::size_t k = 0; k < nodes.size(); ++k) field.col(nodes[k]) = v.segment(kH2Dim * k, kH2Dim);
  return field;
}

// Matrix-free Hessian on the packed interior unknowns.
struct HessianOperator {
  const PositiveSectionGrid* s;
  const std::vector<Element>* els;
  const std::vector<ElementData>* data;
  const std::vector<std::size_t>* nodes;
  Eigen::VectorXd operator*(const Eigen::VectorXd& v) const {
    return pack(hessian_apply(*s, *els, *data, unpack(v, *nodes, s->node_count())), *nodes);
  }
};

// (2/3)|Q| ⊗ K on interior unknowns, K the piecewise-linear stiffness matrix.
class LaplacePreconditioner {
 public:
  LaplacePreconditioner(const PositiveSectionGrid& s, const std::vector<Element>& els,
                        const std::vector<std::size_t>& nodes) {
    std::vector<long> slot(s.node_count(), -1);
    for (std::size_t k = 0; k < nodes.size(); ++k) slot[nodes[k]] = long(k);
    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& e : els)
      for (const auto& st : e.d) {
        long a = slot[st.plus], b = slot[st.minus];
        double w = e.weight * st.coeff * st.coeff;
        if (a >= 0) trip.emplace_back(a, a, w);
        if (b >= 0) trip.emplace_back(b, b, w);
        if (a >= 0 && b >= 0) {
          trip.emplace_back(a, b, -w);
          trip.emplace_back(b, a, -w);
        }
      }
    Eigen::SparseMatrix<double> L(long(nodes.size()), long(nodes.size()));
    L.setFromTriplets(trip.begin(), trip.end());
    llt_.compute(L);
    L_ = L;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.Q);
    abs_q_inv_ = es.eigenvectors() * es.eigenvalues().cwiseAbs().cwiseInverse().asDiagonal() *
                 es.eigenvectors().transpose() * 1.5;
    abs_q_ = es.eigenvectors() * es.eigenvalues().cwiseAbs().asDiagonal() * es.eigenvectors().transpose() * (2.0 / 3);
    count_ = nodes.size();
  }
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    Eigen::Map<const Eigen::MatrixXd> V(v.data(), kH2Dim, long(count_));
    Eigen::MatrixXd Y = abs_q_ * V * L_;
    return Eigen::Map<const Eigen::VectorXd>(Y.data(), Y.size());
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& v) const {
    Eigen::Map<const Eigen::MatrixXd> V(v.data(), kH2Dim, long(count_));
    Eigen::MatrixXd Y = abs_q_inv_ * V;
    Eigen::MatrixXd Z = llt_.solve(Y.transpose()).transpose();
    return Eigen::Map<const Eigen::VectorXd>(Z.data(), Z.size());
  }

 private:
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
  Eigen::SparseMatrix<double> L_;
  Eigen::MatrixXd abs_q_inv_, abs_q_;
  std::size_t count_ = 0;
};

struct Evaluation {
  bool positive = false;
  double area = 0;
  Eigen::MatrixXd grad;
  std::vector<ElementData> data;
};

Evaluation evaluate(const PositiveSectionGrid& s, const std::vector<Element>& els) {
  Evaluation e;
  try {
    e.data = element_data(s, els);
  } catch (const NotPositiveError&) {
    return e;
  }
  e.positive = true;
  e.area = area_of(els, e.data);
  e.grad = gradient_of(s, els, e.data);
  return e;
}

}  // namespace

namespace {

// Preconditioned CG for (−H + μM) x = b. Returns false on non-positive curvature.
bool damped_cg(const HessianOperator& H, const LaplacePreconditioner& M, double mu, const Eigen::VectorXd& b,
               Eigen::VectorXd& x, int max_iter, double tol) {
  x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b, z = M.solve(r), p = z;
  double rz = r.dot(z);
  const double b_norm = b.norm();
  if (b_norm == 0) return true;
  for (int k = 0; k < max_iter; ++k) {
    Eigen::VectorXd Ap = -(H * p) + mu * M.apply(p);
    double curv = p.dot(Ap);
    if (curv <= 0) return false;
    double a = rz / curv;
    x += a * p;
    r -= a * Ap;
    if (r.norm() <= tol * b_norm) return true;
    z = M.solve(r);
    double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return true;
}

}  // namespace

SolveResult solve_dirichlet(const PositiveSectionGrid& init, const SolveOptions& opt) {
  init.validate();
  SolveResult res;
  res.grid = init;
  const auto els = elements(res.grid);
  Evaluation cur = evaluate(res.grid, els);
  if (!cur.positive) element_data(res.grid, els);  // rethrows with the offending node
  auto nodes = interior_nodes(res.grid);
  LaplacePreconditioner precond(res.grid, els, nodes);
  double mu = 0;
  const double mu_max = 1e12;
  // Area differences below this are roundoff; acceptance then falls back to decrease of ‖grad‖².
  const double area_noise = 1e-13 * std::max(1.0, std::abs(cur.area));
  for (int iter = 0;; ++iter) {
    double r = grad_inf_norm(cur.grad);
    res.iterations = iter;
    res.residual = r;
    HessianOperator H{&res.grid, &els, &cur.data, &nodes};
    Eigen::VectorXd g = pack(cur.grad, nodes);

    // inexact Newton: loose linear solves far from the solution
    const double forcing = std::max(opt.linear_tol, std::min(0.1, g.norm()));
    // Damped Newton: solve (−H + μM) δ = grad, adapting μ to the ratio of actual to predicted gain.
    Eigen::VectorXd x;
    Evaluation next;
    PositiveSectionGrid trial;
    double step_norm = std::numeric_limits<double>::infinity();
    bool accepted = false, lost_positivity = false, small = false, undamped = false;
    // Near a critical point the undamped Newton increment decides convergence.
    if (r <= opt.tol && damped_cg(H, precond, 0, g, x, opt.linear_max_iter, opt.linear_tol)) {
      step_norm = x.cwiseAbs().maxCoeff();
      small = step_norm <= opt.step_tol;
      undamped = true;
      mu = 0;
    }
    for (int attempt = 0; !small && attempt < 60 && mu <= mu_max; ++attempt) {
      if (attempt == 0 && undamped) {
        // reuse the increment computed above
      } else if (!damped_cg(H, precond, mu, g, x, opt.linear_max_iter, forcing)) {
        mu = std::max(4 * mu, 1e-8);
        continue;
      }
      step_norm = x.cwiseAbs().maxCoeff();
      double predicted = g.dot(x) + 0.5 * x.dot(H * x);
      trial = res.grid;
      trial.values += unpack(x, nodes, res.grid.node_count());
      next = evaluate(trial, els);
      lost_positivity = !next.positive;
      if (next.positive) {
        double actual = next.area - cur.area;
        bool ok = std::abs(predicted) < area_noise ? next.grad.squaredNorm() < cur.grad.squaredNorm()
                                                   : actual > 1e-4 * predicted;
        if (ok) {
          if (std::abs(predicted) < area_noise || actual > 0.75 * predicted) mu /= 4;
          if (mu < 1e-12) mu = 0;
          accepted = true;
          break;
        }
      }
      mu = std::max(4 * mu, 1e-8);
    }
    res.history.push_back({iter, cur.area, r, min_eig_G(res.grid), step_norm});
    if (small) {
      res.converged = true;
      return res;
    }
    if (iter >= opt.max_iter) {
      res.diagnostic = "maximum iterations reached";
      return res;
    }
    if (!accepted) {
      res.diagnostic = lost_positivity ? "positivity lost at minimum step" : "no ascent step found";
      return res;
    }
    res.grid = std::move(trial);
    cur = std::move(next);
  }
}

SolveResult solve_dirichlet(const PositiveSectionGrid& boundary, const PositiveSectionGrid& init, const SolveOptions& opt) {
  if (boundary.dims != init.dims) throw std::invalid_argument("boundary and initial grids differ in shape");
  PositiveSectionGrid g = init;
  for (std::size_t n = 0; n < g.node_count(); ++n)
    if (g.is_boundary(n)) g.values.col(n) = boundary.values.col(n);
  return solve_dirichlet(g, opt);
}

std::string history_csv(const std::vector<SolveRecord>& history) {
  std::ostringstream os;
  os << "iter,area,grad_inf_norm,min_eig_G\n" << std::setprecision(17);
  for (const auto& r : history) os << r.iter << ',' << r.area << ',' << r.grad_inf_norm << ',' << r.min_eig_G << '\n';
  return os.str();
}

// ---- isometries ----

bool is_isometry(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& Psi, double tol) {
  if (Psi.rows() != Q.rows() || Psi.cols() != Q.cols()) return false;
  double scale = std::max(1.0, Psi.cwiseAbs().maxCoeff() * Psi.cwiseAbs().maxCoeff() * Q.cwiseAbs().maxCoeff());
  return (Psi.transpose() * Q * Psi - Q).cwiseAbs().maxCoeff() <= tol * scale * Q.rows();
}

PositiveSectionGrid dualize(const PositiveSectionGrid& s, const Eigen::MatrixXd& Psi) {
  if (!is_isometry(s.Q, Psi)) throw std::invalid_argument("Psi is not an isometry of the pairing");
  PositiveSectionGrid out = s;
  out.values = Psi * s.values;
  return out;
}

Eigen::MatrixXd random_isometry(const Eigen::MatrixXd& Q, std::mt19937_64& rng, double max_rapidity) {
  Eigen::MatrixXd B = adapted_basis(Q);
  std::normal_distribution<double> normal;
  auto random_orthogonal = [&](int n) {
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    return Eigen::MatrixXd(qr.householderQ());
  };
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(kH2Dim, kH2Dim);
  P.topLeftCorner(3, 3) = random_orthogonal(3);
  P.bottomRightCorner(19, 19) = random_orthogonal(19);
  std::uniform_int_distribution<int> pos(0, 2), neg(3, 21);
  std::uniform_real_distribution<double> rap(-max_rapidity, max_rapidity);
  for (int k = 0; k < 3; ++k) {
    int p = pos(rng), q = neg(rng);
    double r = rap(rng);
    Eigen::MatrixXd boost = Eigen::MatrixXd::Identity(kH2Dim, kH2Dim);
    boost(p, p) = boost(q, q) = std::cosh(r);
    boost(p, q) = boost(q, p) = std::sinh(r);
    P = boost * P;
  }
  return B * P * B.inverse();
}

BaseMetric base_metric(const PositiveSectionGrid& s) {
  check_nodes(s);
  BaseMetric m;
  for (const auto& G : gram_matrices(s)) {
    Eigen::Matrix3d g = G / 2;
    m.g.push_back(g);
    m.lambda_density.push_back(std::sqrt(g.determinant()));
  }
  return m;
}

// ---- fixtures ----

PositiveSectionGrid affine_grid(const Eigen::MatrixXd& Q, std::array<int, 3> dims, std::array<double, 3> spacing,
                                const Eigen::VectorXd& h0, const Eigen::MatrixXd& V) {
  PositiveSectionGrid s;
  s.dims = dims;
  s.spacing = spacing;
  s.Q = Q;
  s.values.resize(kH2Dim, s.node_count());
  for (std::size_t n = 0; n < s.node_count(); ++n) {
    auto t = s.point(n);
    s.values.col(n) = h0 + V * Eigen::Vector3d(t[0], t[1], t[2]);
  }
  s.validate();
  return s;
}

PositiveSectionGrid graphical_grid(const Eigen::MatrixXd& Q, std::array<int, 3> dims, std::array<double, 3> spacing,
                                   double amplitude) {
  Eigen::MatrixXd B = adapted_basis(Q);
  PositiveSectionGrid s;
  s.dims = dims;
  s.spacing = spacing;
  s.Q = Q;
  s.values.resize(kH2Dim, s.node_count());
  for (std::size_t n = 0; n < s.node_count(); ++n) {
    auto t = s.point(n);
    Eigen::VectorXd y(kH2Dim);
    y << t[0], t[1], t[2], Eigen::VectorXd::Zero(19);
    for (int k = 1; k <= 19; ++k) y(2 + k) = amplitude * std::sin(k * t[0] + t[1]) * std::cos(t[2] - k);
    s.values.col(n) = B * y;
  }
  s.validate();
  return s;
}

// ---- JSON ----

Json matrix_to_json(const Eigen::MatrixXd& M) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& at, long rows, long cols) {
  require_array(j, at, std::size_t(rows));
  Eigen::MatrixXd M(rows, cols);
  for (long r = 0; r < rows; ++r) {
    std::string pr = pointer_join(at, std::size_t(r));
    require_array(j[r], pr, std::size_t(cols));
    for (long c = 0; c < cols; ++c) M(r, c) = require_number(j[r][c], pointer_join(pr, std::size_t(c)));
  }
  return M;
}

Json grid_to_json(const PositiveSectionGrid& s) {
  Json j;
  j["dims"] = s.dims;
  j["spacing"] = s.spacing;
  j["origin"] = s.origin;
  j["Q"] = matrix_to_json(s.Q);
  Json nodes = Json::array();
  for (std::size_t n = 0; n < s.node_count(); ++n) {
    Json v = Json::array();
    for (int k = 0; k < kH2Dim; ++k) v.push_back(s.values(k, n));
    nodes.push_back(v);
  }
  j["nodes"] = nodes;
  return j;
}

PositiveSectionGrid grid_from_json(const Json& j) {
  PositiveSectionGrid s;
  const Json& dims = require_array(require(j, "dims", ""), "/dims", 3);
  const Json& spacing = require_array(require(j, "spacing", ""), "/spacing", 3);
  for (int d = 0; d < 3; ++d) {
    std::string pd = pointer_join("/dims", std::size_t(d));
    long long n = require_int(dims[d], pd);
    if (n < 3 || n > 1000) throw SchemaError(pd, "grid size must lie in [3, 1000]");
    s.dims[d] = int(n);
    std::string ps = pointer_join("/spacing", std::size_t(d));
    s.spacing[d] = require_number(spacing[d], ps);
    if (!(s.spacing[d] > 0)) throw SchemaError(ps, "spacing must be positive");
  }
  if (j.contains("origin")) {
    const Json& origin = require_array(j["origin"], "/origin", 3);
    for (int d = 0; d < 3; ++d) s.origin[d] = require_number(origin[d], pointer_join("/origin", std::size_t(d)));
  }
  s.Q = matrix_from_json(require(j, "Q", ""), "/Q", kH2Dim, kH2Dim);
  try {
    Pairing319{s.Q}.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError("/Q", e.what());
  }
  const Json& nodes = require_array(require(j, "nodes", ""), "/nodes", s.node_count());
  s.values.resize(kH2Dim, s.node_count());
  for (std::size_t n = 0; n < s.node_count(); ++n) {
    std::string pn = pointer_join("/nodes", n);
    require_array(nodes[n], pn, kH2Dim);
    for (int k = 0; k < kH2Dim; ++k) s.values(k, n) = require_number(nodes[n][k], pointer_join(pn, std::size_t(k)));
  }
  return s;
}

}  // namespace adg2
