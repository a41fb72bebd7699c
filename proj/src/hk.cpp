#include "adg2/hk.hpp"

#include "adg2/clifford.hpp"
#include "adg2/g2lin.hpp"

namespace adg2 {

HKTriple HKTriple::standard() { return {{omega_matrix(1), omega_matrix(2), omega_matrix(3)}}; }

Rational wedge22(const TwoForm& a, const TwoForm& b) {
  return a(0, 1) * b(2, 3) - a(0, 2) * b(1, 3) + a(0, 3) * b(1, 2) + a(1, 2) * b(0, 3) - a(1, 3) * b(0, 2) +
         a(2, 3) * b(0, 1);
}

TwoForm wedge11(const std::vector<Rational>& u, const std::vector<Rational>& v) {
  TwoForm w(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) w(i, j) = u[i] * v[j] - u[j] * v[i];
  return w;
}

std::vector<Rational> contract(const std::vector<Rational>& X, const TwoForm& w) {
  std::vector<Rational> out(4, Rational(0));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) out[b] += X[a] * w(a, b);
  return out;
}

std::array<TwoForm, 3> asd_basis() {
  std::array<TwoForm, 3> out;
  const int pairs[3][4] = {{0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}};
  for (int i = 0; i < 3; ++i) {
    TwoForm w(4, 4);
    auto [a, b, c, d] = pairs[i];
    w(a, b) = 1;
    w(b, a) = -1;
    w(c, d) = -1;
    w(d, c) = 1;
    out[i] = w;
  }
  return out;
}

namespace {

std::vector<Rational> unit4(int a) {
  std::vector<Rational> e(4, Rational(0));
  e[a] = 1;
  return e;
}

// ι_Y α ∧ ι_Z β ∧ γ on dx1234.
Rational triple_product(int y, int z, const TwoForm& alpha, const TwoForm& beta, const TwoForm& gamma) {
  return wedge22(wedge11(contract(unit4(y), alpha), contract(unit4(z), beta)), gamma);
}

Rational check_relations(const HKTriple& T) {
  Rational mu = wedge22(T.W[0], T.W[0]) / 2;
  if (mu == 0) throw HKRelationError(1, 1);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      if (wedge22(T.W[i], T.W[j]) != (i == j ? 2 * mu : Rational(0))) throw HKRelationError(i + 1, j + 1);
  return mu;
}

}  // namespace

HKMetric metric_from_triple(const HKTriple& T) {
  Rational mu = check_relations(T);
  QMatrix g(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int z = 0; z < 4; ++z) g(y, z) = triple_product(y, z, T.W[0], T.W[1], T.W[2]) / mu;
  return {g, mu};
}

std::array<QMatrix, 3> cyclic_metric_versions(const HKTriple& T) {
  Rational mu = check_relations(T);
  std::array<QMatrix, 3> out;
  for (int c = 0; c < 3; ++c) {
    QMatrix g(4, 4);
    for (int y = 0; y < 4; ++y)
      for (int z = 0; z < 4; ++z) g(y, z) = triple_product(y, z, T.W[c], T.W[(c + 1) % 3], T.W[(c + 2) % 3]) / mu;
    out[c] = g;
  }
  return out;
}

std::array<QMatrix, 3> complex_structures(const HKTriple& T) {
  QMatrix ginv = inverse(metric_from_triple(T).g);
  std::array<QMatrix, 3> I;
  for (int i = 0; i < 3; ++i) I[i] = ginv * T.W[i].transpose();
  return I;
}

VariationDecomposition decompose_variation(const HKTriple& T, const TripleVariation& V) {
  Rational mu = check_relations(T);
  VariationDecomposition d;
  d.coeff = QMatrix(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d.coeff(i, j) = wedge22(V[i], T.W[j]) / (2 * mu);
  d.b = trace(d.coeff) / 3;
  d.a = (d.coeff - d.coeff.transpose()) * Rational(1, 2);
  d.sym_traceless = (d.coeff + d.coeff.transpose()) * Rational(1, 2) - QMatrix::identity(3) * d.b;
  for (int i = 0; i < 3; ++i) {
    d.asd[i] = V[i];
    for (int j = 0; j < 3; ++j) d.asd[i] -= T.W[j] * d.coeff(i, j);
  }
  return d;
}

MetricVariation metric_variation(const HKTriple& T, const TripleVariation& V) {
  HKMetric m = metric_from_triple(T);
  Rational mudot(0);
  for (int i = 0; i < 3; ++i) mudot += wedge22(V[i], T.W[i]);
  mudot /= 3;
  QMatrix gdot(4, 4);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) {
      Rational three = triple_product(x, y, V[0], T.W[1], T.W[2]) + triple_product(x, y, T.W[0], V[1], T.W[2]) +
                       triple_product(x, y, T.W[0], T.W[1], V[2]);
      gdot(x, y) = (three - m.g(x, y) * mudot) / m.mu;
    }
  return {gdot, mudot};
}

TripleVariation recover_form_variation(const HKTriple& T, const QMatrix& gdot) {
  QMatrix g = metric_from_triple(T).g;
  QMatrix ginv = inverse(g);
  auto I = complex_structures(T);
  TripleVariation out;
  for (int i = 0; i < 3; ++i) {
    QMatrix GI = g * I[i];
    TwoForm M(4, 4);
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        if (ginv(j, k) == 0) continue;
        std::vector<Rational> u(4), v(4);
        for (int a = 0; a < 4; ++a) {
          u[a] = GI(a, j);
          v[a] = gdot(k, a);
        }
        M += wedge11(u, v) * ginv(j, k);
      }
    out[i] = M * Rational(-1, 2);
  }
  return out;
}

GMatrix clifford_of_variation(const HKTriple& T, const QMatrix& gdot, int k) {
  if (metric_from_triple(T).g != QMatrix::identity(4))
    throw std::invalid_argument("clifford_of_variation: triple must induce the Euclidean metric");
  QMatrix I = complex_structures(T)[k - 1];
  QMatrix M(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Rational s(0);
      for (int a = 0; a < 4; ++a) s += I(a, i) * gdot(a, j);
      M(i, j) = s / 2;
    }
  return clifford_bilinear(M);
}

CyclicTable cyclic_conventions() {
  return {{
      {0, {{{-1, 1}, {-1, 2}, {-1, 3}}}},
      {1, {{{1, 0}, {1, 3}, {-1, 2}}}},
      {2, {{{-1, 3}, {1, 0}, {1, 1}}}},
      {3, {{{1, 2}, {-1, 1}, {1, 0}}}},
  }};
}

CyclicTable corrupted_cyclic_conventions() {
  CyclicTable t = cyclic_conventions();
  t[2].terms[2].sign = -t[2].terms[2].sign;
  return t;
}

Rational cyclic_residual(const HKTriple& T, const TripleVariation& V, const QMatrix& gdot, const CyclicTable& table) {
  auto I = complex_structures(T);
  auto apply = [&](int op, int y) {
    std::vector<Rational> u(4, Rational(0));
    if (op == 0) {
      u[y] = 1;
    } else {
      for (int a = 0; a < 4; ++a) u[a] = I[op - 1](a, y);
    }
    return u;
  };
  auto pair = [](const std::vector<Rational>& u, int z, const QMatrix& B) {
    Rational s(0);
    for (int a = 0; a < 4; ++a) s += u[a] * B(a, z);
    return s;
  };
  Rational worst(0);
  for (const auto& row : table)
    for (int y = 0; y < 4; ++y)
      for (int z = 0; z < 4; ++z) {
        Rational lhs = pair(apply(row.lhs_op, y), z, gdot);
        Rational rhs(0);
        for (int i = 0; i < 3; ++i) rhs += row.terms[i].sign * pair(apply(row.terms[i].op, y), z, V[i]);
        Rational r = abs(lhs - rhs);
        if (r > worst) worst = r;
      }
  return worst;
}

}  // namespace adg2
