#include "adg2/clifford.hpp"

#include <array>

namespace adg2 {

GMatrix pauli(int i) {
  const GaussQ I = GaussQ::i();
  switch (i) {
    case 0: return GMatrix(2, 2, {0, 1, 1, 0});
    case 1: return GMatrix(2, 2, {0, -I, I, 0});
    case 2: return GMatrix(2, 2, {1, 0, 0, -1});
    default: throw std::invalid_argument("pauli: index must be 0, 1 or 2");
  }
}

GMatrix gamma_b(int i) { return pauli(i) * (-GaussQ::i()); }

GMatrix gamma_x(int a) {
  static const std::array<GMatrix, 4> cache = [] {
    std::array<GMatrix, 4> A = {GMatrix::identity(2), pauli(0) * GaussQ::i(), pauli(1) * GaussQ::i(),
                                pauli(2) * (-GaussQ::i())};
    std::array<GMatrix, 4> c;
    for (int k = 0; k < 4; ++k) {
      c[k] = GMatrix(4, 4);
      c[k].set_block(0, 2, A[k]);
      c[k].set_block(2, 0, -A[k].adjoint());
    }
    return c;
  }();
  if (a < 0 || a > 3) throw std::invalid_argument("gamma_x: index must be 0..3");
  return cache[a];
}

GMatrix chirality_x() {
  GMatrix g(4, 4);
  g(0, 0) = -1;
  g(1, 1) = -1;
  g(2, 2) = 1;
  g(3, 3) = 1;
  return g;
}

GMatrix proj_plus_x() {
  GMatrix p(4, 4);
  p(0, 0) = 1;
  p(1, 1) = 1;
  return p;
}

GMatrix proj_minus_x() {
  GMatrix p(4, 4);
  p(2, 2) = 1;
  p(3, 3) = 1;
  return p;
}

GMatrix clifford_two_form(const QMatrix& F) {
  GMatrix out(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      if (F(a, b) != 0) out += gamma_x(a) * gamma_x(b) * GaussQ(F(a, b));
  return out;
}

GMatrix clifford_bilinear(const QMatrix& M) {
  GMatrix out(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (M(a, b) != 0) out += gamma_x(a) * gamma_x(b) * GaussQ(M(a, b));
  return out;
}

}  // namespace adg2
