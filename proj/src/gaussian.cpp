#include "adg2/gaussian.hpp"

#include <sstream>

namespace adg2 {

GaussQ& GaussQ::operator*=(const GaussQ& o) {
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

GaussQ& GaussQ::operator/=(const GaussQ& o) {
  Rational n = o.norm2();
  if (n == 0) throw std::domain_error("GaussQ: division by zero");
  *this *= o.conj();
  re /= n;
  im /= n;
  return *this;
}

GaussQ operator+(GaussQ a, const GaussQ& b) { return a += b; }
GaussQ operator-(GaussQ a, const GaussQ& b) { return a -= b; }
GaussQ operator-(const GaussQ& a) { return GaussQ(-a.re, -a.im); }
GaussQ operator*(GaussQ a, const GaussQ& b) { return a *= b; }
GaussQ operator/(GaussQ a, const GaussQ& b) { return a /= b; }
bool operator==(const GaussQ& a, const GaussQ& b) { return a.re == b.re && a.im == b.im; }

std::ostream& operator<<(std::ostream& os, const GaussQ& z) { return os << to_string(z); }

std::string to_string(const GaussQ& z) {
  std::ostringstream os;
  if (z.im == 0) {
    os << z.re;
  } else if (z.re == 0) {
    os << z.im << "i";
  } else {
    os << "(" << z.re << (z.im < 0 ? "" : "+") << z.im << "i)";
  }
  return os.str();
}

GMatrix to_gaussian(const QMatrix& m) {
  GMatrix g(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) g(i, j) = GaussQ(m(i, j));
  return g;
}

}  // namespace adg2
