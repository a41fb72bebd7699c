#include "adg2/excalc.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace adg2 {

namespace {

const char* kVarNames[kNumVars] = {"t1", "t2", "t3", "x1", "x2", "x3", "x4"};
const char* kDiffNames[kNumVars] = {"dt1", "dt2", "dt3", "dx1", "dx2", "dx3", "dx4"};

Rational rational_det(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  Rational det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return Rational(0);
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

std::vector<int> mask_bits(Mask m) {
  std::vector<int> bits;
  for (int v = 0; v < kNumVars; ++v)
    if (m & (1u << v)) bits.push_back(v);
  return bits;
}

}  // namespace

// ---- Poly ----

Poly::Poly(const Rational& c) {
  if (c != 0) terms_[Exponent{}] = c;
}

Poly Poly::variable(int v) {
  Exponent e{};
  e[v] = 1;
  return monomial(e, Rational(1));
}

Poly Poly::monomial(const Exponent& e, const Rational& c) {
  Poly p;
  p.add_term(e, c);
  return p;
}

void Poly::add_term(const Exponent& e, const Rational& c) {
  if (c == 0) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exponent{}); }

Rational Poly::constant_term() const {
  auto it = terms_.find(Exponent{});
  return it == terms_.end() ? Rational(0) : it->second;
}

int Poly::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int k : e) s += k;
    d = std::max(d, s);
  }
  return d;
}

Poly Poly::derivative(int v) const {
  Poly out;
  for (const auto& [e, c] : terms_) {
    if (e[v] == 0) continue;
    Exponent f = e;
    f[v] -= 1;
    out.add_term(f, c * e[v]);
  }
  return out;
}

Rational Poly::evaluate(const std::array<Rational, kNumVars>& at) const {
  Rational sum(0);
  for (const auto& [e, c] : terms_) {
    Rational term = c;
    for (int v = 0; v < kNumVars; ++v)
      for (int k = 0; k < e[v]; ++k) term *= at[v];
    sum += term;
  }
  return sum;
}

double Poly::evaluate(const std::array<double, kNumVars>& at) const {
  double sum = 0;
  for (const auto& [e, c] : terms_) {
    double term = c.get_d();
    for (int v = 0; v < kNumVars; ++v) term *= std::pow(at[v], e[v]);
    sum += term;
  }
  return sum;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Poly& Poly::operator*=(const Rational& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      Exponent e;
      for (int v = 0; v < kNumVars; ++v) e[v] = ea[v] + eb[v];
      out.add_term(e, ca * cb);
    }
  return out;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    Rational a = abs(c);
    bool constant = e == Exponent{};
    if (a != 1 || constant) os << a;
    for (int v = 0; v < kNumVars; ++v) {
      if (e[v] == 0) continue;
      os << kVarNames[v];
      if (e[v] > 1) os << "^" << e[v];
    }
  }
  return os.str();
}

// ---- masks ----

int popcount(Mask m) { return std::popcount(static_cast<unsigned>(m)); }

int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int inversions = 0;
  for (int i = 0; i < kNumVars; ++i) {
    if (!(a & (1u << i))) continue;
    // bits of b below i must move past bit i
    inversions += popcount(b & ((1u << i) - 1));
  }
  return (inversions % 2) ? -1 : 1;
}

// ---- BigradedForm ----

BigradedForm BigradedForm::from_mask(Mask m, const Poly& coeff) {
  BigradedForm f(popcount(m));
  f.add_term(m, coeff);
  return f;
}

BigradedForm BigradedForm::basis(const std::vector<int>& I, const std::vector<int>& J, const Poly& coeff) {
  // Build by successive wedging so unsorted lists carry their permutation sign.
  BigradedForm f = scalar(coeff);
  for (int i : I) {
    if (i < 1 || i > kNumBase) throw std::invalid_argument("basis: horizontal index out of range");
    f = wedge(f, from_mask(Mask(1u << var_t(i))));
  }
  for (int a : J) {
    if (a < 1 || a > kNumFibre) throw std::invalid_argument("basis: vertical index out of range");
    f = wedge(f, from_mask(Mask(1u << var_x(a))));
  }
  return f;
}

BigradedForm BigradedForm::scalar(const Poly& p) {
  BigradedForm f(0);
  f.add_term(0, p);
  return f;
}

Poly BigradedForm::coefficient(Mask m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Poly() : it->second;
}

void BigradedForm::add_term(Mask m, const Poly& p) {
  if (popcount(m) != degree_) throw std::invalid_argument("BigradedForm: term degree mismatch");
  if (p.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, p);
  } else {
    it->second += p;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

bool BigradedForm::is_horizontal() const {
  for (const auto& [m, p] : terms_)
    if (m & kFibreMask) return false;
  return true;
}

bool BigradedForm::is_vertical() const {
  for (const auto& [m, p] : terms_)
    if (m & kBaseMask) return false;
  return true;
}

bool BigradedForm::has_bigrade(int p, int q) const {
  for (const auto& [m, c] : terms_)
    if (horizontal_degree(m) != p || vertical_degree(m) != q) return false;
  return true;
}

BigradedForm BigradedForm::component(int p, int q) const {
  BigradedForm out(degree_);
  for (const auto& [m, c] : terms_)
    if (horizontal_degree(m) == p && vertical_degree(m) == q) out.add_term(m, c);
  return out;
}

bool BigradedForm::constant_coefficients() const {
  for (const auto& [m, c] : terms_)
    if (!c.is_constant()) return false;
  return true;
}

BigradedForm& BigradedForm::operator+=(const BigradedForm& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) degree_ = o.degree_;
  if (o.degree_ != degree_) throw std::invalid_argument("BigradedForm: adding forms of different degree");
  for (const auto& [m, p] : o.terms_) add_term(m, p);
  return *this;
}

BigradedForm& BigradedForm::operator-=(const BigradedForm& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) degree_ = o.degree_;
  if (o.degree_ != degree_) throw std::invalid_argument("BigradedForm: subtracting forms of different degree");
  for (const auto& [m, p] : o.terms_) add_term(m, -p);
  return *this;
}

BigradedForm& BigradedForm::operator*=(const Poly& p) {
  std::map<Mask, Poly> out;
  for (const auto& [m, c] : terms_) {
    Poly q = c * p;
    if (!q.is_zero()) out.emplace(m, std::move(q));
  }
  terms_ = std::move(out);
  return *this;
}

bool operator==(const BigradedForm& a, const BigradedForm& b) {
  if (a.is_zero() && b.is_zero()) return true;
  return a.degree_ == b.degree_ && a.terms_ == b.terms_;
}

std::string BigradedForm::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, p] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << p.str() << ")";
    for (int v : mask_bits(m)) os << " " << kDiffNames[v];
  }
  return os.str();
}

// ---- operations ----

BigradedForm wedge(const BigradedForm& a, const BigradedForm& b) {
  BigradedForm out(a.degree() + b.degree());
  for (const auto& [ma, pa] : a.terms())
    for (const auto& [mb, pb] : b.terms()) {
      int s = wedge_sign(ma, mb);
      if (s == 0) continue;
      Poly c = pa * pb;
      if (s < 0) c *= Rational(-1);
      out.add_term(Mask(ma | mb), c);
    }
  return out;
}

BigradedForm exterior_d(const BigradedForm& a) {
  BigradedForm out(a.degree() + 1);
  for (const auto& [m, p] : a.terms())
    for (int v = 0; v < kNumVars; ++v) {
      Mask bit = Mask(1u << v);
      int s = wedge_sign(bit, m);
      if (s == 0) continue;
      Poly c = p.derivative(v);
      if (c.is_zero()) continue;
      if (s < 0) c *= Rational(-1);
      out.add_term(Mask(bit | m), c);
    }
  return out;
}

BigradedForm interior(const std::array<Rational, kNumVars>& v, const BigradedForm& a) {
  if (a.degree() == 0) return BigradedForm(0);
  BigradedForm out(a.degree() - 1);
  for (const auto& [m, p] : a.terms()) {
    auto bits = mask_bits(m);
    for (std::size_t r = 0; r < bits.size(); ++r) {
      if (v[bits[r]] == 0) continue;
      Rational f = v[bits[r]];
      if (r % 2) f = -f;
      out.add_term(Mask(m & ~(1u << bits[r])), p * f);
    }
  }
  return out;
}

Rational evaluate(const BigradedForm& a, const std::vector<std::array<Rational, kNumVars>>& vectors,
                  const std::array<Rational, kNumVars>& at) {
  if (int(vectors.size()) != a.degree()) throw std::invalid_argument("evaluate: wrong number of vectors");
  Rational sum(0);
  for (const auto& [m, p] : a.terms()) {
    auto bits = mask_bits(m);
    std::vector<std::vector<Rational>> mat(bits.size(), std::vector<Rational>(bits.size()));
    for (std::size_t r = 0; r < bits.size(); ++r)
      for (std::size_t c = 0; c < bits.size(); ++c) mat[r][c] = vectors[c][bits[r]];
    sum += p.evaluate(at) * rational_det(std::move(mat));
  }
  return sum;
}

// ---- horizontal distribution ----

Poly HorizontalDistribution::lift_derivative(int i, const Poly& f) const {
  Poly out = f.derivative(var_t(i));
  for (int a = 1; a <= kNumFibre; ++a) {
    const Poly& h = H[i - 1][a - 1];
    if (h.is_zero()) continue;
    out += h * f.derivative(var_x(a));
  }
  return out;
}

Poly HorizontalDistribution::curvature(int i, int j, int a) const {
  return lift_derivative(i, H[j - 1][a - 1]) - lift_derivative(j, H[i - 1][a - 1]);
}

bool HorizontalDistribution::is_flat() const {
  for (int i = 1; i <= kNumBase; ++i)
    for (int j = i + 1; j <= kNumBase; ++j)
      for (int a = 1; a <= kNumFibre; ++a)
        if (!curvature(i, j, a).is_zero()) return false;
  return true;
}

namespace {

// d e^a in the adapted coframe.
BigradedForm d_adapted_coframe(int a, const HorizontalDistribution& H) {
  BigradedForm out(2);
  for (int i = 1; i <= kNumBase; ++i) {
    const Poly& h = H.H[i - 1][a - 1];
    if (h.is_zero()) continue;
    BigradedForm dti = BigradedForm::dt(i);
    BigradedForm dh(1);
    for (int j = 1; j <= kNumBase; ++j) dh.add_term(Mask(1u << var_t(j)), H.lift_derivative(j, h));
    for (int b = 1; b <= kNumFibre; ++b) dh.add_term(Mask(1u << var_x(b)), h.derivative(var_x(b)));
    out -= wedge(dh, dti);
  }
  return out;
}

// The full d of one adapted-frame term, expressed in the adapted coframe.
BigradedForm d_adapted_term(Mask m, const Poly& f, const HorizontalDistribution& H) {
  BigradedForm out(popcount(m) + 1);
  BigradedForm basis = BigradedForm::from_mask(m);
  BigradedForm df(1);
  for (int i = 1; i <= kNumBase; ++i) df.add_term(Mask(1u << var_t(i)), H.lift_derivative(i, f));
  for (int a = 1; a <= kNumFibre; ++a) df.add_term(Mask(1u << var_x(a)), f.derivative(var_x(a)));
  out += wedge(df, basis);
  auto bits = mask_bits(m);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    int v = bits[k];
    if (v < kNumBase) continue;
    Mask prefix = 0, suffix = 0;
    for (std::size_t r = 0; r < bits.size(); ++r) {
      if (r < k) prefix |= Mask(1u << bits[r]);
      if (r > k) suffix |= Mask(1u << bits[r]);
    }
    BigradedForm de = d_adapted_coframe(v - 2, H);
    if (de.is_zero()) continue;
    BigradedForm piece = wedge(wedge(BigradedForm::from_mask(prefix), de), BigradedForm::from_mask(suffix));
    piece *= (k % 2) ? -f : f;
    out += piece;
  }
  return out;
}

}  // namespace

SplitD split_d(const BigradedForm& a, const HorizontalDistribution& H) {
  SplitD s{BigradedForm(a.degree() + 1), BigradedForm(a.degree() + 1), BigradedForm(a.degree() + 1)};
  for (const auto& [m, f] : a.terms()) {
    int p = horizontal_degree(m);
    BigradedForm full = d_adapted_term(m, f, H);
    for (const auto& [mo, c] : full.terms()) {
      int shift = horizontal_degree(mo) - p;
      if (shift == 0)
        s.d_f.add_term(mo, c);
      else if (shift == 1)
        s.d_H.add_term(mo, c);
      else if (shift == 2)
        s.F_H.add_term(mo, c);
      else
        throw std::logic_error("split_d: unexpected bigrade shift");
    }
  }
  return s;
}

BigradedForm to_coordinate_frame(const BigradedForm& a, const HorizontalDistribution& H) {
  std::array<BigradedForm, kNumFibre> e;
  for (int b = 1; b <= kNumFibre; ++b) {
    e[b - 1] = BigradedForm::dx(b);
    for (int i = 1; i <= kNumBase; ++i)
      if (!H.H[i - 1][b - 1].is_zero()) e[b - 1] -= BigradedForm::dt(i) * H.H[i - 1][b - 1];
  }
  BigradedForm out(a.degree());
  for (const auto& [m, f] : a.terms()) {
    BigradedForm term = BigradedForm::scalar(f);
    for (int v : mask_bits(m))
      term = wedge(term, v < kNumBase ? BigradedForm::from_mask(Mask(1u << v)) : e[v - kNumBase]);
    out += term;
  }
  return out;
}

// ---- Hodge stars ----

BigradedForm star4(const BigradedForm& a) {
  if (!a.is_vertical()) throw std::invalid_argument("star4: form has horizontal components");
  BigradedForm out(4 - a.degree());
  for (const auto& [m, p] : a.terms()) {
    Mask c = Mask(kFibreMask & ~m);
    out.add_term(c, wedge_sign(m, c) > 0 ? p : -p);
  }
  return out;
}

BigradedForm star3(const BigradedForm& a) {
  if (!a.is_horizontal()) throw std::invalid_argument("star3: form has vertical components");
  BigradedForm out(3 - a.degree());
  for (const auto& [m, p] : a.terms()) {
    Mask c = Mask(kBaseMask & ~m);
    // vol₃ = −dt123
    out.add_term(c, wedge_sign(m, c) > 0 ? -p : p);
  }
  return out;
}

std::map<int, BigradedForm> star7_scaling(const BigradedForm& a) {
  std::map<int, BigradedForm> out;
  const Mask full = Mask(kBaseMask | kFibreMask);
  for (const auto& [m, p] : a.terms()) {
    Mask c = Mask(full & ~m);
    int exponent = 2 - vertical_degree(m);
    auto it = out.try_emplace(exponent, BigradedForm(7 - a.degree())).first;
    it->second.add_term(c, wedge_sign(m, c) > 0 ? -p : p);
  }
  return out;
}

BigradedForm star7(const BigradedForm& a, const Rational& eps) {
  if (eps <= 0) throw std::invalid_argument("star7: ε must be positive; use star7_scaling for the formal limit");
  BigradedForm out(7 - a.degree());
  for (const auto& [k, f] : star7_scaling(a)) {
    Rational s(1);
    for (int n = 0; n < std::abs(k); ++n) s *= eps;
    if (k < 0) s = 1 / s;
    out += f * Poly(s);
  }
  return out;
}

// ---- standard forms ----

BigradedForm standard_omega(int i) {
  switch (i) {
    case 1: return BigradedForm::basis({}, {1, 2}) + BigradedForm::basis({}, {3, 4});
    case 2: return BigradedForm::basis({}, {1, 3}) + BigradedForm::basis({}, {4, 2});
    case 3: return BigradedForm::basis({}, {1, 4}) + BigradedForm::basis({}, {2, 3});
    default: throw std::invalid_argument("standard_omega: index must be 1, 2 or 3");
  }
}

BigradedForm lambda_form() { return -BigradedForm::basis({1, 2, 3}, {}); }
BigradedForm mu_form() { return BigradedForm::basis({}, {1, 2, 3, 4}); }

BigradedForm theta_from_omegas(const std::array<BigradedForm, 3>& omega) {
  BigradedForm out(4);
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    out -= wedge(omega[i], BigradedForm::basis({j + 1, k + 1}, {}));
  }
  return out;
}

BigradedForm omega_total(const std::array<BigradedForm, 3>& omega) {
  BigradedForm out(3);
  for (int i = 0; i < 3; ++i) out += wedge(omega[i], BigradedForm::dt(i + 1));
  return out;
}

FibrationData FibrationData::product() {
  return from_triple({standard_omega(1), standard_omega(2), standard_omega(3)}, HorizontalDistribution::trivial());
}

FibrationData FibrationData::from_triple(const std::array<BigradedForm, 3>& omega, const HorizontalDistribution& H) {
  FibrationData F;
  F.omega = omega;
  F.lambda = lambda_form();
  F.mu = mu_form();
  F.theta = theta_from_omegas(omega);
  F.H = H;
  return F;
}

bool DonaldsonResiduals::differential_zero() const {
  return df_omega.is_zero() && dH_omega.is_zero() && df_lambda.is_zero() && dH_mu.is_zero() && df_theta.is_zero() &&
         dH_theta.is_zero();
}

bool DonaldsonResiduals::algebraic_zero() const {
  for (const auto& row : hk)
    for (const auto& f : row)
      if (!f.is_zero()) return false;
  return true;
}

DonaldsonResiduals donaldson_residuals(const FibrationData& F) {
  DonaldsonResiduals r;
  BigradedForm w = omega_total(F.omega);
  SplitD sw = split_d(w, F.H);
  r.df_omega = sw.d_f;
  r.dH_omega = sw.d_H;
  r.df_lambda = split_d(F.lambda, F.H).d_f;
  r.dH_mu = split_d(F.mu, F.H).d_H;
  SplitD st = split_d(F.theta, F.H);
  r.df_theta = st.d_f;
  r.dH_theta = st.d_H;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      r.hk[i][j] = wedge(F.omega[i], F.omega[j]);
      if (i == j) r.hk[i][j] -= F.mu * Poly(2);
    }
  return r;
}

// ---- JSON ----

Json form_to_json(const BigradedForm& a) {
  Json terms = Json::array();
  for (const auto& [m, p] : a.terms()) {
    Json I = Json::array(), J = Json::array();
    for (int v : mask_bits(m)) {
      if (v < kNumBase)
        I.push_back(v + 1);
      else
        J.push_back(v - kNumBase + 1);
    }
    Json poly = Json::array();
    for (const auto& [e, c] : p.terms())
      poly.push_back({{"exp", e}, {"num", integer_to_json(c.get_num())}, {"den", integer_to_json(c.get_den())}});
    terms.push_back({{"I", I}, {"J", J}, {"poly", poly}});
  }
  return {{"degree", a.degree()}, {"terms", terms}};
}

BigradedForm form_from_json(const Json& j, const std::string& at) {
  long long degree = require_int(require(j, "degree", at), pointer_join(at, "degree"));
  if (degree < 0 || degree > kNumVars) throw SchemaError(pointer_join(at, "degree"), "degree out of range");
  BigradedForm out{static_cast<int>(degree)};
  std::string tp = pointer_join(at, "terms");
  const Json& terms = require_array(require(j, "terms", at), tp);
  for (std::size_t n = 0; n < terms.size(); ++n) {
    std::string np = pointer_join(tp, n);
    std::vector<int> idx[2];
    const char* keys[2] = {"I", "J"};
    const int limits[2] = {kNumBase, kNumFibre};
    for (int s = 0; s < 2; ++s) {
      std::string kp = pointer_join(np, keys[s]);
      const Json& arr = require_array(require(terms[n], keys[s], np), kp);
      for (std::size_t k = 0; k < arr.size(); ++k) {
        long long v = require_int(arr[k], pointer_join(kp, k));
        if (v < 1 || v > limits[s]) throw SchemaError(pointer_join(kp, k), "index out of range");
        if (!idx[s].empty() && v <= idx[s].back()) throw SchemaError(pointer_join(kp, k), "indices must be strictly increasing");
        idx[s].push_back(int(v));
      }
    }
    if (int(idx[0].size() + idx[1].size()) != degree) throw SchemaError(np, "term degree does not match form degree");
    Poly poly;
    std::string pp = pointer_join(np, "poly");
    const Json& monos = require_array(require(terms[n], "poly", np), pp);
    for (std::size_t k = 0; k < monos.size(); ++k) {
      std::string mp = pointer_join(pp, k);
      const Json& ex = require_array(require(monos[k], "exp", mp), pointer_join(mp, "exp"), kNumVars);
      Exponent e;
      for (int v = 0; v < kNumVars; ++v) {
        long long x = require_int(ex[v], pointer_join(pointer_join(mp, "exp"), std::size_t(v)));
        if (x < 0) throw SchemaError(pointer_join(pointer_join(mp, "exp"), std::size_t(v)), "negative exponent");
        e[v] = int(x);
      }
      mpz_class num = integer_from_json(require(monos[k], "num", mp), pointer_join(mp, "num"));
      mpz_class den = integer_from_json(require(monos[k], "den", mp), pointer_join(mp, "den"));
      if (den == 0) throw SchemaError(pointer_join(mp, "den"), "zero denominator");
      Rational c(num, den);
      c.canonicalize();
      poly += Poly::monomial(e, c);
    }
    out += BigradedForm::basis(idx[0], idx[1], poly);
  }
  return out;
}

}  // namespace adg2
