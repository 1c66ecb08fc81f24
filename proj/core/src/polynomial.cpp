#include <magbill/errors.hpp>
#include <magbill/polynomial.hpp>

#include <algorithm>
#include <cmath>

namespace magbill {

void BivariatePolynomial::resize(int degree) {
  if (degree <= degree_) return;
  std::vector<double> c(std::size_t(degree + 1) * std::size_t(degree + 1), 0.0);
  for (int i = 0; i <= degree_; ++i)
    for (int j = 0; i + j <= degree_; ++j) c[i * (degree + 1) + j] = c_[index(i, j)];
  c_ = std::move(c);
  degree_ = degree;
}

void BivariatePolynomial::trim() {
  while (degree_ >= 0) {
    bool top_zero = true;
    for (int i = 0; i <= degree_ && top_zero; ++i) top_zero = c_[index(i, degree_ - i)] == 0.0;
    if (!top_zero) break;
    const int d = degree_ - 1;
    std::vector<double> c(std::size_t(d + 1) * std::size_t(d + 1), 0.0);
    for (int i = 0; i <= d; ++i)
      for (int j = 0; i + j <= d; ++j) c[i * (d + 1) + j] = c_[index(i, j)];
    c_ = std::move(c);
    degree_ = d;
  }
}

BivariatePolynomial BivariatePolynomial::constant(double c) { return monomial(0, 0, c); }

BivariatePolynomial BivariatePolynomial::monomial(int i, int j, double c) {
  BivariatePolynomial p;
  p.add_to_coeff(i, j, c);
  return p;
}

BivariatePolynomial BivariatePolynomial::from_terms(const std::vector<Term>& terms) {
  BivariatePolynomial p;
  for (const auto& t : terms) p.add_to_coeff(t.i, t.j, t.c);
  return p;
}

double BivariatePolynomial::coeff(int i, int j) const {
  if (i < 0 || j < 0 || i + j > degree_) return 0.0;
  return c_[index(i, j)];
}

void BivariatePolynomial::add_to_coeff(int i, int j, double c) {
  if (i < 0 || j < 0) throw Error(ErrorCode::InvalidConfig, "negative monomial exponent");
  if (c == 0.0) return;
  resize(i + j);
  c_[index(i, j)] += c;
  trim();
}

std::vector<Term> BivariatePolynomial::terms() const {
  std::vector<Term> out;
  for (int i = 0; i <= degree_; ++i)
    for (int j = 0; i + j <= degree_; ++j)
      if (c_[index(i, j)] != 0.0) out.push_back({i, j, c_[index(i, j)]});
  return out;
}

BivariatePolynomial BivariatePolynomial::dx() const {
  BivariatePolynomial p;
  if (degree_ < 1) return p;
  p.resize(degree_ - 1);
  for (int i = 1; i <= degree_; ++i)
    for (int j = 0; i + j <= degree_; ++j) p.c_[p.index(i - 1, j)] = double(i) * c_[index(i, j)];
  p.trim();
  return p;
}

BivariatePolynomial BivariatePolynomial::dy() const {
  BivariatePolynomial p;
  if (degree_ < 1) return p;
  p.resize(degree_ - 1);
  for (int i = 0; i <= degree_; ++i)
    for (int j = 1; i + j <= degree_; ++j) p.c_[p.index(i, j - 1)] = double(j) * c_[index(i, j)];
  p.trim();
  return p;
}

double BivariatePolynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double c : c_) m = std::max(m, std::abs(c));
  return m;
}

double BivariatePolynomial::magnitude_at(std::complex<double> x, std::complex<double> y) const {
  const double ax = std::abs(x), ay = std::abs(y);
  double acc = 0.0;
  for (int i = 0; i <= degree_; ++i)
    for (int j = 0; i + j <= degree_; ++j) acc += std::abs(c_[index(i, j)]) * std::pow(ax, i) * std::pow(ay, j);
  return acc;
}

std::vector<double> BivariatePolynomial::homogeneous_part(int d) const {
  std::vector<double> l(std::size_t(std::max(d, 0)) + 1, 0.0);
  for (int i = 0; i <= d; ++i) l[i] = coeff(i, d - i);
  return l;
}

BivariatePolynomial& BivariatePolynomial::operator+=(const BivariatePolynomial& o) {
  resize(o.degree_);
  for (int i = 0; i <= o.degree_; ++i)
    for (int j = 0; i + j <= o.degree_; ++j) c_[index(i, j)] += o.c_[o.index(i, j)];
  trim();
  return *this;
}

BivariatePolynomial& BivariatePolynomial::operator-=(const BivariatePolynomial& o) {
  resize(o.degree_);
  for (int i = 0; i <= o.degree_; ++i)
    for (int j = 0; i + j <= o.degree_; ++j) c_[index(i, j)] -= o.c_[o.index(i, j)];
  trim();
  return *this;
}

BivariatePolynomial& BivariatePolynomial::operator*=(double s) {
  for (double& c : c_) c *= s;
  trim();
  return *this;
}

BivariatePolynomial operator*(const BivariatePolynomial& a, const BivariatePolynomial& b) {
  BivariatePolynomial p;
  if (a.is_zero() || b.is_zero()) return p;
  p.resize(a.degree_ + b.degree_);
  for (int i = 0; i <= a.degree_; ++i)
    for (int j = 0; i + j <= a.degree_; ++j) {
      const double ca = a.c_[a.index(i, j)];
      if (ca == 0.0) continue;
      for (int k = 0; k <= b.degree_; ++k)
        for (int l = 0; k + l <= b.degree_; ++l) p.c_[p.index(i + k, j + l)] += ca * b.c_[b.index(k, l)];
    }
  p.trim();
  return p;
}

bool operator==(const BivariatePolynomial& a, const BivariatePolynomial& b) {
  if (a.degree_ != b.degree_) return false;
  for (int i = 0; i <= a.degree_; ++i)
    for (int j = 0; i + j <= a.degree_; ++j)
      if (a.coeff(i, j) != b.coeff(i, j)) return false;
  return true;
}

BivariatePolynomial pow(const BivariatePolynomial& p, int k) {
  BivariatePolynomial out = BivariatePolynomial::constant(1.0);
  for (int i = 0; i < k; ++i) out = out * p;
  return out;
}

BivariatePolynomial affine_substitute(const BivariatePolynomial& p, double sx, double tx, double sy, double ty) {
  const BivariatePolynomial X = sx * BivariatePolynomial::x() + tx;
  const BivariatePolynomial Y = sy * BivariatePolynomial::y() + ty;
  // Horner in X over rows that are Horner in Y.
  BivariatePolynomial acc;
  for (int i = p.degree(); i >= 0; --i) {
    BivariatePolynomial row;
    for (int j = p.degree() - i; j >= 0; --j) row = row * Y + p.coeff(i, j);
    acc = acc * X + row;
  }
  return acc;
}

}  // namespace magbill
