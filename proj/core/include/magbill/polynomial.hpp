#pragma once

#include <magbill/vec2.hpp>

#include <complex>
#include <vector>

namespace magbill {

struct Term {
  int i = 0;  // power of x
  int j = 0;  // power of y
  double c = 0.0;
};

/// Real polynomial sum c_ij x^i y^j with i + j <= degree, stored densely.
/// The degree is trimmed so that the top homogeneous part is nonzero; the
/// zero polynomial has degree -1.
class BivariatePolynomial {
 public:
  BivariatePolynomial() = default;

  static BivariatePolynomial constant(double c);
  static BivariatePolynomial monomial(int i, int j, double c = 1.0);
  static BivariatePolynomial x() { return monomial(1, 0); }
  static BivariatePolynomial y() { return monomial(0, 1); }
  static BivariatePolynomial from_terms(const std::vector<Term>& terms);

  int degree() const { return degree_; }
  bool is_zero() const { return degree_ < 0; }
  double coeff(int i, int j) const;
  void add_to_coeff(int i, int j, double c);
  std::vector<Term> terms() const;

  template <class T>
  T eval(T x, T y) const {
    T acc{};
    for (int i = degree_; i >= 0; --i) {
      T row{};
      for (int j = degree_ - i; j >= 0; --j) row = row * y + T(c_[index(i, j)]);
      acc = acc * x + row;
    }
    return acc;
  }
  double operator()(double x, double y) const { return eval(x, y); }
  double operator()(Vec2 p) const { return eval(p.x, p.y); }
  std::complex<double> operator()(std::complex<double> x, std::complex<double> y) const { return eval(x, y); }

  BivariatePolynomial dx() const;
  BivariatePolynomial dy() const;

  double max_abs_coeff() const;
  /// sum |c_ij| |x|^i |y|^j: the scale against which cancellation at (x, y) is judged.
  double magnitude_at(std::complex<double> x, std::complex<double> y) const;

  /// Homogeneous part of total degree `d`, as coefficients l_i of x^i y^(d-i), i = 0..d.
  std::vector<double> homogeneous_part(int d) const;

  BivariatePolynomial& operator+=(const BivariatePolynomial& o);
  BivariatePolynomial& operator-=(const BivariatePolynomial& o);
  BivariatePolynomial& operator*=(double s);

  friend BivariatePolynomial operator+(BivariatePolynomial a, const BivariatePolynomial& b) { return a += b; }
  friend BivariatePolynomial operator-(BivariatePolynomial a, const BivariatePolynomial& b) { return a -= b; }
  friend BivariatePolynomial operator-(BivariatePolynomial a) { return a *= -1.0; }
  friend BivariatePolynomial operator*(BivariatePolynomial a, double s) { return a *= s; }
  friend BivariatePolynomial operator*(double s, BivariatePolynomial a) { return a *= s; }
  friend BivariatePolynomial operator+(BivariatePolynomial a, double s) { return a += constant(s); }
  friend BivariatePolynomial operator+(double s, BivariatePolynomial a) { return a += constant(s); }
  friend BivariatePolynomial operator-(BivariatePolynomial a, double s) { return a -= constant(s); }
  friend BivariatePolynomial operator-(double s, const BivariatePolynomial& a) { return constant(s) - a; }
  friend BivariatePolynomial operator*(const BivariatePolynomial& a, const BivariatePolynomial& b);

  friend bool operator==(const BivariatePolynomial& a, const BivariatePolynomial& b);

 private:
  int index(int i, int j) const { return i * (degree_ + 1) + j; }
  void resize(int degree);
  void trim();

  int degree_ = -1;
  std::vector<double> c_;  // (degree+1)^2, entries with i + j > degree are zero
};

BivariatePolynomial pow(const BivariatePolynomial& p, int k);

/// p(a x + b, c y + d) style substitution: returns q(x, y) = p(sx * x + tx, sy * y + ty).
BivariatePolynomial affine_substitute(const BivariatePolynomial& p, double sx, double tx, double sy, double ty);

}  // namespace magbill
