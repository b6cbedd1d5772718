#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rcl/errors.hpp"

namespace rcl {

/// Exponent triple (i, j, k) of the monomial X0^i X1^j X2^k.
struct MultiIndex {
  int i = 0;
  int j = 0;
  int k = 0;

  int degree() const { return i + j + k; }
  auto operator<=>(const MultiIndex&) const = default;
};

/// Number of monomials of degree d in three variables, (d+1)(d+2)/2.
constexpr std::size_t monomial_count(int d) {
  return static_cast<std::size_t>(d + 1) * static_cast<std::size_t>(d + 2) / 2;
}

/// Position of a multi-index in the canonical ordering (i descending, then j
/// descending). Throws DomainError when the index does not sum to d.
std::size_t monomial_offset(int d, MultiIndex idx);
MultiIndex monomial_at(int d, std::size_t offset);

/// A homogeneous polynomial of degree d in three complex variables, stored in
/// the monomial basis (Kostlan weights already multiplied in).
template <typename Scalar>
class BasicHomogeneousPoly3 {
 public:
  using Complex = std::complex<Scalar>;
  using Point = Eigen::Matrix<Complex, 3, 1>;
  using Hessian = Eigen::Matrix<Complex, 3, 3>;

  BasicHomogeneousPoly3() = default;
  explicit BasicHomogeneousPoly3(int degree)
      : degree_(degree), coeffs_(monomial_count(degree), Complex(0)) {
    if (degree < 0) throw DomainError("polynomial degree must be non-negative");
  }

  int degree() const { return degree_; }
  std::size_t size() const { return coeffs_.size(); }

  Complex& operator[](MultiIndex idx) { return coeffs_[monomial_offset(degree_, idx)]; }
  const Complex& operator[](MultiIndex idx) const {
    return coeffs_[monomial_offset(degree_, idx)];
  }
  Complex& coeff(std::size_t offset) { return coeffs_[offset]; }
  const Complex& coeff(std::size_t offset) const { return coeffs_[offset]; }
  std::span<const Complex> coefficients() const { return coeffs_; }
  std::span<Complex> coefficients() { return coeffs_; }

  Complex operator()(const Point& x) const {
    Complex value;
    jet(x, &value, nullptr, nullptr);
    return value;
  }

  Point gradient(const Point& x) const {
    Point g;
    jet(x, nullptr, &g, nullptr);
    return g;
  }

  Hessian hessian(const Point& x) const {
    Hessian h;
    jet(x, nullptr, nullptr, &h);
    return h;
  }

  /// Value, gradient and Hessian in one pass over the coefficients. Any of
  /// the outputs may be null.
  void jet(const Point& x, Complex* value, Point* grad, Hessian* hess) const {
    const int d = degree_;
    std::vector<Complex> pw(3 * static_cast<std::size_t>(d + 1));
    for (int m = 0; m < 3; ++m) {
      Complex p(1);
      for (int e = 0; e <= d; ++e) {
        pw[m * (d + 1) + e] = p;
        p *= x[m];
      }
    }
    auto power = [&](int m, int e) -> Complex {
      return e < 0 ? Complex(0) : pw[m * (d + 1) + e];
    };
    Complex v(0);
    Point g = Point::Zero();
    Hessian h = Hessian::Zero();
    std::size_t offset = 0;
    for (int i = d; i >= 0; --i) {
      for (int j = d - i; j >= 0; --j, ++offset) {
        const int k = d - i - j;
        const Complex c = coeffs_[offset];
        if (c == Complex(0)) continue;
        const int e[3] = {i, j, k};
        if (value) v += c * power(0, i) * power(1, j) * power(2, k);
        if (grad || hess) {
          for (int a = 0; a < 3; ++a) {
            if (e[a] == 0) continue;
            Complex term = c * Scalar(e[a]);
            for (int m = 0; m < 3; ++m) term *= power(m, e[m] - (m == a ? 1 : 0));
            g[a] += term;
          }
        }
        if (hess) {
          for (int a = 0; a < 3; ++a) {
            for (int b = a; b < 3; ++b) {
              int f[3] = {e[0], e[1], e[2]};
              Complex term = c * Scalar(f[a]);
              --f[a];
              term *= Scalar(f[b]);
              --f[b];
              if (f[0] < 0 || f[1] < 0 || f[2] < 0) continue;
              term *= power(0, f[0]) * power(1, f[1]) * power(2, f[2]);
              h(a, b) += term;
              if (a != b) h(b, a) += term;
            }
          }
        }
      }
    }
    if (value) *value = v;
    if (grad) *grad = g;
    if (hess) *hess = h;
  }

  BasicHomogeneousPoly3& operator*=(Complex s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }

  bool operator==(const BasicHomogeneousPoly3&) const = default;

 private:
  int degree_ = 0;
  std::vector<Complex> coeffs_;
};

using HomogeneousPoly3 = BasicHomogeneousPoly3<double>;

template <typename Scalar>
BasicHomogeneousPoly3<Scalar> operator+(const BasicHomogeneousPoly3<Scalar>& a,
                                        const BasicHomogeneousPoly3<Scalar>& b) {
  if (a.degree() != b.degree()) throw DomainError("cannot add polynomials of different degree");
  BasicHomogeneousPoly3<Scalar> r = a;
  for (std::size_t n = 0; n < r.size(); ++n) r.coeff(n) += b.coeff(n);
  return r;
}

template <typename Scalar>
BasicHomogeneousPoly3<Scalar> operator*(std::complex<Scalar> s, BasicHomogeneousPoly3<Scalar> p) {
  p *= s;
  return p;
}

/// Exact product by multi-index convolution.
template <typename Scalar>
BasicHomogeneousPoly3<Scalar> operator*(const BasicHomogeneousPoly3<Scalar>& a,
                                        const BasicHomogeneousPoly3<Scalar>& b) {
  const int da = a.degree();
  const int db = b.degree();
  BasicHomogeneousPoly3<Scalar> r(da + db);
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (a.coeff(p) == std::complex<Scalar>(0)) continue;
    const MultiIndex ia = monomial_at(da, p);
    for (std::size_t q = 0; q < b.size(); ++q) {
      const MultiIndex ib = monomial_at(db, q);
      r[{ia.i + ib.i, ia.j + ib.j, ia.k + ib.k}] += a.coeff(p) * b.coeff(q);
    }
  }
  return r;
}

/// The polynomial Y -> P(U Y).
HomogeneousPoly3 compose_linear(const HomogeneousPoly3& p, const Eigen::Matrix3cd& u);

/// A single monomial c * X0^i X1^j X2^k.
HomogeneousPoly3 monomial(MultiIndex idx, std::complex<double> c = 1.0);

/// Identifies one reproducible draw: the same (seed, stream) always yields
/// the same coefficients.
struct EnsembleSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// sqrt((d+2)! / (2 i! j! k!)), evaluated through log-gamma.
double kostlan_weight(int d, MultiIndex idx);

/// Draws P = sum a_I w_I X^I with a_I i.i.d. standard complex Gaussians
/// (E|a|^2 = 1).
HomogeneousPoly3 sample_kostlan(int d, EnsembleSeed seed);

/// Euclidean norm of the raw Gaussian vector a_I = coeff_I / w_I.
double kostlan_norm(const HomogeneousPoly3& p);

/// |P(x)| / (kostlan_norm(P) * sqrt(N_d) * |x|^d), which is at most 1 by
/// Cauchy-Schwarz. Used as the scale-free "distance to the curve" measure.
double normalized_value(const HomogeneousPoly3& p, const Eigen::Vector3cd& x);

/// Same normalization applied to the gradient norm (divided by d as well).
double normalized_gradient(const HomogeneousPoly3& p, const Eigen::Vector3cd& x);

/// Q_eps = P1 * P2 + eps * Q. Requires deg Q = deg P1 + deg P2.
HomogeneousPoly3 degenerate_family(const HomogeneousPoly3& p1, const HomogeneousPoly3& p2,
                                   const HomogeneousPoly3& q, double eps);

/// Text format: a header line `degree d`, then one line `i j k re im` per
/// monomial with 17 significant digits.
void write_polynomial(std::ostream& out, const HomogeneousPoly3& p);
HomogeneousPoly3 read_polynomial(std::istream& in);

}  // namespace rcl
