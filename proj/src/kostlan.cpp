#include "rcl/kostlan.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

namespace rcl {

std::size_t monomial_offset(int d, MultiIndex idx) {
  if (idx.i < 0 || idx.j < 0 || idx.k < 0 || idx.degree() != d) {
    throw DomainError("multi-index does not sum to the polynomial degree");
  }
  const std::size_t a = static_cast<std::size_t>(d - idx.i);
  return a * (a + 1) / 2 + static_cast<std::size_t>(d - idx.i - idx.j);
}

MultiIndex monomial_at(int d, std::size_t offset) {
  // Invert offset = a(a+1)/2 + (a - j) with a = d - i.
  std::size_t a = 0;
  while ((a + 1) * (a + 2) / 2 <= offset) ++a;
  const int i = d - static_cast<int>(a);
  const int j = static_cast<int>(a) - static_cast<int>(offset - a * (a + 1) / 2);
  return {i, j, d - i - j};
}

HomogeneousPoly3 monomial(MultiIndex idx, std::complex<double> c) {
  HomogeneousPoly3 p(idx.degree());
  p[idx] = c;
  return p;
}

HomogeneousPoly3 compose_linear(const HomogeneousPoly3& p, const Eigen::Matrix3cd& u) {
  const int d = p.degree();
  // Linear forms L_m(Y) = sum_n U(m, n) Y_n and their powers.
  std::vector<std::vector<HomogeneousPoly3>> powers(3);
  for (int m = 0; m < 3; ++m) {
    HomogeneousPoly3 lin(1);
    lin[{1, 0, 0}] = u(m, 0);
    lin[{0, 1, 0}] = u(m, 1);
    lin[{0, 0, 1}] = u(m, 2);
    powers[m].push_back(monomial({0, 0, 0}));
    for (int e = 1; e <= d; ++e) powers[m].push_back(powers[m].back() * lin);
  }
  HomogeneousPoly3 r(d);
  for (std::size_t n = 0; n < p.size(); ++n) {
    const auto c = p.coeff(n);
    if (c == std::complex<double>(0)) continue;
    const MultiIndex idx = monomial_at(d, n);
    HomogeneousPoly3 term = powers[0][idx.i] * powers[1][idx.j] * powers[2][idx.k];
    for (std::size_t q = 0; q < r.size(); ++q) r.coeff(q) += c * term.coeff(q);
  }
  return r;
}

double kostlan_weight(int d, MultiIndex idx) {
  if (idx.i < 0 || idx.j < 0 || idx.k < 0 || idx.degree() != d) {
    throw DomainError("multi-index does not sum to the polynomial degree");
  }
  const double log_w2 = std::lgamma(d + 3.0) - std::log(2.0) - std::lgamma(idx.i + 1.0) -
                        std::lgamma(idx.j + 1.0) - std::lgamma(idx.k + 1.0);
  return std::exp(0.5 * log_w2);
}

HomogeneousPoly3 sample_kostlan(int d, EnsembleSeed seed) {
  if (d < 1) throw DomainError("Kostlan sampling needs degree >= 1");
  std::seed_seq seq{static_cast<std::uint32_t>(seed.seed), static_cast<std::uint32_t>(seed.seed >> 32),
                    static_cast<std::uint32_t>(seed.stream),
                    static_cast<std::uint32_t>(seed.stream >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  HomogeneousPoly3 p(d);
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double re = normal(rng);
    const double im = normal(rng);
    p.coeff(n) = std::complex<double>(re, im) * kostlan_weight(d, monomial_at(d, n));
  }
  return p;
}

double kostlan_norm(const HomogeneousPoly3& p) {
  double s = 0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    s += std::norm(p.coeff(n)) / std::pow(kostlan_weight(p.degree(), monomial_at(p.degree(), n)), 2);
  }
  return std::sqrt(s);
}

namespace {

double value_scale(const HomogeneousPoly3& p, const Eigen::Vector3cd& x) {
  const double n = kostlan_norm(p);
  return n * std::sqrt(static_cast<double>(monomial_count(p.degree()))) *
         std::pow(x.norm(), p.degree());
}

}  // namespace

double normalized_value(const HomogeneousPoly3& p, const Eigen::Vector3cd& x) {
  const double scale = value_scale(p, x);
  return scale > 0 ? std::abs(p(x)) / scale : 0.0;
}

double normalized_gradient(const HomogeneousPoly3& p, const Eigen::Vector3cd& x) {
  const double scale = value_scale(p, x) / std::max(x.norm(), 1e-300) * std::max(p.degree(), 1);
  return scale > 0 ? p.gradient(x).norm() / scale : 0.0;
}

HomogeneousPoly3 degenerate_family(const HomogeneousPoly3& p1, const HomogeneousPoly3& p2,
                                   const HomogeneousPoly3& q, double eps) {
  if (q.degree() != p1.degree() + p2.degree()) {
    throw DomainError("degenerate family needs deg Q = deg P1 + deg P2");
  }
  HomogeneousPoly3 r = p1 * p2;
  for (std::size_t n = 0; n < r.size(); ++n) r.coeff(n) += eps * q.coeff(n);
  return r;
}

void write_polynomial(std::ostream& out, const HomogeneousPoly3& p) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "degree " << p.degree() << '\n';
  for (std::size_t n = 0; n < p.size(); ++n) {
    const MultiIndex idx = monomial_at(p.degree(), n);
    s << idx.i << ' ' << idx.j << ' ' << idx.k << ' ' << p.coeff(n).real() << ' '
      << p.coeff(n).imag() << '\n';
  }
  out << s.str();
}

HomogeneousPoly3 read_polynomial(std::istream& in) {
  std::string word;
  int d = -1;
  if (!(in >> word >> d) || word != "degree" || d < 0) {
    throw DomainError("polynomial file must start with `degree d`");
  }
  HomogeneousPoly3 p(d);
  MultiIndex idx;
  double re = 0, im = 0;
  std::size_t seen = 0;
  while (in >> idx.i >> idx.j >> idx.k >> re >> im) {
    p[idx] = {re, im};
    ++seen;
  }
  if (seen != p.size()) throw DomainError("polynomial file has the wrong number of monomials");
  return p;
}

}  // namespace rcl
