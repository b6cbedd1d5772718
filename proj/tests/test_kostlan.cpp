#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rcl/errors.hpp"
#include "rcl/kostlan.hpp"
#include "rcl/projective.hpp"

using namespace rcl;

TEST_CASE("kostlan weights") {
  CHECK(kostlan_weight(1, {1, 0, 0}) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(kostlan_weight(2, {2, 0, 0}) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-14));
  CHECK(kostlan_weight(2, {1, 1, 0}) == doctest::Approx(std::sqrt(12.0)).epsilon(1e-14));
  // symmetric under permuting the exponents
  CHECK(kostlan_weight(5, {3, 1, 1}) == doctest::Approx(kostlan_weight(5, {1, 3, 1})));
  CHECK_THROWS_AS(kostlan_weight(3, {1, 1, 0}), DomainError);
}

TEST_CASE("monomial ordering") {
  for (int d = 0; d <= 7; ++d) {
    CHECK(monomial_count(d) == static_cast<std::size_t>((d + 1) * (d + 2) / 2));
    for (std::size_t n = 0; n < monomial_count(d); ++n) {
      const MultiIndex m = monomial_at(d, n);
      CHECK(m.degree() == d);
      CHECK(monomial_offset(d, m) == n);
    }
  }
  CHECK(monomial_at(2, 0) == MultiIndex{2, 0, 0});
  CHECK(monomial_at(2, 5) == MultiIndex{0, 0, 2});
  CHECK_THROWS_AS(monomial_offset(2, {1, 0, 0}), DomainError);
}

TEST_CASE("sampling is seeded") {
  const auto a = sample_kostlan(3, {11, 4});
  const auto b = sample_kostlan(3, {11, 4});
  const auto c = sample_kostlan(3, {11, 5});
  CHECK(a.size() == 10);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("coefficient variance") {
  // E|a|^2 = 1, so |coeff(2,0,0)|^2 / w^2 averages to 1.
  const int draws = 10000;
  double sum = 0;
  for (int s = 0; s < draws; ++s) {
    const auto p = sample_kostlan(2, {2024, static_cast<std::uint64_t>(s)});
    sum += std::norm(p[{2, 0, 0}]) / 6.0;
  }
  CHECK(sum / draws == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("evaluation") {
  HomogeneousPoly3 p(2);
  p[{1, 1, 0}] = 1.0;
  const Eigen::Vector3cd x(1, 2, 5);
  CHECK(std::abs(p(x) - std::complex<double>(2)) < 1e-15);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int d = 1; d <= 6; ++d) {
    const auto q = sample_kostlan(d, {9, static_cast<std::uint64_t>(d)});
    CHECK(std::abs(q(Eigen::Vector3cd::Zero())) == 0.0);
    for (int t = 0; t < 20; ++t) {
      Eigen::Vector3cd y;
      for (int m = 0; m < 3; ++m) y[m] = {g(rng), g(rng)};
      const std::complex<double> lam(g(rng), g(rng));
      const auto lhs = q(lam * y);
      const auto rhs = std::pow(lam, d) * q(y);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
    }
  }
}

TEST_CASE("gradient and hessian against finite differences") {
  const auto p = sample_kostlan(4, {5, 5});
  const Eigen::Vector3cd x(0.3, std::complex<double>(-0.2, 0.7), 0.5);
  const auto g = p.gradient(x);
  const auto h = p.hessian(x);
  const double step = 1e-6;
  for (int a = 0; a < 3; ++a) {
    Eigen::Vector3cd e = Eigen::Vector3cd::Zero();
    e[a] = step;
    const auto fd = (p(x + e) - p(x - e)) / (2 * step);
    CHECK(std::abs(fd - g[a]) < 1e-7);
    const Eigen::Vector3cd gd = (p.gradient(x + e) - p.gradient(x - e)) / (2 * step);
    for (int b = 0; b < 3; ++b) CHECK(std::abs(gd[b] - h(b, a)) < 1e-6);
  }
  // Euler: x . grad P = d P
  CHECK(std::abs((x.array() * g.array()).sum() - 4.0 * p(x)) < 1e-12);
}

TEST_CASE("composition with a linear map") {
  const auto p = sample_kostlan(3, {1, 1});
  const auto u = Pencil::random(p, {2, 2}).frame();
  const auto q = compose_linear(p, u);
  CHECK(q.degree() == 3);
  const Eigen::Vector3cd y(0.1, 0.4, std::complex<double>(0.2, -0.3));
  CHECK(std::abs(q(y) - p(u * y)) < 1e-12);
}

TEST_CASE("degenerate family") {
  const auto x0 = monomial({1, 0, 0});
  const auto x1 = monomial({0, 1, 0});
  const auto x2sq = monomial({0, 0, 2});
  const auto prod = x0 * x1;
  CHECK(degenerate_family(x0, x1, x2sq, 0.0) == prod);
  const auto q = degenerate_family(x0, x1, x2sq, 0.1);
  CHECK(q.degree() == 2);
  CHECK(std::abs(q[{1, 1, 0}] - 1.0) == 0.0);
  CHECK(std::abs(q[{0, 0, 2}] - 0.1) < 1e-16);
  CHECK_THROWS_AS(degenerate_family(x0, x1, x0, 0.1), DomainError);

  // The gradient (X1, X0, 0.2 X2) does not vanish on the conic.
  const auto pencil = Pencil::random(q, {17, 1});
  BranchedCover cover(q, pencil);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int t = 0; t < 50; ++t) {
    BasePoint b(std::complex<double>(g(rng), g(rng)), std::complex<double>(g(rng), g(rng)));
    b.normalize();
    for (auto w : cover.fiber_roots(b).roots) {
      const auto x = cover.embed(b, w);
      CHECK(normalized_value(q, x) < 1e-12);
      CHECK(normalized_gradient(q, x) > 1e-3);
    }
  }
}

TEST_CASE("polynomial text round trip") {
  const auto p = sample_kostlan(4, {3, 9});
  std::stringstream s;
  write_polynomial(s, p);
  const auto q = read_polynomial(s);
  CHECK(q == p);
  std::istringstream bad("degree 2\n2 0 0 1 0\n");
  CHECK_THROWS(read_polynomial(bad));
}
