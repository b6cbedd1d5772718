#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rcl/roots.hpp"

using namespace rcl;

namespace {

// Coefficients of prod (z - r_i), ascending.
std::vector<Complex> from_roots(const std::vector<Complex>& roots) {
  std::vector<Complex> c{1.0};
  for (auto r : roots) {
    std::vector<Complex> n(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      n[k + 1] += c[k];
      n[k] -= r * c[k];
    }
    c = n;
  }
  return c;
}

double match_error(std::vector<Complex> got, std::vector<Complex> want) {
  double worst = 0;
  for (auto w : want) {
    auto it = std::min_element(got.begin(), got.end(),
                               [&](Complex a, Complex b) { return std::abs(a - w) < std::abs(b - w); });
    worst = std::max(worst, std::abs(*it - w));
    got.erase(it);
  }
  return worst;
}

}  // namespace

TEST_CASE("horner") {
  const std::vector<Complex> c{1.0, -3.0, 2.0};  // 2z^2 - 3z + 1
  const auto v = horner(c, Complex(2.0));
  CHECK(std::abs(v.value - Complex(3.0)) < 1e-15);
  CHECK(std::abs(v.derivative - Complex(5.0)) < 1e-15);
  CHECK(coefficient_scale(c, Complex(2.0)) == doctest::Approx(15.0));
}

TEST_CASE("cauchy bound encloses the roots") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    std::vector<Complex> roots;
    for (int k = 0; k < 6; ++k) roots.emplace_back(3 * g(rng), 3 * g(rng));
    const double r = cauchy_bound(from_roots(roots));
    for (auto z : roots) CHECK(std::abs(z) <= r * (1 + 1e-12));
  }
}

TEST_CASE("aberth recovers known roots") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int d = 1; d <= 8; ++d) {
    std::vector<Complex> roots;
    for (int k = 0; k < d; ++k) roots.emplace_back(g(rng), g(rng));
    const auto got = aberth_roots(from_roots(roots));
    REQUIRE(got.size() == static_cast<std::size_t>(d));
    CHECK(match_error(got, roots) < 1e-10);
  }
}

TEST_CASE("roots of unity") {
  for (int d = 2; d <= 7; ++d) {
    std::vector<Complex> c(d + 1, 0.0);
    c[0] = -1.0;
    c[d] = 1.0;
    std::vector<Complex> want;
    for (int k = 0; k < d; ++k) want.push_back(std::polar(1.0, 2 * std::numbers::pi * k / d));
    CHECK(match_error(aberth_roots(c), want) < 1e-13);
  }
}

TEST_CASE("warm start and deflation") {
  const std::vector<Complex> roots{{1, 1}, {-2, 0.5}, {0.3, -1}};
  const auto c = from_roots(roots);
  std::vector<Complex> start;
  for (auto r : roots) start.push_back(r + Complex(1e-3, -1e-3));
  CHECK(match_error(aberth_roots(c, start), roots) < 1e-12);

  const auto q = deflate(c, roots[0]);
  REQUIRE(q.size() == 3);
  CHECK(match_error(aberth_roots(q), {roots[1], roots[2]}) < 1e-12);

  const auto sq = from_roots({2.0, 2.0, -1.0});
  const auto lin = deflate(sq, 2.0, 2);
  REQUIRE(lin.size() == 2);
  CHECK(std::abs(lin[0] / lin[1] - Complex(1.0)) < 1e-12);
}
