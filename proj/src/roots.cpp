#include "rcl/roots.hpp"

#include <cmath>
#include <numbers>

#include "rcl/errors.hpp"

namespace rcl {

PolyValue horner(std::span<const Complex> c, Complex z) {
  Complex p(0), dp(0);
  for (std::size_t n = c.size(); n-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[n];
  }
  return {p, dp};
}

double coefficient_scale(std::span<const Complex> c, Complex z) {
  const double r = std::abs(z);
  double s = 0;
  for (std::size_t n = c.size(); n-- > 0;) s = s * r + std::abs(c[n]);
  return s;
}

double cauchy_bound(std::span<const Complex> c) {
  const std::size_t n = c.size() - 1;
  const double lead = std::abs(c[n]);
  if (lead == 0) throw DomainError("leading coefficient vanishes");
  auto f = [&](double x) {
    double v = lead, dv = 0;
    // g(x) = lead x^n - sum |c_k| x^k, evaluated by Horner.
    for (std::size_t k = n; k-- > 0;) {
      dv = dv * x + v;
      v = v * x - std::abs(c[k]);
    }
    return std::pair{v, dv};
  };
  double x = 1;
  for (std::size_t k = 0; k < n; ++k) x = std::max(x, 1 + std::abs(c[k]) / lead);
  // Newton from above converges monotonically for this convex-from-the-right function.
  for (int it = 0; it < 200; ++it) {
    auto [v, dv] = f(x);
    if (dv <= 0) break;
    const double step = v / dv;
    x -= step;
    if (std::abs(step) <= 1e-14 * x) break;
  }
  return x;
}

std::vector<Complex> aberth_roots(std::span<const Complex> coeffs, const AberthOptions& opts) {
  const std::size_t n = coeffs.size() - 1;
  if (coeffs.empty() || n == 0) return {};
  const double radius = cauchy_bound(coeffs);
  std::vector<Complex> start(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) + 0.4;
    start[k] = std::polar(radius, angle);
  }
  return aberth_roots(coeffs, std::move(start), opts);
}

std::vector<Complex> aberth_roots(std::span<const Complex> coeffs, std::vector<Complex> z,
                                  const AberthOptions& opts) {
  const std::size_t n = coeffs.size() - 1;
  if (z.size() != n) throw DomainError("need one starting point per root");
  if (coeffs[n] == Complex(0)) throw DomainError("leading coefficient vanishes");
  std::vector<bool> done(n, false);
  for (int it = 0; it < opts.max_iterations; ++it) {
    bool all_done = true;
    for (std::size_t k = 0; k < n; ++k) {
      if (done[k]) continue;
      const auto [p, dp] = horner(coeffs, z[k]);
      if (p == Complex(0)) {
        done[k] = true;
        continue;
      }
      const Complex ratio = p / dp;
      Complex sum(0);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      }
      const Complex w = ratio / (1.0 - ratio * sum);
      z[k] -= w;
      if (std::abs(w) <= opts.tolerance * std::max(std::abs(z[k]), 1e-300) ||
          std::abs(p) <= 1e-17 * coefficient_scale(coeffs, z[k])) {
        done[k] = true;
      } else {
        all_done = false;
      }
    }
    if (all_done) break;
  }
  // A couple of Newton steps tighten simple roots.
  for (auto& r : z) {
    for (int it = 0; it < 2; ++it) {
      const auto [p, dp] = horner(coeffs, r);
      if (dp == Complex(0)) break;
      const Complex step = p / dp;
      if (!std::isfinite(std::abs(step))) break;
      if (std::abs(horner(coeffs, r - step).value) >= std::abs(p)) break;
      r -= step;
    }
  }
  return z;
}

std::vector<Complex> deflate(std::span<const Complex> coeffs, Complex root, int multiplicity) {
  std::vector<Complex> c(coeffs.begin(), coeffs.end());
  for (int m = 0; m < multiplicity; ++m) {
    const std::size_t n = c.size() - 1;
    std::vector<Complex> q(n);
    Complex acc(0);
    for (std::size_t k = n; k-- > 0;) {
      acc = acc * root + c[k + 1];
      q[k] = acc;
    }
    c = std::move(q);
  }
  return c;
}

}  // namespace rcl
