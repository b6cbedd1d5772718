#pragma once

#include <complex>
#include <span>
#include <vector>

namespace rcl {

using Complex = std::complex<double>;

/// Value and first derivative of sum_k c[k] z^k.
struct PolyValue {
  Complex value;
  Complex derivative;
};
PolyValue horner(std::span<const Complex> coeffs, Complex z);

/// sum_k |c[k]| |z|^k, the natural scale for residuals of p(z).
double coefficient_scale(std::span<const Complex> coeffs, Complex z);

/// Unique positive root of |c_n| x^n - sum_{k<n} |c_k| x^k; every root of the
/// polynomial lies in the disk of this radius.
double cauchy_bound(std::span<const Complex> coeffs);

struct AberthOptions {
  int max_iterations = 500;
  double tolerance = 1e-15;  // relative correction size
};

/// All roots of the polynomial with ascending coefficients by Aberth-Ehrlich
/// iteration, started on a circle of the Cauchy radius. The leading
/// coefficient must be nonzero; trailing zero coefficients are not trimmed.
std::vector<Complex> aberth_roots(std::span<const Complex> coeffs, const AberthOptions& opts = {});

/// Same iteration from caller-provided starting points (one per root).
std::vector<Complex> aberth_roots(std::span<const Complex> coeffs, std::vector<Complex> start,
                                  const AberthOptions& opts = {});

/// Coefficients of p / (z - r)^m by synthetic division (remainder dropped).
std::vector<Complex> deflate(std::span<const Complex> coeffs, Complex root, int multiplicity = 1);

}  // namespace rcl
