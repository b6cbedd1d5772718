#include "rcl/bounds.hpp"

#include <cmath>
#include <numbers>

#include "rcl/errors.hpp"

namespace rcl {

BoundReport bound_calculator(int d, double a_d, double C, int n) {
  if (d < 2) throw DomainError("bounds need d >= 2");
  if (!(a_d > 0) || !(C > 0) || n < 1) throw DomainError("a_d and C must be positive, n >= 1");
  BoundReport r;
  r.d = d;
  r.a_d = a_d;
  r.C = C;
  r.n = n;
  const double dd = d;
  const double log_d = std::log(dd);
  r.r_d = a_d / (C * std::pow(dd, 3.0 * (n + 1) / 4) * log_d);
  r.k_d = (C / a_d) * std::pow(dd, 3.0 * (n + 1) / 2) * log_d * log_d;
  r.w_d = 2 * std::numbers::pi * (std::cosh(std::sqrt(r.k_d) * r.r_d) - 1) / r.k_d;
  r.systole_threshold = a_d * std::pow(dd, -(3.0 * n + 1) / 2) / (C * std::sqrt(log_d));
  r.h_threshold = a_d / (C * std::pow(dd, (5.0 * n - 1) / 2) * std::sqrt(log_d));
  r.lambda1_threshold = a_d * a_d / (C * std::pow(dd, 5.0 * n - 1) * log_d);
  return r;
}

double default_a(int d) { return 1 / std::log(d + 1.0); }

double h_to_paper(double h) { return h * std::sqrt(std::numbers::pi); }
double h_from_paper(double h) { return h / std::sqrt(std::numbers::pi); }
double lambda_to_paper(double lambda) { return lambda * std::numbers::pi; }
double lambda_from_paper(double lambda) { return lambda / std::numbers::pi; }
double length_to_paper(double l) { return l / std::sqrt(std::numbers::pi); }
double area_to_paper(double a) { return a / std::numbers::pi; }

}  // namespace rcl
