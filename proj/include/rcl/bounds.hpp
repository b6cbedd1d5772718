#pragma once

namespace rcl {

struct BoundReport {
  int d = 0;
  double a_d = 0;
  double C = 1;
  int n = 2;
  double r_d = 0;                 // oval ball radius
  double k_d = 0;                 // curvature floor magnitude
  double w_d = 0;                 // hyperbolic ball area of radius r_d at curvature -k_d
  double systole_threshold = 0;
  double h_threshold = 0;
  double lambda1_threshold = 0;
};

/// Evaluates the threshold formulas for degree d. Throws DomainError for d < 2
/// or nonpositive a_d, C.
BoundReport bound_calculator(int d, double a_d, double C = 1.0, int n = 2);

/// Default a_d rule: 1 / log(d + 1).
double default_a(int d);

// Unit conversions between the artifact normalization (lines have area pi)
// and the unit-line normalization used for the thresholds.
double h_to_paper(double h);
double h_from_paper(double h);
double lambda_to_paper(double lambda);
double lambda_from_paper(double lambda);
double length_to_paper(double l);
double area_to_paper(double a);

}  // namespace rcl
