#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "rcl/spectral.hpp"
#include "rcl/surface_mesh.hpp"

namespace rcl {

/// Straight piece of a level curve inside one face. Endpoints lie on the
/// face's halfedges h0, h1 at parameters s0, s1 from their origins.
struct CutSegment {
  int face = -1;
  int h0 = -1, h1 = -1;
  double s0 = 0, s1 = 0;
  double length = 0;
};

struct Cut {
  double level = 0;
  std::vector<CutSegment> curve;
  double length = 0;
  double area_below = 0;  // area where f < level
  double area_above = 0;
  std::vector<char> below;  // per vertex: f < level

  double ratio() const { return length / std::min(area_below, area_above); }
};

struct CheegerEstimate {
  double h_upper = 0;
  double h_lower = 0;
  Cut cut;
  double curvature_floor = 0;
  int eigenfunction = -1;  // index of the sweep field that realized h_upper
};

struct SweepOptions {
  int uniform_levels = 256;
};

/// Level curve {f = t} by per-face linear interpolation.
Cut level_cut(const SurfaceMesh& mesh, std::span<const double> f, double t);

/// Best ratio over all vertex values and `uniform_levels` evenly spaced
/// thresholds. Only h_upper and cut are filled. Throws NoCutError when f is
/// constant.
CheegerEstimate sweep_cut(const SurfaceMesh& mesh, std::span<const double> f,
                          const SweepOptions& opts = {});

/// Positive root of lambda1 = 2 a h + 10 h^2 with a = sqrt(max(0, -floor)).
double buser_lower(double lambda1, double curvature_floor);

/// Sweeps every nonconstant eigenfunction, keeps the smallest ratio, and
/// brackets it below with buser_lower.
CheegerEstimate estimate_cheeger(const SurfaceMesh& mesh, const SpectralResult& spectrum,
                                 double curvature_floor, const SweepOptions& opts = {});

struct CheegerReport {
  double lambda1 = 0;
  double h_upper = 0;
  double h_lower = 0;
  double cheeger_gap = 0;       // lambda1 - h_upper^2 / 4, either sign
  bool lower_consistent = false;  // lambda1 >= h_lower^2 / 4 - tolerance
  bool bracket_ordered = false;   // h_lower <= h_upper
};

CheegerReport cheeger_inequality_report(double h_upper, double lambda1, double h_lower = 0,
                                        double tolerance = 1e-12);

struct IsoperimetricRecord {
  double length = 0;
  double disk_area = 0;
  double curvature_sup = 0;
  double slack = 0;             // l^2 - A (4 pi - K+ A)
  double radius_estimate = 0;   // graph distance from a center vertex to the loop
  bool in_ball = false;         // radius_estimate <= the requested radius
  double tolerance = 0;
  bool passed = true;           // slack >= -tolerance, asserted only when in_ball
};

/// Checks the isoperimetric inequality on a single closed level curve. The
/// disk side is the side whose full subcomplex has Euler characteristic 1.
/// Throws ShapeError if the cut is not one loop or bounds no disk.
IsoperimetricRecord isoperimetric_check(const SurfaceMesh& mesh, const Cut& cut,
                                        double curvature_sup, double radius,
                                        double relative_tolerance = 0.02);

}  // namespace rcl
