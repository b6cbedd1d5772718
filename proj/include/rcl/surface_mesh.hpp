#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rcl/halfedge.hpp"
#include "rcl/projective.hpp"
#include "rcl/sphere_mesh.hpp"

namespace rcl {

struct VertexProvenance {
  int base_vertex = -1;
  int sheet = -1;  // -1 marks a ramification vertex
};

/// Triangulated surface with intrinsic edge lengths. Lifted meshes also carry
/// the embedding of every vertex in CP^2; meshes built from abstract faces
/// (tests, imports) leave it empty.
class SurfaceMesh {
 public:
  using LengthFn = std::function<double(int, int)>;

  SurfaceMesh() = default;
  SurfaceMesh(HalfedgeMesh topology, std::vector<double> edge_lengths);

  /// Builds connectivity from faces and assigns length(u, v) to every edge.
  static SurfaceMesh from_faces(int n_vertices, std::span<const std::array<int, 3>> faces,
                                const LengthFn& length);

  const HalfedgeMesh& topology() const { return topology_; }
  int n_vertices() const { return topology_.n_vertices(); }
  int n_edges() const { return topology_.n_edges(); }
  int n_faces() const { return topology_.n_faces(); }

  double length(int e) const { return lengths_[e]; }
  double halfedge_length(int h) const { return lengths_[topology_.edge(h)]; }
  const std::vector<double>& lengths() const { return lengths_; }

  /// Edge lengths of face f, ordered as halfedges 3f, 3f+1, 3f+2.
  std::array<double, 3> face_lengths(int f) const;

  const std::vector<Eigen::Vector3cd>& embedding() const { return embedding_; }
  void set_embedding(std::vector<Eigen::Vector3cd> e) { embedding_ = std::move(e); }
  const std::vector<VertexProvenance>& provenance() const { return provenance_; }
  void set_provenance(std::vector<VertexProvenance> p) { provenance_ = std::move(p); }

  /// Same connectivity, all lengths multiplied by c.
  SurfaceMesh rescaled(double c) const;

  /// Copy with vertices renumbered: new index of old vertex v is perm[v].
  SurfaceMesh relabeled(std::span<const int> perm) const;

  /// Throws StructuralError naming the first face violating the strict
  /// triangle inequality.
  void check_triangle_inequalities() const;

  /// Intrinsic Delaunay flips on every face with a corner below
  /// `min_angle_deg`. Flipped edges get the Fubini-Study distance of their
  /// new endpoints when an embedding is present, and their intrinsic
  /// layout length otherwise. Returns the number of flips.
  int repair_slivers(double min_angle_deg = 5.0, int max_passes = 20);

  double min_angle_deg() const;
  double max_edge_length() const;

 private:
  HalfedgeMesh topology_;
  std::vector<double> lengths_;
  std::vector<Eigen::Vector3cd> embedding_;
  std::vector<VertexProvenance> provenance_;
};

// ---------------------------------------------------------------------------
// Intrinsic geometry.

/// Heron's formula in the numerically stable ordering.
double triangle_area(double a, double b, double c);

/// Corner angles opposite to the three given lengths.
std::array<double, 3> triangle_angles(double a, double b, double c);

double face_area(const SurfaceMesh& mesh, int f);
double total_area(const SurfaceMesh& mesh);

struct EulerGenus {
  int chi = 0;
  int genus = 0;
};
/// chi = V - E + F and genus = (2 - chi) / 2 for a closed orientable mesh.
EulerGenus euler_genus(const SurfaceMesh& mesh);

struct CurvatureField {
  std::vector<double> angle_defect;   // 2 pi minus the incident corner angles
  std::vector<double> mixed_area;     // obtuse-safe Voronoi areas
  std::vector<double> pointwise;      // defect / area
  std::vector<double> smoothed;       // summed defect / summed area over the k-ring

  double total_defect() const;
  double max_curvature() const;
  double min_curvature() const;
  double max_smoothed() const;
  double min_smoothed() const;
};

CurvatureField curvature(const SurfaceMesh& mesh, int rings = 2);

/// Per-vertex mixed Voronoi areas (they sum to the total area).
std::vector<double> mixed_areas(const SurfaceMesh& mesh);

// ---------------------------------------------------------------------------
// Lifting a base triangulation of CP^1 to Z(P).

class BranchedCover;

struct LiftOptions {
  int level = 4;                      // icosahedral base level
  double refine_radius_factor = 3.0;  // refinement disk radius in base edge lengths
  int refine_rounds = 2;              // diameter halvings inside the disk
  double branch_separation_factor = 0.25;  // base faces near a branch point stay below this fraction of the gap to the next one
  double max_edge_factor = 2.0;       // lifted edges above this multiple of the nominal edge trigger base bisection
  int max_adaptive_rounds = 10;
  double min_angle_deg = 5.0;
  TrackOptions track;
};

struct LiftStats {
  int base_vertices = 0;
  int base_faces = 0;
  int adaptive_rounds = 0;
  int flips = 0;
  int tracked_edges = 0;
};

struct LiftedSurface {
  SurfaceMesh mesh;
  SphereMesh base;
  std::vector<BranchPoint> branches;
  std::vector<int> face_base;  // base face of every lifted face (before flips)
  LiftStats stats;
};

/// Lifts a base triangulation whose branch points are already vertices
/// (base.branch_index). Throws LiftInconsistentError when gluing fails.
LiftedSurface lift_mesh(const BranchedCover& cover, const SphereMesh& base);

/// Full pipeline: icosahedral base, refinement around branch points, branch
/// vertex insertion, adaptive bisection until lifted edges are short,
/// sliver repair.
LiftedSurface build_surface(const BranchedCover& cover, const LiftOptions& opts = {});

// ---------------------------------------------------------------------------
// Export: OFF-style file (vertex lines hold the 6 real coordinates of the
// embedding) and a sidecar with `u v length` per edge.

void write_off(std::ostream& out, const SurfaceMesh& mesh);
void write_lengths(std::ostream& out, const SurfaceMesh& mesh);
SurfaceMesh read_mesh(std::istream& off, std::istream& lengths);

/// Sidecar scalar field: one value per vertex line.
void write_vertex_field(std::ostream& out, std::span<const double> values);

}  // namespace rcl
