#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace rcl {

struct BranchPoint;

/// Triangulation of the unit sphere used as the base of the branched cover.
/// Distances and radii in this module are angles on the unit sphere (twice
/// the Fubini-Study distance on CP^1).
struct SphereMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;  // counter-clockwise seen from outside
  std::vector<int> branch_index;          // per vertex: branch point index or -1

  int euler_characteristic() const;
};

/// Angular length of the icosahedron edge after `level` quadrisections.
double nominal_edge_angle(int level);

/// Icosahedron quadrisected `level` times, vertices projected to the sphere.
SphereMesh build_base_sphere(int level);

/// Icosahedral sphere plus longest-edge bisection of every face within
/// `radius` of a listed point until those faces have diameter at most the
/// unrefined maximum diameter / 2^rounds.
SphereMesh build_base_sphere(int level, std::span<const Eigen::Vector3d> refine_near, double radius,
                             int rounds = 2);

double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b);
double face_diameter(const SphereMesh& mesh, int f);
double max_face_diameter(const SphereMesh& mesh);
/// Smallest angular distance from x to the closed spherical triangle f.
double face_distance(const SphereMesh& mesh, int f, const Eigen::Vector3d& x);
bool face_contains(const SphereMesh& mesh, int f, const Eigen::Vector3d& x);
int locate_face(const SphereMesh& mesh, const Eigen::Vector3d& x);

/// Conforming longest-edge (Rivara) bisection: repeatedly bisects faces for
/// which `needs_split` holds until none does or `max_bisections` is reached.
/// Returns the number of edge bisections performed.
int refine_faces(SphereMesh& mesh, const std::function<bool(const SphereMesh&, int)>& needs_split,
                 int max_bisections = 1 << 22);

/// Bisects each listed face once along the longest-edge propagation path.
void bisect_faces(SphereMesh& mesh, std::span<const int> faces);

/// Makes every branch point a vertex, either by moving the nearest corner of
/// its containing face onto it or by splitting that face, whichever leaves
/// the better minimum angle. Afterwards no edge joins two branch vertices.
void insert_branch_vertices(SphereMesh& mesh, const std::vector<BranchPoint>& branches);

/// Smallest corner angle (degrees) of the planar triangle on the chords.
double min_corner_angle_deg(const SphereMesh& mesh, int f);

}  // namespace rcl
