#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "rcl/kostlan.hpp"
#include "rcl/projective.hpp"
#include "rcl/surface_mesh.hpp"

namespace rcl::testing {

// Regular tetrahedron with unit edges.
inline SurfaceMesh tetrahedron(double edge = 1.0) {
  const std::vector<std::array<int, 3>> faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return SurfaceMesh::from_faces(4, faces, [edge](int, int) { return edge; });
}

// Periodic nx-by-ny grid on [0, wx] x [0, wy], each square cut along the
// same diagonal. Vertex (i, j) has index i + nx * j.
struct FlatTorus {
  SurfaceMesh mesh;
  std::vector<double> x, y;
};

inline FlatTorus flat_torus(int nx, int ny, double wx = 1.0, double wy = 1.0) {
  FlatTorus t;
  const int n = nx * ny;
  t.x.resize(n);
  t.y.resize(n);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      t.x[i + nx * j] = wx * i / nx;
      t.y[i + nx * j] = wy * j / ny;
    }
  }
  std::vector<std::array<int, 3>> faces;
  auto id = [&](int i, int j) { return ((i % nx + nx) % nx) + nx * ((j % ny + ny) % ny); };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      faces.push_back({a, b, c});
      faces.push_back({a, c, d});
    }
  }
  auto wrap = [](double v, double w) { return v - w * std::round(v / w); };
  const std::vector<double>& xs = t.x;
  const std::vector<double>& ys = t.y;
  t.mesh = SurfaceMesh::from_faces(n, faces, [&](int u, int v) {
    return std::hypot(wrap(xs[u] - xs[v], wx), wrap(ys[u] - ys[v], wy));
  });
  return t;
}

// Lifted mesh of a line, the round sphere of radius 1/2.
inline LiftedSurface line_surface(int level, std::uint64_t seed = 7) {
  const auto p = sample_kostlan(1, {seed, 0});
  BranchedCover cover(p, Pencil::random(p, {seed, 1}));
  LiftOptions opts;
  opts.level = level;
  return build_surface(cover, opts);
}

inline LiftedSurface kostlan_surface(int d, int level, std::uint64_t seed, LiftOptions opts = {}) {
  const auto p = sample_kostlan(d, {seed, 0});
  BranchedCover cover(p, Pencil::random(p, {seed, 1}));
  opts.level = level;
  return build_surface(cover, opts);
}

// Coarse lift for dense comparisons: no adaptive rounds, light refinement.
inline LiftedSurface coarse_surface(int d, std::uint64_t seed) {
  LiftOptions opts;
  opts.max_adaptive_rounds = 0;
  opts.refine_rounds = 0;
  opts.branch_separation_factor = 1.0;
  return kostlan_surface(d, 0, seed, opts);
}

}  // namespace rcl::testing
