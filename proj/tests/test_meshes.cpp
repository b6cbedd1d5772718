#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "rcl/errors.hpp"
#include "rcl/halfedge.hpp"
#include "rcl/sphere_mesh.hpp"
#include "rcl/surface_mesh.hpp"
#include "support.hpp"

using namespace rcl;
using rcl::testing::flat_torus;
using rcl::testing::kostlan_surface;
using rcl::testing::line_surface;
using rcl::testing::tetrahedron;

namespace {

constexpr double kPi = std::numbers::pi;

double gauss_bonnet_error(const SurfaceMesh& m) {
  return std::abs(curvature(m).total_defect() - 2 * kPi * euler_genus(m).chi);
}

}  // namespace

TEST_CASE("icosahedral base") {
  const auto s0 = build_base_sphere(0);
  CHECK(s0.vertices.size() == 12);
  CHECK(s0.faces.size() == 20);
  CHECK(s0.euler_characteristic() == 2);
  for (int level = 1; level <= 4; ++level) {
    const auto s = build_base_sphere(level);
    CHECK(s.faces.size() == static_cast<std::size_t>(20 * (1 << (2 * level))));
    CHECK(s.euler_characteristic() == 2);
    for (const auto& v : s.vertices) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("refinement near a point") {
  const Eigen::Vector3d x = Eigen::Vector3d(0.3, -0.5, 0.8).normalized();
  const double r = 0.4;
  const double coarse = max_face_diameter(build_base_sphere(2));
  const Eigen::Vector3d pts[] = {x};
  const auto s = build_base_sphere(2, pts, r, 1);
  CHECK(s.euler_characteristic() == 2);
  int near = 0;
  for (int f = 0; f < static_cast<int>(s.faces.size()); ++f) {
    if (face_distance(s, f, x) <= r) {
      ++near;
      CHECK(face_diameter(s, f) <= coarse / 2 + 1e-12);
    }
  }
  CHECK(near > 0);
  const int f = locate_face(s, x);
  CHECK(face_contains(s, f, x));
  CHECK(face_distance(s, f, x) == 0.0);
}

TEST_CASE("halfedge connectivity") {
  const auto t = tetrahedron();
  const auto& h = t.topology();
  CHECK(h.n_vertices() == 4);
  CHECK(h.n_edges() == 6);
  CHECK(h.n_faces() == 4);
  for (int e = 0; e < h.n_halfedges(); ++e) {
    CHECK(h.twin(h.twin(e)) == e);
    CHECK(h.origin(h.twin(e)) == h.tip(e));
  }
  for (int v = 0; v < 4; ++v) CHECK(h.valence(v) == 3);

  // Two triangles sharing all three edges do not form a manifold.
  const std::vector<std::array<int, 3>> bad{{0, 1, 2}, {0, 1, 2}};
  CHECK_THROWS_AS(HalfedgeMesh::from_faces(3, bad), StructuralError);
  // Open disk.
  const std::vector<std::array<int, 3>> open{{0, 1, 2}};
  CHECK_THROWS_AS(HalfedgeMesh::from_faces(3, open), StructuralError);
}

TEST_CASE("intrinsic triangle formulas") {
  CHECK(triangle_area(3, 4, 5) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(triangle_area(1, 1, 1) == doctest::Approx(std::sqrt(3.0) / 4).epsilon(1e-15));
  const auto a = triangle_angles(3, 4, 5);
  CHECK(a[2] == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(a[0] == doctest::Approx(std::asin(0.6)).epsilon(1e-14));
  CHECK(a[0] + a[1] + a[2] == doctest::Approx(kPi).epsilon(1e-15));
  // Needle triangle keeps full relative accuracy.
  CHECK(triangle_area(1, 1, 1e-8) == doctest::Approx(0.5e-8).epsilon(1e-10));
}

TEST_CASE("flat torus geometry") {
  const auto t = flat_torus(12, 9, 1.0, 0.75);
  const auto eg = euler_genus(t.mesh);
  CHECK(eg.chi == 0);
  CHECK(eg.genus == 1);
  CHECK(total_area(t.mesh) == doctest::Approx(0.75).epsilon(1e-13));
  const auto k = curvature(t.mesh);
  for (double d : k.angle_defect) CHECK(std::abs(d) < 1e-12);
  const auto ma = mixed_areas(t.mesh);
  CHECK(std::accumulate(ma.begin(), ma.end(), 0.0) == doctest::Approx(0.75).epsilon(1e-13));
}

TEST_CASE("gauss-bonnet is an identity") {
  CHECK(gauss_bonnet_error(tetrahedron()) < 1e-12);
  CHECK(gauss_bonnet_error(flat_torus(7, 5).mesh) < 1e-12);
  // Irregular lengths still satisfy the identity.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.9, 1.1);
  const auto base = build_base_sphere(2);
  std::vector<double> jitter(base.vertices.size());
  for (auto& j : jitter) j = u(rng);
  const auto m = SurfaceMesh::from_faces(static_cast<int>(base.vertices.size()), base.faces, [&](int a, int b) {
    return (base.vertices[a] - base.vertices[b]).norm() * jitter[a] * jitter[b];
  });
  m.check_triangle_inequalities();
  CHECK(gauss_bonnet_error(m) < 1e-9);
  CHECK(gauss_bonnet_error(kostlan_surface(3, 3, 4).mesh) < 1e-9);
}

TEST_CASE("rescaling") {
  const auto s = line_surface(3);
  const double a = total_area(s.mesh);
  const auto r = s.mesh.rescaled(2.5);
  CHECK(total_area(r) == doctest::Approx(a * 6.25).epsilon(1e-13));
  CHECK(r.max_edge_length() == doctest::Approx(2.5 * s.mesh.max_edge_length()).epsilon(1e-15));
}

TEST_CASE("line lifts to the round sphere") {
  const auto p = sample_kostlan(1, {21, 0});
  BranchedCover cover(p, Pencil::random(p, {21, 1}));
  const auto base = build_base_sphere(3);
  const auto lifted = lift_mesh(cover, base);
  CHECK(lifted.mesh.n_vertices() == static_cast<int>(base.vertices.size()));
  CHECK(lifted.mesh.n_faces() == static_cast<int>(base.faces.size()));
  CHECK(euler_genus(lifted.mesh).genus == 0);
  // Same combinatorics as the base, lengths are distances of the embedded endpoints.
  const auto& topo = lifted.mesh.topology();
  const auto& prov = lifted.mesh.provenance();
  const auto& emb = lifted.mesh.embedding();
  for (int f = 0; f < lifted.mesh.n_faces(); ++f) {
    const auto t = topo.face_vertices(f);
    const auto b = base.faces[lifted.face_base[f]];
    CHECK(std::is_permutation(b.begin(), b.end(), std::array<int, 3>{prov[t[0]].base_vertex, prov[t[1]].base_vertex,
                                                                     prov[t[2]].base_vertex}.begin()));
  }
  for (int e = 0; e < lifted.mesh.n_edges(); ++e) {
    const auto [u, v] = topo.edge_vertices(e);
    CHECK(lifted.mesh.length(e) == doctest::Approx(fs_distance(emb[u], emb[v])).epsilon(1e-12));
    CHECK(normalized_value(p, emb[u]) < 1e-12);
  }

  const auto full = line_surface(4);
  CHECK(total_area(full.mesh) == doctest::Approx(kPi).epsilon(0.01));
}

TEST_CASE("area converges under refinement") {
  for (int d : {1, 2}) {
    double previous = 1e9;
    for (int level = 2; level <= 4; ++level) {
      const double err = std::abs(total_area(kostlan_surface(d, level, 3).mesh) - d * kPi);
      CHECK(err < previous);
      previous = err;
    }
  }
}

TEST_CASE("curvature of the round line") {
  // Uniform lift of the icosahedral sphere, no adaptive refinement.
  const auto p = sample_kostlan(1, {5, 0});
  BranchedCover cover(p, Pencil::random(p, {5, 1}));
  const auto m = lift_mesh(cover, build_base_sphere(4)).mesh;
  const auto k = curvature(m);
  int close = 0;
  for (int v = 0; v < m.n_vertices(); ++v) {
    CHECK(k.smoothed[v] == doctest::Approx(4.0).epsilon(0.05));
    close += std::abs(k.pointwise[v] - 4.0) <= 0.2;
  }
  CHECK(close >= 0.98 * m.n_vertices());
}

TEST_CASE("lifted genus and riemann-hurwitz") {
  struct Case {
    int d;
    std::uint64_t seed;
  };
  for (auto [d, seed] : {Case{2, 1}, Case{3, 2}, Case{4, 3}, Case{5, 4}}) {
    CAPTURE(d);
    const auto s = kostlan_surface(d, 4, seed);
    const auto eg = euler_genus(s.mesh);
    const int b = static_cast<int>(s.branches.size());
    CHECK(b == d * (d - 1));
    CHECK(eg.genus == (d - 1) * (d - 2) / 2);
    CHECK(eg.chi == 2 * d - b);
    CHECK(gauss_bonnet_error(s.mesh) < 1e-9);
    CHECK(total_area(s.mesh) == doctest::Approx(d * kPi).epsilon(0.01));
    CHECK(s.mesh.min_angle_deg() > 0);
    s.mesh.check_triangle_inequalities();
    const auto k = curvature(s.mesh);
    INFO("raw max " << k.max_curvature() << ", smoothed max " << k.max_smoothed());
    if (d <= 4) CHECK(k.max_smoothed() <= 4.5);
    // Every vertex sits on the curve.
    const auto p = sample_kostlan(d, {seed, 0});
    double worst = 0;
    for (const auto& x : s.mesh.embedding()) worst = std::max(worst, normalized_value(p, x));
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("mesh text round trip") {
  const auto s = kostlan_surface(3, 2, 2);
  std::stringstream off, len;
  write_off(off, s.mesh);
  write_lengths(len, s.mesh);
  const auto m = read_mesh(off, len);
  REQUIRE(m.n_vertices() == s.mesh.n_vertices());
  REQUIRE(m.n_faces() == s.mesh.n_faces());
  REQUIRE(m.n_edges() == s.mesh.n_edges());
  for (int f = 0; f < m.n_faces(); ++f) {
    CHECK(m.topology().face_vertices(f) == s.mesh.topology().face_vertices(f));
    CHECK(m.face_lengths(f) == s.mesh.face_lengths(f));
  }
  for (int v = 0; v < m.n_vertices(); ++v) CHECK(m.embedding()[v] == s.mesh.embedding()[v]);
}

TEST_CASE("relabeling") {
  const auto s = kostlan_surface(3, 2, 5);
  std::vector<int> perm(s.mesh.n_vertices());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto r = s.mesh.relabeled(perm);
  CHECK(total_area(r) == doctest::Approx(total_area(s.mesh)).epsilon(1e-13));
  const auto k0 = curvature(s.mesh), k1 = curvature(r);
  for (int v = 0; v < s.mesh.n_vertices(); ++v) {
    CHECK(k1.angle_defect[perm[v]] == doctest::Approx(k0.angle_defect[v]).epsilon(1e-12));
  }
  for (int e = 0; e < s.mesh.n_edges(); ++e) {
    const auto [u, v] = s.mesh.topology().edge_vertices(e);
    CHECK(r.topology().has_edge(perm[u], perm[v]));
  }
}

TEST_CASE("sliver repair") {
  // Sheared periodic grid cut along the long diagonal of every cell.
  const int n = 6;
  const auto t = flat_torus(n, n);
  std::vector<std::array<int, 3>> faces;
  for (int f = 0; f < t.mesh.n_faces(); ++f) faces.push_back(t.mesh.topology().face_vertices(f));
  auto m = SurfaceMesh::from_faces(t.mesh.n_vertices(), faces, [&](int u, int v) {
    auto wrap = [&](double x) { return n * (x - std::round(x)); };
    const double du = wrap(t.x[u] - t.x[v]), dv = wrap(t.y[u] - t.y[v]);
    return std::hypot(du + 0.95 * dv, 0.1 * dv);
  });
  const double before = m.min_angle_deg();
  CHECK(before < 5.0);
  const int flips = m.repair_slivers(5.0);
  CHECK(flips > 0);
  CHECK(m.min_angle_deg() > before);
  CHECK(m.min_angle_deg() > 5.0);
  CHECK(euler_genus(m).genus == 1);
  CHECK(gauss_bonnet_error(m) < 1e-9);
  m.check_triangle_inequalities();
  CHECK(total_area(m) == doctest::Approx(n * n * 0.1).epsilon(1e-9));
}

TEST_CASE("triangle inequality violations are reported") {
  const std::vector<std::array<int, 3>> faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  const auto m = SurfaceMesh::from_faces(4, faces, [](int u, int v) { return u + v == 1 ? 3.0 : 1.0; });
  CHECK_THROWS_AS(m.check_triangle_inequalities(), StructuralError);
}
