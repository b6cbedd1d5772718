#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "rcl/errors.hpp"
#include "rcl/spectral.hpp"
#include "support.hpp"

using namespace rcl;
using rcl::testing::flat_torus;
using rcl::testing::kostlan_surface;
using rcl::testing::line_surface;
using rcl::testing::tetrahedron;

TEST_CASE("tetrahedron operators") {
  const auto lap = assemble(tetrahedron());
  const Eigen::MatrixXd s = Eigen::MatrixXd(lap.stiffness);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(s(i, j) == doctest::Approx(-1 / std::sqrt(3.0)).epsilon(1e-14));
    }
  }
  CHECK(lap.mass.sum() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
  CHECK((lap.stiffness * ones).cwiseAbs().maxCoeff() < 1e-15);

  const auto dense = dense_eigenpairs(lap, 4);
  CHECK(dense.eigenvalues(0) == doctest::Approx(0.0));
  for (int i = 1; i < 4; ++i) CHECK(dense.eigenvalues(i) == doctest::Approx(16.0 / 3).epsilon(1e-8));
  const auto it = lowest_eigenpairs(lap, 4);
  for (int i = 1; i < 4; ++i) CHECK(it.eigenvalues(i) == doctest::Approx(16.0 / 3).epsilon(1e-8));
}

TEST_CASE("tetrahedron rescaled by two") {
  const auto t = tetrahedron();
  const auto res = dense_eigenpairs(assemble(t), 4);
  const auto big = dense_eigenpairs(assemble(t.rescaled(2.0)), 4);
  CHECK(big.lambda1() == doctest::Approx(4.0 / 3).epsilon(1e-10));
  CHECK(rescale_check(t, res, 1.0).passed);
  const auto rep = rescale_check(t, res, 2.0);
  CHECK(rep.passed);
  CHECK(rep.max_relative_error < 1e-8);
}

TEST_CASE("degenerate faces are rejected") {
  const std::vector<std::array<int, 3>> faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  const auto flat = SurfaceMesh::from_faces(4, faces, [](int u, int v) { return u + v == 1 ? 2.0 : 1.0; });
  CHECK_THROWS_AS(assemble(flat), AssemblyError);
}

TEST_CASE("iterative and dense solvers agree") {
  for (int d : {1, 2, 3}) {
    const auto small = rcl::testing::coarse_surface(d, 11);
    REQUIRE(small.mesh.n_vertices() <= 500);
    const auto slap = assemble(small.mesh);
    const auto it = lowest_eigenpairs(slap, 6);
    const auto dn = dense_eigenpairs(slap, 6);
    for (int i = 1; i < 6; ++i) {
      CHECK(std::abs(it.eigenvalues(i) - dn.eigenvalues(i)) <= 1e-9 * dn.eigenvalues(i));
    }
  }
  const auto torus = flat_torus(12, 10).mesh;
  const auto lap = assemble(torus);
  CHECK(std::abs(lowest_eigenpairs(lap, 5).lambda1() - dense_eigenpairs(lap, 5).lambda1()) <=
        1e-9 * dense_eigenpairs(lap, 5).lambda1());
}

TEST_CASE("constant mode and orthonormality") {
  const auto s = kostlan_surface(3, 2, 12);
  const auto lap = assemble(s.mesh);
  const auto res = lowest_eigenpairs(lap, 5);
  CHECK(std::abs(res.eigenvalues(0)) < 1e-9);
  CHECK(res.eigenvalues(1) > 1e-3);
  const Eigen::VectorXd c = res.eigenfunctions.col(0);
  CHECK((c.array() - c(0)).abs().maxCoeff() < 1e-9 * std::abs(c(0)));
  const Eigen::MatrixXd g = res.eigenfunctions.transpose() * lap.mass.asDiagonal() * res.eigenfunctions;
  CHECK((g - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 0; i < 5; ++i) {
    CHECK(res.residuals[i] < 1e-8);
    CHECK(eigen_residual(lap, res.eigenvalues(i), res.eigenfunctions.col(i)) < 1e-8);
    if (i > 0) CHECK(res.eigenvalues(i) >= res.eigenvalues(i - 1));
  }
}

TEST_CASE("scaling law on a cubic") {
  const auto s = kostlan_surface(3, 2, 13);
  const auto res = lowest_eigenpairs(assemble(s.mesh), 4);
  const auto rep = rescale_check(s.mesh, res, std::sqrt(3.0));
  CHECK(rep.passed);
  CHECK(rep.observed[1] == doctest::Approx(res.lambda1() / 3).epsilon(1e-8));
}

TEST_CASE("relabeling leaves the spectrum unchanged") {
  const auto s = kostlan_surface(2, 2, 14);
  std::vector<int> perm(s.mesh.n_vertices());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(5);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto a = lowest_eigenpairs(assemble(s.mesh), 5);
  const auto b = lowest_eigenpairs(assemble(s.mesh.relabeled(perm)), 5);
  for (int i = 1; i < 5; ++i) CHECK(b.eigenvalues(i) == doctest::Approx(a.eigenvalues(i)).epsilon(1e-9));
}

TEST_CASE("round line spectrum") {
  const auto s = line_surface(4);
  const auto res = lowest_eigenpairs(assemble(s.mesh), 5);
  for (int i = 1; i <= 3; ++i) CHECK(res.eigenvalues(i) == doctest::Approx(8.0).epsilon(0.02));
  // next eigenvalue of the radius-1/2 sphere is 24
  CHECK(res.eigenvalues(4) > 20.0);
}

TEST_CASE("flat torus spectrum") {
  // Unit square: first nonzero eigenvalue (2 pi)^2 with multiplicity 4.
  const auto t = flat_torus(40, 40);
  const auto res = lowest_eigenpairs(assemble(t.mesh), 6);
  const double want = 4 * std::numbers::pi * std::numbers::pi;
  for (int i = 1; i <= 4; ++i) CHECK(res.eigenvalues(i) == doctest::Approx(want).epsilon(0.02));
}
