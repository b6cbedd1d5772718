#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "rcl/errors.hpp"
#include "rcl/projective.hpp"

using namespace rcl;

namespace {

HomogeneousPoly3 conic() {
  HomogeneousPoly3 p(2);
  p[{1, 1, 0}] = 1.0;
  p[{0, 0, 2}] = 1.0;
  return p;
}

// Closed loop of base points on the sphere circle of angular radius r around c.
std::vector<BasePoint> loop_around(const Eigen::Vector3d& c, double r, int n = 96) {
  Eigen::Vector3d u = c.unitOrthogonal();
  Eigen::Vector3d v = c.cross(u);
  std::vector<BasePoint> path;
  for (int k = 0; k <= n; ++k) {
    const double t = 2 * std::numbers::pi * (k % n) / n;
    const Eigen::Vector3d x = std::cos(r) * c + std::sin(r) * (std::cos(t) * u + std::sin(t) * v);
    path.push_back(base_from_sphere(x));
  }
  return path;
}

bool is_transposition(const std::vector<int>& perm) {
  int moved = 0;
  for (std::size_t k = 0; k < perm.size(); ++k) {
    if (perm[k] != static_cast<int>(k)) {
      ++moved;
      if (perm[perm[k]] != static_cast<int>(k)) return false;
    }
  }
  return moved == 2;
}

int cycle_length(const std::vector<int>& perm) {
  int len = 1;
  for (int k = perm[0]; k != 0; k = perm[k]) ++len;
  return len;
}

}  // namespace

TEST_CASE("fubini-study distance") {
  const Eigen::Vector3cd e0 = Eigen::Vector3cd::UnitX(), e1 = Eigen::Vector3cd::UnitY();
  CHECK(fs_distance(e0, e1) == doctest::Approx(std::numbers::pi / 2));
  CHECK(fs_distance(e0, e0) == 0.0);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int t = 0; t < 50; ++t) {
    Eigen::Vector3cd p, q;
    for (int m = 0; m < 3; ++m) {
      p[m] = {g(rng), g(rng)};
      q[m] = {g(rng), g(rng)};
    }
    p.normalize();
    q.normalize();
    const std::complex<double> lam = std::polar(1.0, g(rng));
    CHECK(fs_distance(Eigen::Vector3cd(lam * p), q) == doctest::Approx(fs_distance(p, q)).epsilon(1e-14));
    CHECK(fs_distance(ProjPoint(p), ProjPoint(q)) == doctest::Approx(fs_distance(p, q)).epsilon(1e-14));
    CHECK(fs_distance(p, q) == doctest::Approx(std::acos(std::min(1.0, std::abs(p.dot(q))))).epsilon(1e-9));
  }
}

TEST_CASE("canonical representative") {
  const Eigen::Vector3cd x(std::complex<double>(0, 2), 1, 0);
  const ProjPoint p(x);
  CHECK(p.coords().norm() == doctest::Approx(1.0));
  CHECK(p.coords()[0].imag() == doctest::Approx(0.0));
  CHECK(p.coords()[0].real() > 0);
}

TEST_CASE("hopf coordinates") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 50; ++t) {
    const Eigen::Vector3d a = Eigen::Vector3d(g(rng), g(rng), g(rng)).normalized();
    const Eigen::Vector3d b = Eigen::Vector3d(g(rng), g(rng), g(rng)).normalized();
    CHECK((sphere_from_base(base_from_sphere(a)) - a).norm() < 1e-14);
    const double angle = std::atan2(a.cross(b).norm(), a.dot(b));
    CHECK(base_distance(base_from_sphere(a), base_from_sphere(b)) == doctest::Approx(angle / 2).epsilon(1e-12));
  }
}

TEST_CASE("fiber roots of a conic") {
  const auto p = conic();
  BranchedCover cover(p, Pencil::random(p, {3, 3}));
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    BasePoint b(std::complex<double>(g(rng), g(rng)), std::complex<double>(g(rng), g(rng)));
    b.normalize();
    const auto c = cover.fiber_polynomial(b);
    REQUIRE(c.size() == 3);
    const auto disc = std::sqrt(c[1] * c[1] - 4.0 * c[0] * c[2]);
    std::vector<Complex> want{(-c[1] + disc) / (2.0 * c[2]), (-c[1] - disc) / (2.0 * c[2])};
    const auto f = cover.fiber_roots(b);
    REQUIRE(f.roots.size() == 2);
    for (auto w : f.roots) {
      const double err = std::min(std::abs(w - want[0]), std::abs(w - want[1]));
      CHECK(err <= 1e-10 * (1 + std::abs(w)));
      CHECK(std::abs(horner(c, w).value) <= 1e-10 * coefficient_scale(c, w));
    }
  }
}

TEST_CASE("root counts at random fibers") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int d = 1; d <= 6; ++d) {
    const auto p = sample_kostlan(d, {77, static_cast<std::uint64_t>(d)});
    const auto pencil = Pencil::random(p, {77, 100});
    for (int t = 0; t < 100; ++t) {
      BasePoint b(std::complex<double>(g(rng), g(rng)), std::complex<double>(g(rng), g(rng)));
      b.normalize();
      const auto f = fiber_roots(p, pencil, b);
      CHECK(f.roots.size() == static_cast<std::size_t>(d));
    }
  }
}

TEST_CASE("d-th roots over a fixed center") {
  for (int d = 2; d <= 6; ++d) {
    // w^d = b0^(d-1) b1 in the fibers through [0:0:1]
    HomogeneousPoly3 p(d);
    p[{0, 0, d}] = 1.0;
    p[{d - 1, 1, 0}] = -1.0;
    BranchedCover cover(p, Pencil(Eigen::Matrix3cd::Identity(), p));
    BasePoint b(0.6, 0.8);
    const auto f = cover.fiber_roots(b);
    REQUIRE(f.roots.size() == static_cast<std::size_t>(d));
    const double modulus = std::pow(std::pow(0.6, d - 1) * 0.8, 1.0 / d);
    std::vector<double> args;
    for (auto w : f.roots) {
      CHECK(std::abs(w) == doctest::Approx(modulus).epsilon(1e-12));
      args.push_back(std::arg(w));
    }
    std::sort(args.begin(), args.end());
    for (int k = 1; k < d; ++k) CHECK(args[k] - args[k - 1] == doctest::Approx(2 * std::numbers::pi / d));

    // Branching over b1 = 0 and b0 = 0; each loop cycles all sheets.
    for (double z : {1.0, -1.0}) {
      const auto path = loop_around(Eigen::Vector3d(0, 0, z), 1.0);
      const auto tr = cover.track(path, cover.fiber_roots(path.front()));
      CHECK(cycle_length(tr.permutation) == d);
    }
  }
}

TEST_CASE("branch point counts") {
  const auto line = sample_kostlan(1, {1, 0});
  CHECK(discriminant_points(line, Pencil::random(line, {1, 1})).empty());

  const auto p = conic();
  CHECK(discriminant_points(p, Pencil::random(p, {2, 1})).size() == 2);

  for (std::uint64_t s = 1; s <= 3; ++s) {
    const auto q = sample_kostlan(4, {s, 0});
    const auto bps = discriminant_points(q, Pencil::random(q, {s, 1}));
    CHECK(bps.size() == 12);
    for (const auto& bp : bps) {
      CHECK(bp.multiplicity == 1);
      CHECK(bp.simple.size() == 2);
      CHECK(bp.min_root_gap > 0);
    }
  }
}

TEST_CASE("monodromy of the conic") {
  const auto p = conic();
  BranchedCover cover(p, Pencil::random(p, {5, 5}));
  const auto& bps = cover.branch_points();
  REQUIRE(bps.size() == 2);
  const double gap = std::acos(std::clamp(bps[0].sphere.dot(bps[1].sphere), -1.0, 1.0));
  const double r = std::min(0.3, gap / 3);

  const auto around = loop_around(bps[0].sphere, r);
  const auto t1 = cover.track(around, cover.fiber_roots(around.front()), {}, &bps);
  CHECK(is_transposition(t1.permutation));

  // Far from both branch points: trivial monodromy.
  Eigen::Vector3d far = -(bps[0].sphere + bps[1].sphere);
  if (far.norm() < 1e-3) far = bps[0].sphere.unitOrthogonal();
  far.normalize();
  const double rf = 0.5 * std::min(std::acos(std::clamp(far.dot(bps[0].sphere), -1.0, 1.0)),
                                   std::acos(std::clamp(far.dot(bps[1].sphere), -1.0, 1.0)));
  const auto empty = loop_around(far, rf);
  const auto t0 = cover.track(empty, cover.fiber_roots(empty.front()), {}, &bps);
  CHECK(t0.permutation == std::vector<int>{0, 1});
}

TEST_CASE("reversed path inverts the permutation") {
  const auto p = sample_kostlan(4, {8, 0});
  BranchedCover cover(p, Pencil::random(p, {8, 1}));
  const auto& bps = cover.branch_points();
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::vector<BasePoint> path;
  for (int k = 0; k < 6; ++k) {
    path.push_back(base_from_sphere(Eigen::Vector3d(g(rng), g(rng), 0.5 + std::abs(g(rng)))));
  }
  const auto fwd = cover.track(path, cover.fiber_roots(path.front()), {}, &bps);
  std::vector<BasePoint> back(path.rbegin(), path.rend());
  const auto rev = cover.track(back, fwd.end, {}, &bps);
  for (std::size_t k = 0; k < fwd.permutation.size(); ++k) {
    CHECK(rev.permutation[fwd.permutation[k]] == static_cast<int>(k));
  }
}

TEST_CASE("errors") {
  HomogeneousPoly3 p(2);
  p[{1, 1, 0}] = 1.0;  // passes through [0:0:1]
  CHECK_THROWS_AS(Pencil(Eigen::Matrix3cd::Identity(), p), PencilDegenerateError);
  const auto q = conic();
  BranchedCover cover(q, Pencil::random(q, {5, 5}));
  const auto& bps = cover.branch_points();
  const std::vector<BasePoint> through{base_from_sphere(bps[0].sphere.unitOrthogonal()),
                                       bps[0].base};
  CHECK_THROWS_AS(cover.track(through, cover.fiber_roots(through.front()), {}, &bps),
                  PathTooCloseError);
}

TEST_CASE("branch report") {
  const auto q = conic();
  std::ostringstream out;
  write_branch_report(out, discriminant_points(q, Pencil::random(q, {5, 5})));
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') >= 2);
}
