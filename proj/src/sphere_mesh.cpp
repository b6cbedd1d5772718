#include "rcl/sphere_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>
#include <unordered_map>

#include <Eigen/Geometry>

#include "rcl/errors.hpp"
#include "rcl/projective.hpp"

namespace rcl {

namespace {

std::uint64_t edge_key(int u, int v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

double orientation(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  return (b - a).cross(c - a).dot(a + b + c);
}

double min_angle_deg(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
  auto corner = [](double opp, double s1, double s2) {
    const double cosv = std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0);
    return std::acos(cosv);
  };
  const double m = std::min({corner(la, lb, lc), corner(lb, lc, la), corner(lc, la, lb)});
  return m * 180 / std::numbers::pi;
}

// Directed-edge index for conforming bisection.
class Bisector {
 public:
  explicit Bisector(SphereMesh& mesh) : mesh_(mesh) {
    for (int f = 0; f < static_cast<int>(mesh_.faces.size()); ++f) index_face(f);
  }

  // One bisection along the longest-edge propagation path starting at f.
  void bisect_once(int f) {
    int cur = f;
    for (int guard = 0; guard < 1 << 20; ++guard) {
      const auto [u, v] = longest_edge(cur);
      const int g = face_of(v, u);
      const auto [gu, gv] = longest_edge(g);
      if (gu == v && gv == u) {
        split_edge(u, v);
        return;
      }
      cur = g;
    }
    throw StructuralError("longest-edge propagation did not terminate");
  }

  int bisections() const { return bisections_; }

 private:
  void index_face(int f) {
    const auto& t = mesh_.faces[f];
    for (int s = 0; s < 3; ++s) edges_[edge_key(t[s], t[(s + 1) % 3])] = f;
  }

  int face_of(int u, int v) const {
    auto it = edges_.find(edge_key(u, v));
    if (it == edges_.end()) throw StructuralError("base mesh is not closed");
    return it->second;
  }

  // Longest edge as directed in face f; ties broken by vertex ids so both
  // faces sharing an edge agree on it.
  std::pair<int, int> longest_edge(int f) const {
    const auto& t = mesh_.faces[f];
    std::tuple<double, int, int> best{-1.0, 0, 0};
    int best_s = 0;
    for (int s = 0; s < 3; ++s) {
      const int u = t[s], v = t[(s + 1) % 3];
      const double len = (mesh_.vertices[u] - mesh_.vertices[v]).squaredNorm();
      std::tuple<double, int, int> key{len, std::min(u, v), std::max(u, v)};
      if (key > best) {
        best = key;
        best_s = s;
      }
    }
    return {t[best_s], t[(best_s + 1) % 3]};
  }

  // Rotates face f so that it reads (u, v, apex).
  int apex(int f, int u, int v) const {
    const auto& t = mesh_.faces[f];
    for (int s = 0; s < 3; ++s) {
      if (t[s] == u && t[(s + 1) % 3] == v) return t[(s + 2) % 3];
    }
    throw StructuralError("edge not found in face");
  }

  void split_edge(int u, int v) {
    const int f1 = face_of(u, v);
    const int f2 = face_of(v, u);
    const int a = apex(f1, u, v);
    const int b = apex(f2, v, u);
    const int m = static_cast<int>(mesh_.vertices.size());
    mesh_.vertices.push_back((mesh_.vertices[u] + mesh_.vertices[v]).normalized());
    mesh_.branch_index.push_back(-1);
    edges_.erase(edge_key(u, v));
    edges_.erase(edge_key(v, u));
    const int n1 = static_cast<int>(mesh_.faces.size());
    const int n2 = n1 + 1;
    mesh_.faces[f1] = {u, m, a};
    mesh_.faces.push_back({m, v, a});
    mesh_.faces[f2] = {v, m, b};
    mesh_.faces.push_back({m, u, b});
    index_face(f1);
    index_face(n1);
    index_face(f2);
    index_face(n2);
    ++bisections_;
  }

  SphereMesh& mesh_;
  std::unordered_map<std::uint64_t, int> edges_;
  int bisections_ = 0;
};

}  // namespace

int SphereMesh::euler_characteristic() const {
  // Closed triangulation: E = 3F/2.
  return static_cast<int>(vertices.size()) - static_cast<int>(faces.size() * 3 / 2) +
         static_cast<int>(faces.size());
}

double nominal_edge_angle(int level) {
  // Central angle of the regular icosahedron edge is atan(2).
  return std::atan(2.0) / std::ldexp(1.0, level);
}

SphereMesh build_base_sphere(int level) {
  if (level < 0) throw DomainError("refinement level must be non-negative");
  const double phi = (1 + std::sqrt(5.0)) / 2;
  SphereMesh mesh;
  const double raw[12][3] = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                             {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                             {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (const auto& r : raw) mesh.vertices.push_back(Eigen::Vector3d(r[0], r[1], r[2]).normalized());
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto& f : mesh.faces) {
    if (orientation(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]) < 0) {
      std::swap(f[1], f[2]);
    }
  }
  for (int l = 0; l < level; ++l) {
    std::unordered_map<std::uint64_t, int> mid;
    auto midpoint = [&](int u, int v) {
      const auto key = edge_key(std::min(u, v), std::max(u, v));
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const int m = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back((mesh.vertices[u] + mesh.vertices[v]).normalized());
      mid.emplace(key, m);
      return m;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.faces.size() * 4);
    for (const auto& f : mesh.faces) {
      const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    mesh.faces = std::move(next);
  }
  mesh.branch_index.assign(mesh.vertices.size(), -1);
  return mesh;
}

SphereMesh build_base_sphere(int level, std::span<const Eigen::Vector3d> refine_near, double radius,
                             int rounds) {
  SphereMesh mesh = build_base_sphere(level);
  if (refine_near.empty() || rounds <= 0) return mesh;
  const double target = max_face_diameter(mesh) / std::ldexp(1.0, rounds);
  refine_faces(mesh, [&](const SphereMesh& m, int f) {
    if (face_diameter(m, f) <= target) return false;
    for (const auto& x : refine_near) {
      if (face_distance(m, f, x) <= radius) return true;
    }
    return false;
  });
  return mesh;
}

double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

double face_diameter(const SphereMesh& mesh, int f) {
  const auto& t = mesh.faces[f];
  const auto& v = mesh.vertices;
  return std::max({angle_between(v[t[0]], v[t[1]]), angle_between(v[t[1]], v[t[2]]),
                   angle_between(v[t[2]], v[t[0]])});
}

double max_face_diameter(const SphereMesh& mesh) {
  double m = 0;
  for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) m = std::max(m, face_diameter(mesh, f));
  return m;
}

bool face_contains(const SphereMesh& mesh, int f, const Eigen::Vector3d& x) {
  const auto& t = mesh.faces[f];
  const auto& a = mesh.vertices[t[0]];
  const auto& b = mesh.vertices[t[1]];
  const auto& c = mesh.vertices[t[2]];
  return x.dot(a + b + c) > 0 && x.dot(a.cross(b)) >= 0 && x.dot(b.cross(c)) >= 0 &&
         x.dot(c.cross(a)) >= 0;
}

double face_distance(const SphereMesh& mesh, int f, const Eigen::Vector3d& x) {
  if (face_contains(mesh, f, x)) return 0;
  const auto& t = mesh.faces[f];
  const auto& v = mesh.vertices;
  return std::min({arc_distance(v[t[0]], v[t[1]], x), arc_distance(v[t[1]], v[t[2]], x),
                   arc_distance(v[t[2]], v[t[0]], x)});
}

int locate_face(const SphereMesh& mesh, const Eigen::Vector3d& x) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
    if (face_contains(mesh, f, x)) return f;
  }
  for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
    const double d = face_distance(mesh, f, x);
    if (d < best_d) {
      best_d = d;
      best = f;
    }
  }
  return best;
}

double min_corner_angle_deg(const SphereMesh& mesh, int f) {
  const auto& t = mesh.faces[f];
  return min_angle_deg(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
}

int refine_faces(SphereMesh& mesh, const std::function<bool(const SphereMesh&, int)>& needs_split,
                 int max_bisections) {
  Bisector bisector(mesh);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
      while (needs_split(mesh, f)) {
        if (bisector.bisections() >= max_bisections) return bisector.bisections();
        bisector.bisect_once(f);
        changed = true;
      }
    }
  }
  return bisector.bisections();
}

void bisect_faces(SphereMesh& mesh, std::span<const int> faces) {
  // Indices get reused by splits, so a face is skipped once its vertex
  // triple has changed.
  std::vector<std::array<int, 3>> targets;
  for (int f : faces) targets.push_back(mesh.faces[f]);
  Bisector bisector(mesh);
  for (std::size_t n = 0; n < faces.size(); ++n) {
    if (mesh.faces[faces[n]] == targets[n]) bisector.bisect_once(faces[n]);
  }
}

void insert_branch_vertices(SphereMesh& mesh, const std::vector<BranchPoint>& branches) {
  for (int bi = 0; bi < static_cast<int>(branches.size()); ++bi) {
    const Eigen::Vector3d x = branches[bi].sphere;
    bool placed = false;
    for (int attempt = 0; attempt < 40 && !placed; ++attempt) {
      const int f = locate_face(mesh, x);
      const auto tri = mesh.faces[f];

      std::vector<std::vector<int>> star(mesh.vertices.size());
      for (int g = 0; g < static_cast<int>(mesh.faces.size()); ++g) {
        for (int v : mesh.faces[g]) {
          if (v == tri[0] || v == tri[1] || v == tri[2]) star[v].push_back(g);
        }
      }
      auto touches_branch = [&](int v) {
        if (mesh.branch_index[v] >= 0) return true;
        for (int g : star[v]) {
          for (int w : mesh.faces[g]) {
            if (mesh.branch_index[w] >= 0) return true;
          }
        }
        return false;
      };

      double best_quality = -1;
      int best_option = -1;  // 0..2 snap corner, 3 split
      for (int s = 0; s < 3; ++s) {
        const int c = tri[s];
        if (touches_branch(c)) continue;
        const Eigen::Vector3d saved = mesh.vertices[c];
        mesh.vertices[c] = x;
        double q = 180;
        for (int g : star[c]) {
          const auto& t = mesh.faces[g];
          const auto& a = mesh.vertices[t[0]];
          const auto& b = mesh.vertices[t[1]];
          const auto& cc = mesh.vertices[t[2]];
          q = orientation(a, b, cc) <= 0 ? -1 : std::min(q, min_angle_deg(a, b, cc));
          if (q < 0) break;
        }
        mesh.vertices[c] = saved;
        if (q > best_quality) {
          best_quality = q;
          best_option = s;
        }
      }
      bool corners_free = true;
      for (int s = 0; s < 3; ++s) corners_free = corners_free && mesh.branch_index[tri[s]] < 0;
      if (corners_free) {
        const auto& a = mesh.vertices[tri[0]];
        const auto& b = mesh.vertices[tri[1]];
        const auto& c = mesh.vertices[tri[2]];
        double q = std::min({min_angle_deg(x, a, b), min_angle_deg(x, b, c), min_angle_deg(x, c, a)});
        if (orientation(x, a, b) <= 0 || orientation(x, b, c) <= 0 || orientation(x, c, a) <= 0) q = -1;
        if (q > best_quality) {
          best_quality = q;
          best_option = 3;
        }
      }
      const double required = attempt < 20 ? 15.0 : 2.0;
      if (best_option >= 0 && best_quality >= required) {
        if (best_option < 3) {
          const int c = tri[best_option];
          mesh.vertices[c] = x;
          mesh.branch_index[c] = bi;
        } else {
          const int m = static_cast<int>(mesh.vertices.size());
          mesh.vertices.push_back(x);
          mesh.branch_index.push_back(bi);
          mesh.faces[f] = {tri[0], tri[1], m};
          mesh.faces.push_back({tri[1], tri[2], m});
          mesh.faces.push_back({tri[2], tri[0], m});
        }
        placed = true;
      } else {
        const int fs[1] = {f};
        bisect_faces(mesh, fs);
      }
    }
    if (!placed) throw StructuralError("could not insert a branch point into the base mesh");
  }
}

}  // namespace rcl
