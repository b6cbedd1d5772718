#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_map>

#include "rcl/errors.hpp"
#include "rcl/projective.hpp"
#include "rcl/surface_mesh.hpp"

namespace rcl {

namespace {

std::uint64_t directed_key(int u, int v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

// Fibers and sheet maps survive between adaptive rounds as long as the base
// vertex has not moved.
struct LiftCache {
  struct Fiber {
    Eigen::Vector3d sphere;
    FiberRoots roots;
  };
  std::unordered_map<int, Fiber> fibers;
  // Regular u < v: sheet k over u continues to sheet perm[k] over v.
  std::unordered_map<std::uint64_t, std::vector<int>> perms;
  // Regular u, branch vertex v: sheet k over u lands on branch label[k].
  std::unordered_map<std::uint64_t, std::vector<int>> labels;
  int tracked = 0;
};

class Lifter {
 public:
  Lifter(const BranchedCover& cover, const SphereMesh& base, LiftCache& cache,
         const TrackOptions& opts)
      : cover_(cover), base_(base), cache_(cache), branches_(cover.branch_points()),
        d_(cover.degree()), track_opts_(opts) {}

  LiftedSurface run() {
    const int nb = static_cast<int>(base_.vertices.size());
    for (int v = 0; v < nb; ++v) {
      if (!is_branch(v)) fiber(v);
    }
    assign_vertices();

    std::vector<std::array<int, 3>> faces;
    std::vector<int> face_base;
    faces.reserve(base_.faces.size() * d_);
    for (int f = 0; f < static_cast<int>(base_.faces.size()); ++f) {
      const auto& t = base_.faces[f];
      int r = 0;
      while (r < 3 && is_branch(t[r])) ++r;
      if (r == 3) throw LiftInconsistentError("base face with three branch corners");
      const int c0 = t[r], c1 = t[(r + 1) % 3], c2 = t[(r + 2) % 3];
      if (is_branch(c1) && is_branch(c2)) {
        throw LiftInconsistentError("base edge joins two branch vertices");
      }
      for (int k = 0; k < d_; ++k) {
        int v1, v2;
        int k1 = -1;
        if (is_branch(c1)) {
          v1 = branch_vertex(c1, label(c0, c1)[k]);
        } else {
          k1 = perm(c0, c1)[k];
          v1 = lifted_[c1][k1];
        }
        if (is_branch(c2)) {
          const int l0 = label(c0, c2)[k];
          const int l1 = label(c1, c2)[k1];
          if (l0 != l1) throw LiftInconsistentError("sheet labels disagree around a branch vertex");
          v2 = branch_vertex(c2, l0);
        } else {
          const int k2 = perm(c0, c2)[k];
          if (k1 >= 0 && perm(c1, c2)[k1] != k2) {
            throw LiftInconsistentError("monodromy around a base face is not trivial");
          }
          if (k1 < 0) {
            const int l = label(c2, c1)[k2];
            if (branch_vertex(c1, l) != v1) {
              throw LiftInconsistentError("sheet labels disagree around a branch vertex");
            }
          }
          v2 = lifted_[c2][k2];
        }
        faces.push_back(rotate_back(r, lifted_[c0][k], v1, v2));
        face_base.push_back(f);
      }
    }

    SurfaceMesh mesh;
    try {
      mesh = SurfaceMesh::from_faces(n_lifted_, faces, [&](int u, int v) {
        return fs_distance(embedding_[u], embedding_[v]);
      });
    } catch (const StructuralError& e) {
      throw LiftInconsistentError(std::string("lifted faces do not form a closed surface: ") +
                                  e.what());
    }
    mesh.set_embedding(std::move(embedding_));
    mesh.set_provenance(std::move(provenance_));

    LiftedSurface out;
    out.mesh = std::move(mesh);
    out.base = base_;
    out.branches = branches_;
    out.face_base = std::move(face_base);
    out.stats.base_vertices = nb;
    out.stats.base_faces = static_cast<int>(base_.faces.size());
    out.stats.tracked_edges = cache_.tracked;
    return out;
  }

 private:
  bool is_branch(int v) const { return base_.branch_index[v] >= 0; }

  const FiberRoots& fiber(int v) {
    auto it = cache_.fibers.find(v);
    if (it != cache_.fibers.end()) {
      if (it->second.sphere == base_.vertices[v]) return it->second.roots;
      cache_.perms.clear();
      cache_.labels.clear();
    }
    auto& slot = cache_.fibers[v];
    slot.sphere = base_.vertices[v];
    slot.roots = cover_.fiber_roots(base_from_sphere(base_.vertices[v]));
    return slot.roots;
  }

  const std::vector<int>& perm(int u, int v) {
    if (u > v) {
      const auto& fwd = perm(v, u);
      auto& inv = inverse_[directed_key(u, v)];
      if (inv.empty()) {
        inv.assign(d_, -1);
        for (int k = 0; k < d_; ++k) inv[fwd[k]] = k;
      }
      return inv;
    }
    auto key = directed_key(u, v);
    auto it = cache_.perms.find(key);
    if (it != cache_.perms.end()) return it->second;
    const BasePoint path[2] = {fiber(u).base, fiber(v).base};
    TrackResult tr = cover_.track(path, fiber(u), track_opts_, &branches_);
    ++cache_.tracked;
    return cache_.perms[key] = std::move(tr.permutation);
  }

  const std::vector<int>& label(int u, int v) {
    auto key = directed_key(u, v);
    auto it = cache_.labels.find(key);
    if (it != cache_.labels.end()) return it->second;
    const auto& bp = branches_[base_.branch_index[v]];
    ++cache_.tracked;
    return cache_.labels[key] = cover_.track_into_branch(fiber(u), bp, track_opts_);
  }

  int branch_vertex(int v, int m) const { return lifted_[v][m]; }

  void assign_vertices() {
    const int nb = static_cast<int>(base_.vertices.size());
    lifted_.assign(nb, {});
    for (int v = 0; v < nb; ++v) {
      if (is_branch(v)) {
        const auto& bp = branches_[base_.branch_index[v]];
        for (int m = 0; m + 1 < d_; ++m) {
          const bool ram = m == d_ - 2;
          const Complex w = ram ? bp.ramification : bp.simple[m];
          add_vertex(v, ram ? -1 : m, cover_.embed(bp.base, w));
        }
      } else {
        const auto& fr = fiber(v);
        for (int k = 0; k < d_; ++k) add_vertex(v, k, cover_.embed(fr.base, fr.roots[k]));
      }
    }
  }

  void add_vertex(int base_vertex, int sheet, const Eigen::Vector3cd& x) {
    lifted_[base_vertex].push_back(n_lifted_++);
    embedding_.push_back(x);
    provenance_.push_back({base_vertex, sheet});
  }

  // Restores the base face's corner order after starting at corner r.
  static std::array<int, 3> rotate_back(int r, int a, int b, int c) {
    std::array<int, 3> t;
    t[r] = a;
    t[(r + 1) % 3] = b;
    t[(r + 2) % 3] = c;
    return t;
  }

  const BranchedCover& cover_;
  const SphereMesh& base_;
  LiftCache& cache_;
  const std::vector<BranchPoint>& branches_;
  const int d_;
  TrackOptions track_opts_;
  std::vector<std::vector<int>> lifted_;
  std::vector<Eigen::Vector3cd> embedding_;
  std::vector<VertexProvenance> provenance_;
  std::unordered_map<std::uint64_t, std::vector<int>> inverse_;
  int n_lifted_ = 0;
};

LiftedSurface lift_with_cache(const BranchedCover& cover, const SphereMesh& base, LiftCache& cache,
                              const TrackOptions& opts) {
  if (base.branch_index.size() != base.vertices.size()) {
    throw DomainError("base mesh lacks branch vertex markers");
  }
  int marked = 0;
  for (int b : base.branch_index) marked += b >= 0;
  if (marked != static_cast<int>(cover.branch_points().size())) {
    throw DomainError("every branch point must be a base vertex");
  }
  return Lifter(cover, base, cache, opts).run();
}

}  // namespace

LiftedSurface lift_mesh(const BranchedCover& cover, const SphereMesh& base) {
  LiftCache cache;
  return lift_with_cache(cover, base, cache, TrackOptions{});
}

LiftedSurface build_surface(const BranchedCover& cover, const LiftOptions& opts) {
  const auto& branches = cover.branch_points();
  std::vector<Eigen::Vector3d> centers;
  for (const auto& bp : branches) centers.push_back(bp.sphere);
  const double nominal = nominal_edge_angle(opts.level);

  SphereMesh base =
      build_base_sphere(opts.level, centers, opts.refine_radius_factor * nominal, opts.refine_rounds);

  // Keep faces near a branch point small relative to its nearest neighbour.
  std::vector<double> gap(centers.size(), std::numbers::pi);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = 0; j < centers.size(); ++j) {
      if (i != j) gap[i] = std::min(gap[i], angle_between(centers[i], centers[j]));
    }
  }
  refine_faces(base, [&](const SphereMesh& m, int f) {
    const double diam = face_diameter(m, f);
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const double limit = opts.branch_separation_factor * gap[i];
      if (diam > limit && face_distance(m, f, centers[i]) < gap[i] / 2) return true;
    }
    return false;
  });
  insert_branch_vertices(base, branches);

  LiftCache cache;
  const double target = opts.max_edge_factor * nominal / 2;
  LiftedSurface out;
  int rounds = 0;
  for (;; ++rounds) {
    out = lift_with_cache(cover, base, cache, opts.track);
    if (rounds >= opts.max_adaptive_rounds) break;
    std::vector<int> long_faces;
    const auto& mesh = out.mesh;
    for (int f = 0; f < mesh.n_faces(); ++f) {
      const auto l = mesh.face_lengths(f);
      if (std::max({l[0], l[1], l[2]}) > target) long_faces.push_back(out.face_base[f]);
    }
    if (long_faces.empty()) break;
    std::sort(long_faces.begin(), long_faces.end());
    long_faces.erase(std::unique(long_faces.begin(), long_faces.end()), long_faces.end());
    bisect_faces(base, long_faces);
  }
  out.stats.adaptive_rounds = rounds;
  out.stats.flips = out.mesh.repair_slivers(opts.min_angle_deg);
  return out;
}

}  // namespace rcl
