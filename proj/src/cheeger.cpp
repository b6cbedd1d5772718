#include "rcl/cheeger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>

#include "rcl/errors.hpp"

namespace rcl {

namespace {

struct FaceLayout {
  std::array<Eigen::Vector2d, 3> p;
  double area = 0;
};

FaceLayout layout(const SurfaceMesh& mesh, int f) {
  const auto l = mesh.face_lengths(f);
  FaceLayout out;
  const double x = (l[0] * l[0] + l[2] * l[2] - l[1] * l[1]) / (2 * l[0]);
  out.p[0] = {0, 0};
  out.p[1] = {l[0], 0};
  out.p[2] = {x, std::sqrt(std::max(0.0, l[2] * l[2] - x * x))};
  out.area = triangle_area(l[0], l[1], l[2]);
  return out;
}

struct FacePiece {
  double below = 0;
  CutSegment segment;
};

// Level set of the linear interpolant on face f, where vertex s carries
// value v[s]. Assumes the face has corners on both sides of t.
FacePiece face_piece(const FaceLayout& lay, int f, const std::array<double, 3>& v, double t) {
  FacePiece out;
  out.segment.face = f;
  int found = 0;
  Eigen::Vector2d q[2];
  for (int s = 0; s < 3; ++s) {
    const int n = (s + 1) % 3;
    if ((v[s] < t) == (v[n] < t)) continue;
    const double param = (t - v[s]) / (v[n] - v[s]);
    q[found] = lay.p[s] + param * (lay.p[n] - lay.p[s]);
    if (found == 0) {
      out.segment.h0 = 3 * f + s;
      out.segment.s0 = param;
    } else {
      out.segment.h1 = 3 * f + s;
      out.segment.s1 = param;
    }
    ++found;
  }
  out.segment.length = (q[1] - q[0]).norm();
  int n_below = 0, lone = -1;
  for (int s = 0; s < 3; ++s) n_below += v[s] < t;
  const bool lone_below = n_below == 1;
  for (int s = 0; s < 3; ++s) {
    if ((v[s] < t) == lone_below) lone = s;
  }
  const int a = (lone + 1) % 3, b = (lone + 2) % 3;
  const double u1 = (t - v[lone]) / (v[a] - v[lone]);
  const double u2 = (t - v[lone]) / (v[b] - v[lone]);
  const double corner = u1 * u2 * lay.area;
  out.below = lone_below ? corner : lay.area - corner;
  return out;
}

}  // namespace

Cut level_cut(const SurfaceMesh& mesh, std::span<const double> f, double t) {
  Cut cut;
  cut.level = t;
  const auto& topo = mesh.topology();
  cut.below.resize(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v) cut.below[v] = f[v] < t;
  double total = 0;
  for (int face = 0; face < mesh.n_faces(); ++face) {
    const auto tri = topo.face_vertices(face);
    const std::array<double, 3> v = {f[tri[0]], f[tri[1]], f[tri[2]]};
    const int n_below = (v[0] < t) + (v[1] < t) + (v[2] < t);
    const FaceLayout lay = layout(mesh, face);
    total += lay.area;
    if (n_below == 3) {
      cut.area_below += lay.area;
    } else if (n_below > 0) {
      const FacePiece piece = face_piece(lay, face, v, t);
      cut.area_below += piece.below;
      cut.length += piece.segment.length;
      cut.curve.push_back(piece.segment);
    }
  }
  cut.area_above = total - cut.area_below;
  return cut;
}

CheegerEstimate sweep_cut(const SurfaceMesh& mesh, std::span<const double> f,
                          const SweepOptions& opts) {
  const auto [lo_it, hi_it] = std::minmax_element(f.begin(), f.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) throw NoCutError("sweep field is constant");

  std::vector<double> levels(f.begin(), f.end());
  for (int j = 1; j <= opts.uniform_levels; ++j) {
    levels.push_back(lo + (hi - lo) * j / (opts.uniform_levels + 1));
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const std::size_t m = levels.size();

  std::vector<double> full(m + 1, 0.0), below(m, 0.0), length(m, 0.0);
  const auto& topo = mesh.topology();
  double total = 0;
  for (int face = 0; face < mesh.n_faces(); ++face) {
    const auto tri = topo.face_vertices(face);
    const std::array<double, 3> v = {f[tri[0]], f[tri[1]], f[tri[2]]};
    const double fmin = std::min({v[0], v[1], v[2]}), fmax = std::max({v[0], v[1], v[2]});
    const FaceLayout lay = layout(mesh, face);
    total += lay.area;
    // Levels t > fmax see the whole face below; fmin < t <= fmax cut it.
    const auto first_partial = std::upper_bound(levels.begin(), levels.end(), fmin) - levels.begin();
    const auto first_full = std::upper_bound(levels.begin(), levels.end(), fmax) - levels.begin();
    full[first_full] += lay.area;
    for (auto i = first_partial; i < first_full; ++i) {
      const FacePiece piece = face_piece(lay, face, v, levels[i]);
      below[i] += piece.below;
      length[i] += piece.segment.length;
    }
  }

  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = m;
  double running = 0;
  for (std::size_t i = 0; i < m; ++i) {
    running += full[i];
    const double a = running + below[i];
    const double side = std::min(a, total - a);
    if (side <= 1e-12 * total || length[i] <= 0) continue;
    const double r = length[i] / side;
    if (r < best) {
      best = r;
      best_i = i;
    }
  }
  if (best_i == m) throw NoCutError("no level set separates the surface");

  CheegerEstimate out;
  out.cut = level_cut(mesh, f, levels[best_i]);
  out.h_upper = out.cut.ratio();
  return out;
}

double buser_lower(double lambda1, double curvature_floor) {
  if (!(lambda1 > 0)) throw DomainError("lambda1 must be positive");
  const double a = std::sqrt(std::max(0.0, -curvature_floor));
  return (-a + std::sqrt(a * a + 10 * lambda1)) / 10;
}

CheegerEstimate estimate_cheeger(const SurfaceMesh& mesh, const SpectralResult& spectrum,
                                 double curvature_floor, const SweepOptions& opts) {
  CheegerEstimate best;
  best.h_upper = std::numeric_limits<double>::infinity();
  for (int j = 1; j < spectrum.size(); ++j) {
    const Eigen::VectorXd& col = spectrum.eigenfunctions.col(j);
    CheegerEstimate e = sweep_cut(mesh, std::span<const double>(col.data(), col.size()), opts);
    if (e.h_upper < best.h_upper) {
      best = std::move(e);
      best.eigenfunction = j;
    }
  }
  if (best.eigenfunction < 0) throw NoCutError("no nonconstant eigenfunction to sweep");
  best.curvature_floor = curvature_floor;
  best.h_lower = buser_lower(spectrum.lambda1(), curvature_floor);
  return best;
}

CheegerReport cheeger_inequality_report(double h_upper, double lambda1, double h_lower,
                                        double tolerance) {
  CheegerReport r;
  r.lambda1 = lambda1;
  r.h_upper = h_upper;
  r.h_lower = h_lower;
  r.cheeger_gap = lambda1 - h_upper * h_upper / 4;
  r.lower_consistent = lambda1 >= h_lower * h_lower / 4 - tolerance;
  r.bracket_ordered = h_lower <= h_upper;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> graph_distances(const SurfaceMesh& mesh, std::span<const int> sources,
                                    const std::vector<char>& allowed) {
  const auto& topo = mesh.topology();
  std::vector<double> dist(mesh.n_vertices(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int s : sources) {
    dist[s] = 0;
    heap.emplace(0.0, s);
  }
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (int h : topo.outgoing(v)) {
      const int w = topo.tip(h);
      if (!allowed[w]) continue;
      const double nd = d + mesh.halfedge_length(h);
      if (nd < dist[w]) {
        dist[w] = nd;
        heap.emplace(nd, w);
      }
    }
  }
  return dist;
}

int full_subcomplex_chi(const SurfaceMesh& mesh, const std::vector<char>& in) {
  const auto& topo = mesh.topology();
  int chi = 0;
  for (int v = 0; v < mesh.n_vertices(); ++v) chi += in[v] ? 1 : 0;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const auto [u, v] = topo.edge_vertices(e);
    chi -= (in[u] && in[v]) ? 1 : 0;
  }
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto t = topo.face_vertices(f);
    chi += (in[t[0]] && in[t[1]] && in[t[2]]) ? 1 : 0;
  }
  return chi;
}

}  // namespace

IsoperimetricRecord isoperimetric_check(const SurfaceMesh& mesh, const Cut& cut,
                                        double curvature_sup, double radius,
                                        double relative_tolerance) {
  if (cut.curve.empty()) throw ShapeError("empty cut");
  const auto& topo = mesh.topology();
  const int ns = static_cast<int>(cut.curve.size());

  // Segments sharing a crossed edge are consecutive along the curve.
  std::vector<int> parent(ns);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::vector<int>> by_edge(mesh.n_edges());
  for (int i = 0; i < ns; ++i) {
    const auto& seg = cut.curve[i];
    for (auto [h, s] : {std::pair{seg.h0, seg.s0}, std::pair{seg.h1, seg.s1}}) {
      if (s <= 0 || s >= 1) throw ShapeError("level curve passes through a vertex");
      by_edge[topo.edge(h)].push_back(i);
    }
  }
  std::vector<int> loop_vertices;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (by_edge[e].empty()) continue;
    if (by_edge[e].size() != 2) throw ShapeError("level curve is not a closed 1-manifold");
    parent[find(by_edge[e][0])] = find(by_edge[e][1]);
    const auto [u, v] = topo.edge_vertices(e);
    loop_vertices.push_back(u);
    loop_vertices.push_back(v);
  }
  int components = 0;
  for (int i = 0; i < ns; ++i) components += find(i) == i;
  if (components != 1) throw ShapeError("cut has " + std::to_string(components) + " loops");

  std::vector<char> below = cut.below;
  std::vector<char> above(below.size());
  for (std::size_t v = 0; v < below.size(); ++v) above[v] = !below[v];
  const bool below_disk = full_subcomplex_chi(mesh, below) == 1;
  const bool above_disk = full_subcomplex_chi(mesh, above) == 1;
  bool use_below;
  if (below_disk && above_disk) {
    use_below = cut.area_below <= cut.area_above;
  } else if (below_disk || above_disk) {
    use_below = below_disk;
  } else {
    throw ShapeError("neither side of the cut is a disk");
  }
  const std::vector<char>& disk = use_below ? below : above;

  IsoperimetricRecord rec;
  rec.length = cut.length;
  rec.disk_area = use_below ? cut.area_below : cut.area_above;
  rec.curvature_sup = curvature_sup;
  rec.slack = rec.length * rec.length -
              rec.disk_area * (4 * std::numbers::pi - curvature_sup * rec.disk_area);

  std::vector<int> boundary;
  for (int v : loop_vertices) {
    if (disk[v]) boundary.push_back(v);
  }
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  const auto from_loop = graph_distances(mesh, boundary, disk);
  int center = boundary.front();
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (disk[v] && std::isfinite(from_loop[v]) && from_loop[v] > from_loop[center]) center = v;
  }
  const int c[1] = {center};
  const auto from_center = graph_distances(mesh, c, disk);
  for (int v : boundary) rec.radius_estimate = std::max(rec.radius_estimate, from_center[v]);
  rec.in_ball = rec.radius_estimate <= radius;
  rec.tolerance = relative_tolerance * rec.length * rec.length;
  rec.passed = !rec.in_ball || rec.slack >= -rec.tolerance;
  return rec;
}

}  // namespace rcl
