#include "rcl/surface_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "rcl/errors.hpp"

namespace rcl {

namespace {

std::uint64_t undirected_key(int u, int v) {
  const auto a = static_cast<std::uint32_t>(std::min(u, v));
  const auto b = static_cast<std::uint32_t>(std::max(u, v));
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

SurfaceMesh::SurfaceMesh(HalfedgeMesh topology, std::vector<double> edge_lengths)
    : topology_(std::move(topology)), lengths_(std::move(edge_lengths)) {
  if (static_cast<int>(lengths_.size()) != topology_.n_edges()) {
    throw StructuralError("edge length count does not match the connectivity");
  }
}

SurfaceMesh SurfaceMesh::from_faces(int n_vertices, std::span<const std::array<int, 3>> faces,
                                    const LengthFn& length) {
  HalfedgeMesh topo = HalfedgeMesh::from_faces(n_vertices, faces);
  std::vector<double> lengths(topo.n_edges());
  for (int e = 0; e < topo.n_edges(); ++e) {
    const auto [u, v] = topo.edge_vertices(e);
    lengths[e] = length(u, v);
  }
  return SurfaceMesh(std::move(topo), std::move(lengths));
}

std::array<double, 3> SurfaceMesh::face_lengths(int f) const {
  return {lengths_[topology_.edge(3 * f)], lengths_[topology_.edge(3 * f + 1)],
          lengths_[topology_.edge(3 * f + 2)]};
}

SurfaceMesh SurfaceMesh::rescaled(double c) const {
  SurfaceMesh out = *this;
  for (auto& l : out.lengths_) l *= c;
  return out;
}

SurfaceMesh SurfaceMesh::relabeled(std::span<const int> perm) const {
  std::unordered_map<std::uint64_t, double> old_lengths;
  for (int e = 0; e < n_edges(); ++e) {
    const auto [u, v] = topology_.edge_vertices(e);
    old_lengths[undirected_key(perm[u], perm[v])] = lengths_[e];
  }
  std::vector<std::array<int, 3>> faces(n_faces());
  for (int f = 0; f < n_faces(); ++f) {
    const auto t = topology_.face_vertices(f);
    faces[f] = {perm[t[0]], perm[t[1]], perm[t[2]]};
  }
  SurfaceMesh out = from_faces(n_vertices(), faces, [&](int u, int v) {
    return old_lengths.at(undirected_key(u, v));
  });
  if (!embedding_.empty()) {
    out.embedding_.resize(embedding_.size());
    for (int v = 0; v < n_vertices(); ++v) out.embedding_[perm[v]] = embedding_[v];
  }
  if (!provenance_.empty()) {
    out.provenance_.resize(provenance_.size());
    for (int v = 0; v < n_vertices(); ++v) out.provenance_[perm[v]] = provenance_[v];
  }
  return out;
}

void SurfaceMesh::check_triangle_inequalities() const {
  for (int f = 0; f < n_faces(); ++f) {
    const auto [a, b, c] = face_lengths(f);
    if (!(a < b + c && b < c + a && c < a + b) || !(a > 0 && b > 0 && c > 0)) {
      throw StructuralError("face " + std::to_string(f) + " violates the triangle inequality");
    }
  }
}

double triangle_area(double a, double b, double c) {
  // Kahan's ordering a >= b >= c.
  if (a < b) std::swap(a, b);
  if (a < c) std::swap(a, c);
  if (b < c) std::swap(b, c);
  const double p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
  return p > 0 ? 0.25 * std::sqrt(p) : 0.0;
}

std::array<double, 3> triangle_angles(double a, double b, double c) {
  const double s = 0.5 * (a + b + c);
  auto half = [&](double opp, double x, double y) {
    return 2 * std::atan2(std::sqrt(std::max(0.0, (s - x) * (s - y))),
                          std::sqrt(std::max(0.0, s * (s - opp))));
  };
  return {half(a, b, c), half(b, c, a), half(c, a, b)};
}

double SurfaceMesh::min_angle_deg() const {
  double m = 180;
  for (int f = 0; f < n_faces(); ++f) {
    const auto [a, b, c] = face_lengths(f);
    const auto ang = triangle_angles(a, b, c);
    m = std::min({m, ang[0], ang[1], ang[2]});
  }
  return m == 180 ? m : m * 180 / std::numbers::pi;
}

double SurfaceMesh::max_edge_length() const {
  return lengths_.empty() ? 0.0 : *std::max_element(lengths_.begin(), lengths_.end());
}

int SurfaceMesh::repair_slivers(double min_angle_deg_threshold, int max_passes) {
  const double threshold = min_angle_deg_threshold * std::numbers::pi / 180;
  auto corner_opposite = [&](int h) {
    // Angle of face(h) at the vertex opposite halfedge h.
    const int f = HalfedgeMesh::face(h);
    const auto l = face_lengths(f);
    const auto ang = triangle_angles(l[0], l[1], l[2]);
    return ang[h % 3];
  };
  auto face_min_angle = [&](double a, double b, double c) {
    const auto ang = triangle_angles(a, b, c);
    return std::min({ang[0], ang[1], ang[2]});
  };
  int flips = 0;
  for (int pass = 0; pass < max_passes; ++pass) {
    int pass_flips = 0;
    for (int f = 0; f < n_faces(); ++f) {
      const auto l = face_lengths(f);
      if (face_min_angle(l[0], l[1], l[2]) >= threshold) continue;
      for (int s = 0; s < 3; ++s) {
        const int h = 3 * f + s;
        const int t = topology_.twin(h);
        if (corner_opposite(h) + corner_opposite(t) <= std::numbers::pi + 1e-12) continue;
        const int c = topology_.origin(HalfedgeMesh::prev(h));
        const int d = topology_.origin(HalfedgeMesh::prev(t));
        const double lab = halfedge_length(h);
        const double lbc = halfedge_length(HalfedgeMesh::next(h));
        const double lca = halfedge_length(HalfedgeMesh::prev(h));
        const double lad = halfedge_length(HalfedgeMesh::next(t));
        const double ldb = halfedge_length(HalfedgeMesh::prev(t));
        double lcd;
        if (!embedding_.empty()) {
          lcd = fs_distance(embedding_[c], embedding_[d]);
        } else {
          const double at_a = triangle_angles(lbc, lca, lab)[0] + triangle_angles(ldb, lab, lad)[0];
          lcd = std::sqrt(std::max(0.0, lca * lca + lad * lad - 2 * lca * lad * std::cos(at_a)));
        }
        const double before = std::min(face_min_angle(lab, lbc, lca), face_min_angle(lab, lad, ldb));
        const bool valid = lcd > 0 && lcd < lca + lad && lca < lcd + lad && lad < lcd + lca &&
                           lcd < ldb + lbc && ldb < lcd + lbc && lbc < lcd + ldb;
        if (!valid) continue;
        const double after = std::min(face_min_angle(lca, lad, lcd), face_min_angle(ldb, lbc, lcd));
        if (after <= before) continue;
        const int e = topology_.edge(h);
        if (!topology_.flip(e)) continue;
        lengths_[e] = lcd;
        ++pass_flips;
        break;
      }
    }
    flips += pass_flips;
    if (pass_flips == 0) break;
  }
  return flips;
}

double face_area(const SurfaceMesh& mesh, int f) {
  const auto [a, b, c] = mesh.face_lengths(f);
  return triangle_area(a, b, c);
}

double total_area(const SurfaceMesh& mesh) {
  double s = 0;
  for (int f = 0; f < mesh.n_faces(); ++f) s += face_area(mesh, f);
  return s;
}

EulerGenus euler_genus(const SurfaceMesh& mesh) {
  EulerGenus out;
  out.chi = mesh.n_vertices() - mesh.n_edges() + mesh.n_faces();
  if (out.chi > 2 || (2 - out.chi) % 2 != 0) {
    throw StructuralError("Euler characteristic incompatible with a closed orientable surface");
  }
  out.genus = (2 - out.chi) / 2;
  return out;
}

std::vector<double> mixed_areas(const SurfaceMesh& mesh) {
  std::vector<double> area(mesh.n_vertices(), 0.0);
  const auto& topo = mesh.topology();
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto l = mesh.face_lengths(f);  // l[s]: edge v_s -> v_{s+1}
    const auto v = topo.face_vertices(f);
    const auto opp = triangle_angles(l[0], l[1], l[2]);
    // Corner angle at v_s is opposite edge l[(s+1)%3].
    const double theta[3] = {opp[1], opp[2], opp[0]};
    const double a = triangle_area(l[0], l[1], l[2]);
    const double half_pi = std::numbers::pi / 2;
    const bool obtuse = theta[0] > half_pi || theta[1] > half_pi || theta[2] > half_pi;
    for (int s = 0; s < 3; ++s) {
      if (obtuse) {
        area[v[s]] += theta[s] > half_pi ? a / 2 : a / 4;
      } else {
        // Edges at v_s: l[s] (to v_{s+1}, opposite corner v_{s+2}) and
        // l[(s+2)%3] (to v_{s+2}, opposite corner v_{s+1}).
        const double e1 = l[s], e2 = l[(s + 2) % 3];
        const double cot_a = 1 / std::tan(theta[(s + 2) % 3]);
        const double cot_b = 1 / std::tan(theta[(s + 1) % 3]);
        area[v[s]] += (e1 * e1 * cot_a + e2 * e2 * cot_b) / 8;
      }
    }
  }
  return area;
}

CurvatureField curvature(const SurfaceMesh& mesh, int rings) {
  CurvatureField k;
  k.angle_defect.assign(mesh.n_vertices(), 2 * std::numbers::pi);
  const auto& topo = mesh.topology();
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto l = mesh.face_lengths(f);
    const auto v = topo.face_vertices(f);
    const auto opp = triangle_angles(l[0], l[1], l[2]);
    k.angle_defect[v[0]] -= opp[1];
    k.angle_defect[v[1]] -= opp[2];
    k.angle_defect[v[2]] -= opp[0];
  }
  k.mixed_area = mixed_areas(mesh);
  k.pointwise.resize(mesh.n_vertices());
  for (int i = 0; i < mesh.n_vertices(); ++i) k.pointwise[i] = k.angle_defect[i] / k.mixed_area[i];

  k.smoothed.resize(mesh.n_vertices());
  std::vector<int> mark(mesh.n_vertices(), -1);
  std::vector<int> ring, next;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    mark[v] = v;
    double defect = k.angle_defect[v], area = k.mixed_area[v];
    ring.assign(1, v);
    for (int r = 0; r < rings; ++r) {
      next.clear();
      for (int u : ring) {
        for (int h : topo.outgoing(u)) {
          const int w = topo.tip(h);
          if (mark[w] == v) continue;
          mark[w] = v;
          defect += k.angle_defect[w];
          area += k.mixed_area[w];
          next.push_back(w);
        }
      }
      ring.swap(next);
    }
    k.smoothed[v] = defect / area;
  }
  return k;
}

double CurvatureField::total_defect() const {
  double s = 0;
  for (double d : angle_defect) s += d;
  return s;
}

double CurvatureField::max_curvature() const {
  return *std::max_element(pointwise.begin(), pointwise.end());
}

double CurvatureField::min_curvature() const {
  return *std::min_element(pointwise.begin(), pointwise.end());
}

double CurvatureField::max_smoothed() const {
  return *std::max_element(smoothed.begin(), smoothed.end());
}

double CurvatureField::min_smoothed() const {
  return *std::min_element(smoothed.begin(), smoothed.end());
}

// ---------------------------------------------------------------------------

void write_off(std::ostream& out, const SurfaceMesh& mesh) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "OFF\n" << mesh.n_vertices() << ' ' << mesh.n_faces() << " 0\n";
  const auto& emb = mesh.embedding();
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (emb.empty()) {
      s << "0 0 0 0 0 0\n";
    } else {
      const auto& x = emb[v];
      s << x[0].real() << ' ' << x[0].imag() << ' ' << x[1].real() << ' ' << x[1].imag() << ' '
        << x[2].real() << ' ' << x[2].imag() << '\n';
    }
  }
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto t = mesh.topology().face_vertices(f);
    s << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  out << s.str();
}

void write_lengths(std::ostream& out, const SurfaceMesh& mesh) {
  std::ostringstream s;
  s << std::setprecision(17);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const auto [u, v] = mesh.topology().edge_vertices(e);
    s << u << ' ' << v << ' ' << mesh.length(e) << '\n';
  }
  out << s.str();
}

SurfaceMesh read_mesh(std::istream& off, std::istream& lengths) {
  std::string magic;
  int nv = 0, nf = 0, ne = 0;
  if (!(off >> magic >> nv >> nf >> ne) || magic != "OFF") throw DomainError("not an OFF file");
  std::vector<Eigen::Vector3cd> emb(nv);
  bool has_embedding = false;
  for (int v = 0; v < nv; ++v) {
    double r[6];
    for (double& x : r) {
      if (!(off >> x)) throw DomainError("truncated OFF vertex list");
    }
    emb[v] << std::complex<double>(r[0], r[1]), std::complex<double>(r[2], r[3]),
        std::complex<double>(r[4], r[5]);
    has_embedding = has_embedding || emb[v].norm() > 0;
  }
  std::vector<std::array<int, 3>> faces(nf);
  for (auto& f : faces) {
    int n = 0;
    if (!(off >> n >> f[0] >> f[1] >> f[2]) || n != 3) throw DomainError("only triangles are supported");
  }
  std::unordered_map<std::uint64_t, double> table;
  int u = 0, v = 0;
  double len = 0;
  while (lengths >> u >> v >> len) table[undirected_key(u, v)] = len;
  SurfaceMesh mesh = SurfaceMesh::from_faces(nv, faces, [&](int a, int b) {
    auto it = table.find(undirected_key(a, b));
    if (it == table.end()) throw DomainError("length file misses an edge");
    return it->second;
  });
  if (has_embedding) mesh.set_embedding(std::move(emb));
  return mesh;
}

void write_vertex_field(std::ostream& out, std::span<const double> values) {
  std::ostringstream s;
  s << std::setprecision(17);
  for (double x : values) s << x << '\n';
  out << s.str();
}

}  // namespace rcl
