#include "rcl/halfedge.hpp"

#include <string>
#include <unordered_map>

#include "rcl/errors.hpp"

namespace rcl {

namespace {

std::uint64_t key(int u, int v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

}  // namespace

HalfedgeMesh HalfedgeMesh::from_faces(int n_vertices, std::span<const std::array<int, 3>> faces) {
  HalfedgeMesh m;
  const int nh = static_cast<int>(faces.size()) * 3;
  m.origin_.resize(nh);
  m.twin_.assign(nh, -1);
  m.edge_.assign(nh, -1);
  m.vertex_he_.assign(n_vertices, -1);
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(nh);
  for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
    for (int s = 0; s < 3; ++s) {
      const int u = faces[f][s], v = faces[f][(s + 1) % 3];
      if (u < 0 || u >= n_vertices || u == v) {
        throw StructuralError("face " + std::to_string(f) + " has an invalid vertex");
      }
      const int h = 3 * f + s;
      m.origin_[h] = u;
      if (!directed.emplace(key(u, v), h).second) {
        throw StructuralError("directed edge used twice (non-manifold or inconsistent orientation)");
      }
      m.vertex_he_[u] = h;
    }
  }
  for (int h = 0; h < nh; ++h) {
    auto it = directed.find(key(m.tip(h), m.origin(h)));
    if (it == directed.end()) throw StructuralError("mesh has a boundary edge");
    m.twin_[h] = it->second;
    if (m.edge_[h] < 0) {
      const int e = static_cast<int>(m.edge_he_.size());
      m.edge_he_.push_back(h);
      m.edge_[h] = e;
      m.edge_[it->second] = e;
    }
  }
  m.validate();
  return m;
}

std::vector<int> HalfedgeMesh::outgoing(int v) const {
  std::vector<int> out;
  const int start = vertex_he_[v];
  int h = start;
  do {
    out.push_back(h);
    h = twin_[prev(h)];
  } while (h != start && out.size() <= origin_.size());
  return out;
}

bool HalfedgeMesh::has_edge(int u, int v) const {
  for (int h : outgoing(u)) {
    if (tip(h) == v) return true;
  }
  return false;
}

void HalfedgeMesh::validate() const {
  std::vector<int> count(vertex_he_.size(), 0);
  for (int h = 0; h < n_halfedges(); ++h) ++count[origin_[h]];
  for (int v = 0; v < n_vertices(); ++v) {
    if (vertex_he_[v] < 0) throw StructuralError("isolated vertex " + std::to_string(v));
    if (static_cast<int>(outgoing(v).size()) != count[v]) {
      throw StructuralError("link of vertex " + std::to_string(v) + " is not a single cycle");
    }
  }
  for (int h = 0; h < n_halfedges(); ++h) {
    if (twin_[twin_[h]] != h || origin_[twin_[h]] != tip(h)) {
      throw StructuralError("inconsistent twin pointers");
    }
  }
}

bool HalfedgeMesh::flip(int e) {
  const int h = edge_he_[e];
  const int t = twin_[h];
  const int f = face(h), g = face(t);
  const int hn = next(h), hp = prev(h), tn = next(t), tp = prev(t);
  const int a = origin_[h], b = origin_[hn], c = origin_[hp], d = origin_[tp];
  if (c == d || has_edge(c, d)) return false;
  const int tw_hn = twin_[hn], tw_hp = twin_[hp], tw_tn = twin_[tn], tw_tp = twin_[tp];
  const int e_hn = edge_[hn], e_hp = edge_[hp], e_tn = edge_[tn], e_tp = edge_[tp];

  // Faces (a,b,c), (b,a,d) become (c,a,d), (d,b,c).
  auto set = [&](int he, int org, int tw, int ed) {
    origin_[he] = org;
    twin_[he] = tw;
    twin_[tw] = he;
    edge_[he] = ed;
    edge_he_[ed] = he;
  };
  const int f0 = 3 * f, g0 = 3 * g;
  set(f0, c, tw_hp, e_hp);
  set(f0 + 1, a, tw_tn, e_tn);
  set(g0, d, tw_tp, e_tp);
  set(g0 + 1, b, tw_hn, e_hn);
  origin_[f0 + 2] = d;
  origin_[g0 + 2] = c;
  twin_[f0 + 2] = g0 + 2;
  twin_[g0 + 2] = f0 + 2;
  edge_[f0 + 2] = edge_[g0 + 2] = e;
  edge_he_[e] = f0 + 2;
  vertex_he_[c] = f0;
  vertex_he_[a] = f0 + 1;
  vertex_he_[d] = g0;
  vertex_he_[b] = g0 + 1;
  return true;
}

}  // namespace rcl
