#include "rcl/systole.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <queue>
#include <thread>

#include "rcl/errors.hpp"

namespace rcl {

HomologyBasis homology_basis(const SurfaceMesh& mesh) {
  const auto& topo = mesh.topology();
  const int nv = mesh.n_vertices(), ne = mesh.n_edges(), nf = mesh.n_faces();
  HomologyBasis basis;
  basis.genus = euler_genus(mesh).genus;
  basis.signature.assign(ne, 0);
  if (2 * basis.genus > 64) throw DomainError("genus too large for 64-bit signatures");

  std::vector<char> in_tree(ne, 0), in_cotree(ne, 0);
  std::vector<char> seen(nv, 0);
  std::queue<int> queue;
  seen[0] = 1;
  queue.push(0);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    for (int h : topo.outgoing(v)) {
      const int w = topo.tip(h);
      if (seen[w]) continue;
      seen[w] = 1;
      in_tree[topo.edge(h)] = 1;
      queue.push(w);
    }
  }

  std::vector<int> dual_parent(nf, -1), dual_edge(nf, -1), depth(nf, 0);
  std::vector<char> face_seen(nf, 0);
  face_seen[0] = 1;
  queue.push(0);
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop();
    for (int s = 0; s < 3; ++s) {
      const int h = 3 * f + s;
      const int e = topo.edge(h);
      if (in_tree[e]) continue;
      const int g = HalfedgeMesh::face(topo.twin(h));
      if (face_seen[g]) continue;
      face_seen[g] = 1;
      in_cotree[e] = 1;
      dual_parent[g] = f;
      dual_edge[g] = e;
      depth[g] = depth[f] + 1;
      queue.push(g);
    }
  }

  for (int e = 0; e < ne; ++e) {
    if (!in_tree[e] && !in_cotree[e]) basis.generators.push_back(e);
  }
  if (static_cast<int>(basis.generators.size()) != 2 * basis.genus) {
    throw StructuralError("tree-cotree decomposition does not match the genus");
  }
  for (std::size_t i = 0; i < basis.generators.size(); ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    const int e = basis.generators[i];
    basis.signature[e] |= bit;
    const int h = topo.edge_halfedge(e);
    int a = HalfedgeMesh::face(h), b = HalfedgeMesh::face(topo.twin(h));
    while (a != b) {
      if (depth[a] < depth[b]) std::swap(a, b);
      basis.signature[dual_edge[a]] ^= bit;
      a = dual_parent[a];
    }
  }
  return basis;
}

std::uint64_t cycle_signature(const HomologyBasis& basis, const std::vector<int>& edges) {
  std::uint64_t s = 0;
  for (int e : edges) s ^= basis.signature[e];
  return s;
}

namespace {

struct Adjacency {
  std::vector<int> offset;
  std::vector<int> target, edge;
  std::vector<double> length;
};

Adjacency adjacency(const SurfaceMesh& mesh) {
  const auto& topo = mesh.topology();
  Adjacency a;
  a.offset.assign(mesh.n_vertices() + 1, 0);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const auto [u, v] = topo.edge_vertices(e);
    ++a.offset[u + 1];
    ++a.offset[v + 1];
  }
  for (int v = 0; v < mesh.n_vertices(); ++v) a.offset[v + 1] += a.offset[v];
  a.target.resize(a.offset.back());
  a.edge.resize(a.offset.back());
  a.length.resize(a.offset.back());
  std::vector<int> fill(a.offset.begin(), a.offset.end() - 1);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const auto [u, v] = topo.edge_vertices(e);
    for (auto [x, y] : {std::pair{u, v}, std::pair{v, u}}) {
      const int k = fill[x]++;
      a.target[k] = y;
      a.edge[k] = e;
      a.length[k] = mesh.length(e);
    }
  }
  return a;
}

struct Candidate {
  double length = std::numeric_limits<double>::infinity();
  int root = -1, u = -1, w = -1, edge = -1;

  bool better_than(const Candidate& o) const {
    return length < o.length || (length == o.length && root < o.root);
  }
};

class RootSearch {
 public:
  RootSearch(const Adjacency& adj, const HomologyBasis& basis, int n)
      : adj_(adj), basis_(basis), dist_(n), parent_edge_(n), potential_(n), settled_(n) {}

  // Shortest nontrivial cycle closed by a non-tree edge of the shortest-path
  // tree at `root`, ignoring everything longer than `bound`.
  Candidate run(int root, double bound) {
    std::fill(dist_.begin(), dist_.end(), std::numeric_limits<double>::infinity());
    std::fill(settled_.begin(), settled_.end(), 0);
    Candidate best;
    best.root = root;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist_[root] = 0;
    parent_edge_[root] = -1;
    potential_[root] = 0;
    heap.emplace(0.0, root);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (settled_[u] || d > dist_[u]) continue;
      if (d > std::min(bound, best.length) / 2) break;
      settled_[u] = 1;
      for (int k = adj_.offset[u]; k < adj_.offset[u + 1]; ++k) {
        const int w = adj_.target[k], e = adj_.edge[k];
        if (settled_[w]) {
          if (e == parent_edge_[u]) continue;
          const std::uint64_t sig = potential_[u] ^ potential_[w] ^ basis_.signature[e];
          const double len = d + dist_[w] + adj_.length[k];
          if (sig != 0 && len <= std::min(bound, best.length) &&
              (len < best.length || best.edge < 0)) {
            best.length = len;
            best.u = u;
            best.w = w;
            best.edge = e;
          }
          continue;
        }
        const double nd = d + adj_.length[k];
        if (nd < dist_[w]) {
          dist_[w] = nd;
          parent_edge_[w] = e;
          potential_[w] = potential_[u] ^ basis_.signature[e];
          heap.emplace(nd, w);
        }
      }
    }
    if (best.edge < 0) best.length = std::numeric_limits<double>::infinity();
    return best;
  }

  int parent_edge(int v) const { return parent_edge_[v]; }

 private:
  const Adjacency& adj_;
  const HomologyBasis& basis_;
  std::vector<double> dist_;
  std::vector<int> parent_edge_;
  std::vector<std::uint64_t> potential_;
  std::vector<char> settled_;
};

double fundamental_cycle_bound(const SurfaceMesh& mesh, const HomologyBasis& basis) {
  // Same BFS tree as homology_basis, so each generator closes a cycle with a
  // single signature bit.
  const auto& topo = mesh.topology();
  const int n = mesh.n_vertices();
  std::vector<int> parent(n, -1), depth(n, 0);
  std::vector<double> up(n, 0);
  std::vector<char> seen(n, 0);
  std::queue<int> queue;
  seen[0] = 1;
  queue.push(0);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    for (int h : topo.outgoing(v)) {
      const int w = topo.tip(h);
      if (seen[w]) continue;
      seen[w] = 1;
      parent[w] = v;
      depth[w] = depth[v] + 1;
      up[w] = mesh.halfedge_length(h);
      queue.push(w);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (int e : basis.generators) {
    auto [a, b] = topo.edge_vertices(e);
    double len = mesh.length(e);
    while (a != b) {
      if (depth[a] < depth[b]) std::swap(a, b);
      len += up[a];
      a = parent[a];
    }
    best = std::min(best, len);
  }
  return best;
}

}  // namespace

SystoleResult systole(const SurfaceMesh& mesh, const SystoleOptions& opts) {
  SystoleResult out;
  const HomologyBasis basis = homology_basis(mesh);
  out.genus = basis.genus;
  if (basis.genus == 0) return out;

  const int n = mesh.n_vertices();
  const Adjacency adj = adjacency(mesh);
  // Slightly inflated so the cycle attaining the bound is still found.
  const double initial = fundamental_cycle_bound(mesh, basis) * (1 + 1e-9);

  // A cycle with nonzero signature uses an edge of some cocycle, so rooting
  // at one endpoint of every cocycle edge is enough.
  std::vector<int> roots;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (basis.signature[e] != 0) roots.push_back(std::min(mesh.topology().edge_vertices(e)[0],
                                                          mesh.topology().edge_vertices(e)[1]));
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  const int n_roots = static_cast<int>(roots.size());

  std::atomic<int> next{0};
  std::mutex mutex;
  Candidate best;
  std::atomic<double> bound{initial};
  auto worker = [&] {
    RootSearch search(adj, basis, n);
    for (int i = next++; i < n_roots; i = next++) {
      const Candidate c = search.run(roots[i], bound.load());
      if (c.edge < 0) continue;
      std::lock_guard lock(mutex);
      if (c.better_than(best)) {
        best = c;
        bound = std::min(bound.load(), c.length);
      }
    }
  };
  int threads = opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n_roots));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (best.edge < 0) throw StructuralError("no homologically nontrivial cycle found");

  // Rebuild the winning cycle and drop the part shared by both tree paths.
  RootSearch search(adj, basis, n);
  search.run(best.root, best.length * (1 + 1e-9));
  const auto& topo = mesh.topology();
  auto path_to_root = [&](int v) {
    std::vector<int> verts{v}, edges;
    while (search.parent_edge(v) >= 0) {
      const int e = search.parent_edge(v);
      const auto [a, b] = topo.edge_vertices(e);
      v = a == v ? b : a;
      edges.push_back(e);
      verts.push_back(v);
    }
    return std::pair{verts, edges};
  };
  auto [pu, eu] = path_to_root(best.u);
  auto [pw, ew] = path_to_root(best.w);
  while (pu.size() > 1 && pw.size() > 1 && pu[pu.size() - 2] == pw[pw.size() - 2]) {
    pu.pop_back();
    pw.pop_back();
    eu.pop_back();
    ew.pop_back();
  }
  // Cycle: lca -> ... -> u -> w -> ... -> lca.
  out.vertices.assign(pu.rbegin(), pu.rend());
  out.vertices.insert(out.vertices.end(), pw.begin(), pw.end() - 1);
  out.edges.assign(eu.rbegin(), eu.rend());
  out.edges.push_back(best.edge);
  out.edges.insert(out.edges.end(), ew.begin(), ew.end());
  double len = 0;
  for (int e : out.edges) len += mesh.length(e);
  out.length = len;
  out.signature = cycle_signature(basis, out.edges);
  return out;
}

}  // namespace rcl
