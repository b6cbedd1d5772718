#pragma once

#include <array>
#include <span>
#include <vector>

namespace rcl {

/// Half-edge connectivity of a closed oriented triangle mesh. Halfedges of
/// face f are 3f, 3f+1, 3f+2, so next/prev/face are index arithmetic.
class HalfedgeMesh {
 public:
  HalfedgeMesh() = default;

  /// Throws StructuralError unless the faces form a closed orientable
  /// 2-manifold (every edge shared by exactly two oppositely oriented faces,
  /// every vertex link a single cycle, no isolated vertices).
  static HalfedgeMesh from_faces(int n_vertices, std::span<const std::array<int, 3>> faces);

  int n_vertices() const { return static_cast<int>(vertex_he_.size()); }
  int n_edges() const { return static_cast<int>(edge_he_.size()); }
  int n_faces() const { return static_cast<int>(origin_.size() / 3); }
  int n_halfedges() const { return static_cast<int>(origin_.size()); }

  static int next(int h) { return h % 3 == 2 ? h - 2 : h + 1; }
  static int prev(int h) { return h % 3 == 0 ? h + 2 : h - 1; }
  static int face(int h) { return h / 3; }
  int twin(int h) const { return twin_[h]; }
  int origin(int h) const { return origin_[h]; }
  int tip(int h) const { return origin_[next(h)]; }
  int edge(int h) const { return edge_[h]; }
  int edge_halfedge(int e) const { return edge_he_[e]; }
  int vertex_halfedge(int v) const { return vertex_he_[v]; }

  std::array<int, 3> face_vertices(int f) const {
    return {origin_[3 * f], origin_[3 * f + 1], origin_[3 * f + 2]};
  }
  std::array<int, 2> edge_vertices(int e) const {
    const int h = edge_he_[e];
    return {origin(h), tip(h)};
  }

  /// Outgoing halfedges around v in rotation order.
  std::vector<int> outgoing(int v) const;
  int valence(int v) const { return static_cast<int>(outgoing(v).size()); }
  bool has_edge(int u, int v) const;

  /// Replaces edge e (diagonal of its two faces) by the other diagonal.
  /// Returns false, leaving the mesh untouched, if that would create a
  /// duplicate edge or a degenerate face.
  bool flip(int e);

  /// Re-runs the manifold checks of from_faces on the current state.
  void validate() const;

 private:
  std::vector<int> origin_;
  std::vector<int> twin_;
  std::vector<int> edge_;
  std::vector<int> edge_he_;
  std::vector<int> vertex_he_;
};

}  // namespace rcl
