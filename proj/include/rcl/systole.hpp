#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rcl/surface_mesh.hpp"

namespace rcl {

/// Tree-cotree homology basis: the 2g leftover edges and, per edge, the Z2
/// signature (bit i set when the edge crosses the i-th dual basis loop).
struct HomologyBasis {
  std::vector<int> generators;          // leftover edges
  std::vector<std::uint64_t> signature; // per edge
  int genus = 0;
};

/// Throws DomainError when 2g exceeds 64.
HomologyBasis homology_basis(const SurfaceMesh& mesh);

/// Z2 signature of an edge set; nonzero exactly for homologically
/// nontrivial cycles.
std::uint64_t cycle_signature(const HomologyBasis& basis, const std::vector<int>& edges);

struct SystoleResult {
  std::optional<double> length;  // absent for genus 0
  std::vector<int> edges;        // closed edge cycle in order
  std::vector<int> vertices;     // cycle vertices, first not repeated
  std::uint64_t signature = 0;   // nonzero certificate
  int genus = 0;
};

struct SystoleOptions {
  int threads = 0;  // 0 uses the hardware concurrency
};

/// Shortest homologically nontrivial edge cycle.
SystoleResult systole(const SurfaceMesh& mesh, const SystoleOptions& opts = {});

}  // namespace rcl
