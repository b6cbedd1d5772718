#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rcl/surface_mesh.hpp"

namespace rcl {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Cotangent stiffness and lumped mixed-Voronoi mass of a surface mesh.
struct DiscreteLaplacian {
  SparseMatrix stiffness;
  Eigen::VectorXd mass;

  int size() const { return static_cast<int>(mass.size()); }
};

/// Throws AssemblyError naming the first degenerate face.
DiscreteLaplacian assemble(const SurfaceMesh& mesh);

struct SolverOptions {
  int block_size = 0;           // 0 selects max(2k, 8)
  int max_iterations = 500;
  double tolerance = 1e-11;     // target residual
  double accept_tolerance = 1e-8;  // residual still accepted at the iteration cap
  std::uint64_t seed = 0x5eed;
};

struct SpectralResult {
  Eigen::VectorXd eigenvalues;     // ascending, first is 0
  Eigen::MatrixXd eigenfunctions;  // columns, mass-orthonormal
  std::vector<double> residuals;   // |S v - lambda M v| / |M v|
  int iterations = 0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  double lambda1() const { return eigenvalues(1); }
};

/// Relative residual of an eigenpair.
double eigen_residual(const DiscreteLaplacian& lap, double lambda, const Eigen::VectorXd& v);

/// The k smallest generalized eigenpairs (constant mode included) by
/// shift-invert block subspace iteration with Rayleigh-Ritz. Throws
/// ConvergenceError when the residuals stay above `accept_tolerance`.
SpectralResult lowest_eigenpairs(const DiscreteLaplacian& lap, int k, const SolverOptions& opts = {});

/// Dense generalized solve of the same problem (small meshes).
SpectralResult dense_eigenpairs(const DiscreteLaplacian& lap, int k);

struct RescaleReport {
  double c = 1;
  std::vector<double> expected;  // lambda_i / c^2
  std::vector<double> observed;
  double max_relative_error = 0;
  bool passed = false;
};

/// Recomputes the spectrum of `mesh` with lengths multiplied by c and
/// compares against result / c^2 at 1e-8 relative.
RescaleReport rescale_check(const SurfaceMesh& mesh, const SpectralResult& result, double c,
                            const SolverOptions& opts = {});

}  // namespace rcl
