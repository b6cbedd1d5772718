#include "rcl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "rcl/errors.hpp"

namespace rcl {

DiscreteLaplacian assemble(const SurfaceMesh& mesh) {
  const int n = mesh.n_vertices();
  const auto& topo = mesh.topology();
  std::vector<double> weight(mesh.n_edges(), 0.0);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto l = mesh.face_lengths(f);
    const double area = triangle_area(l[0], l[1], l[2]);
    if (!(area > 0) || !(l[0] < l[1] + l[2] && l[1] < l[2] + l[0] && l[2] < l[0] + l[1])) {
      throw AssemblyError("degenerate face " + std::to_string(f));
    }
    for (int s = 0; s < 3; ++s) {
      const double a = l[s], b = l[(s + 1) % 3], c = l[(s + 2) % 3];
      const double cot = (b * b + c * c - a * a) / (4 * area);
      weight[topo.edge(3 * f + s)] += cot / 2;
    }
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * mesh.n_edges());
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const auto [u, v] = topo.edge_vertices(e);
    trip.emplace_back(u, v, -weight[e]);
    trip.emplace_back(v, u, -weight[e]);
    diag(u) += weight[e];
    diag(v) += weight[e];
  }
  for (int v = 0; v < n; ++v) trip.emplace_back(v, v, diag(v));
  DiscreteLaplacian lap;
  lap.stiffness.resize(n, n);
  lap.stiffness.setFromTriplets(trip.begin(), trip.end());
  lap.stiffness.makeCompressed();
  const auto areas = mixed_areas(mesh);
  lap.mass = Eigen::Map<const Eigen::VectorXd>(areas.data(), n);
  for (int v = 0; v < n; ++v) {
    if (!(lap.mass(v) > 0)) throw AssemblyError("vertex " + std::to_string(v) + " has no area");
  }
  return lap;
}

double eigen_residual(const DiscreteLaplacian& lap, double lambda, const Eigen::VectorXd& v) {
  const Eigen::VectorXd mv = lap.mass.cwiseProduct(v);
  return (lap.stiffness * v - lambda * mv).norm() / mv.norm();
}

namespace {

class ShiftInvert {
 public:
  explicit ShiftInvert(const DiscreteLaplacian& lap) : lap_(lap), n_(lap.size()) {
    const double total = lap.mass.sum();
    constant_ = Eigen::VectorXd::Constant(n_, 1 / std::sqrt(total));
    solver_.compute(lap.stiffness.bottomRightCorner(n_ - 1, n_ - 1));
    if (solver_.info() != Eigen::Success) {
      throw AssemblyError("stiffness matrix is not positive definite off the constants");
    }
  }

  const Eigen::VectorXd& constant() const { return constant_; }

  void project(Eigen::MatrixXd& x) const {
    const Eigen::RowVectorXd c = constant_.cwiseProduct(lap_.mass).transpose() * x;
    x.noalias() -= constant_ * c;
  }

  // Returns S^+ M x restricted to the mass-orthogonal complement of constants.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd b = lap_.mass.asDiagonal() * x;
    const Eigen::RowVectorXd sums = b.colwise().sum();
    b.rowwise() -= sums / static_cast<double>(n_);
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n_, x.cols());
    y.bottomRows(n_ - 1) = solver_.solve(b.bottomRows(n_ - 1));
    project(y);
    return y;
  }

  // Mass-orthonormalizes the columns by two passes of Gram-Schmidt.
  void orthonormalize(Eigen::MatrixXd& x) const {
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < x.cols(); ++j) {
        for (int i = 0; i < j; ++i) {
          x.col(j) -= x.col(i).cwiseProduct(lap_.mass).dot(x.col(j)) * x.col(i);
        }
        const double nrm = std::sqrt(x.col(j).cwiseProduct(lap_.mass).dot(x.col(j)));
        x.col(j) /= nrm;
      }
    }
  }

 private:
  const DiscreteLaplacian& lap_;
  int n_;
  Eigen::VectorXd constant_;
  Eigen::SimplicialLDLT<SparseMatrix> solver_;
};

}  // namespace

SpectralResult lowest_eigenpairs(const DiscreteLaplacian& lap, int k, const SolverOptions& opts) {
  const int n = lap.size();
  if (k < 2) throw DomainError("need at least two eigenpairs");
  const int wanted = k - 1;
  int p = opts.block_size > 0 ? opts.block_size : std::max(2 * k, 8);
  p = std::min(p, n - 1);
  if (wanted > p) throw DomainError("too many eigenpairs for this mesh");

  ShiftInvert op(lap);
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) x(i, j) = normal(rng);
  }
  op.project(x);
  op.orthonormalize(x);

  SpectralResult best;
  double best_worst = std::numeric_limits<double>::infinity();
  int since_improved = 0;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    Eigen::MatrixXd y = op.apply(x);
    op.orthonormalize(y);
    const Eigen::MatrixXd sy = lap.stiffness * y;
    Eigen::MatrixXd a = y.transpose() * sy;
    a = (a + a.transpose()).eval() / 2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    x = y * eig.eigenvectors();
    const Eigen::MatrixXd sx = sy * eig.eigenvectors();

    std::vector<double> res(wanted);
    double worst = 0;
    for (int j = 0; j < wanted; ++j) {
      const Eigen::VectorXd mx = lap.mass.cwiseProduct(x.col(j));
      res[j] = (sx.col(j) - eig.eigenvalues()(j) * mx).norm() / mx.norm();
      worst = std::max(worst, res[j]);
    }
    if (worst < best_worst) {
      since_improved = worst < 0.5 * best_worst ? 0 : since_improved + 1;
      best_worst = worst;
      best.eigenvalues.resize(k);
      best.eigenfunctions.resize(n, k);
      best.eigenvalues(0) = 0;
      best.eigenfunctions.col(0) = op.constant();
      best.eigenvalues.tail(wanted) = eig.eigenvalues().head(wanted);
      best.eigenfunctions.rightCols(wanted) = x.leftCols(wanted);
      best.residuals = res;
    } else {
      ++since_improved;
    }
    if (best_worst <= opts.tolerance) break;
    if (since_improved >= 20 && best_worst <= opts.accept_tolerance) break;
  }
  best.iterations = it + 1;
  best.residuals.insert(best.residuals.begin(), eigen_residual(lap, 0.0, op.constant()));
  if (!(best_worst <= opts.accept_tolerance)) {
    throw ConvergenceError("eigensolver did not converge", best.residuals);
  }
  return best;
}

SpectralResult dense_eigenpairs(const DiscreteLaplacian& lap, int k) {
  const Eigen::MatrixXd s = Eigen::MatrixXd(lap.stiffness);
  const Eigen::MatrixXd m = lap.mass.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, m);
  SpectralResult out;
  out.eigenvalues = eig.eigenvalues().head(k);
  out.eigenfunctions = eig.eigenvectors().leftCols(k);
  for (int j = 0; j < k; ++j) {
    out.residuals.push_back(eigen_residual(lap, out.eigenvalues(j), out.eigenfunctions.col(j)));
  }
  return out;
}

RescaleReport rescale_check(const SurfaceMesh& mesh, const SpectralResult& result, double c,
                            const SolverOptions& opts) {
  RescaleReport rep;
  rep.c = c;
  const auto scaled = lowest_eigenpairs(assemble(mesh.rescaled(c)), result.size(), opts);
  for (int i = 0; i < result.size(); ++i) {
    const double e = result.eigenvalues(i) / (c * c);
    const double o = scaled.eigenvalues(i);
    rep.expected.push_back(e);
    rep.observed.push_back(o);
    if (i > 0) rep.max_relative_error = std::max(rep.max_relative_error, std::abs(o - e) / std::abs(e));
  }
  rep.passed = rep.max_relative_error <= 1e-8;
  return rep;
}

}  // namespace rcl
