#include "rcl/projective.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "rcl/errors.hpp"

namespace rcl {

ProjPoint::ProjPoint(const Eigen::Vector3cd& x) {
  const double n = x.norm();
  if (n == 0) throw DomainError("zero vector is not a projective point");
  coords_ = x / n;
  for (int m = 0; m < 3; ++m) {
    const double a = std::abs(coords_[m]);
    if (a > 0) {
      coords_ *= std::conj(coords_[m]) / a;
      coords_[m] = a;
      break;
    }
  }
}

Eigen::Vector3d sphere_from_base(const BasePoint& b) {
  const Complex c = std::conj(b[0]) * b[1];
  const double s = b.squaredNorm();
  return Eigen::Vector3d(2 * c.real(), 2 * c.imag(), std::norm(b[0]) - std::norm(b[1])) / s;
}

BasePoint base_from_sphere(const Eigen::Vector3d& v) {
  const Eigen::Vector3d n = v.normalized();
  BasePoint b;
  if (n.z() >= 0) {
    const double b0 = std::sqrt((1 + n.z()) / 2);
    b << b0, Complex(n.x(), n.y()) / (2 * b0);
  } else {
    const double b1 = std::sqrt((1 - n.z()) / 2);
    b << Complex(n.x(), -n.y()) / (2 * b1), b1;
  }
  return b;
}

double arc_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& x) {
  auto angle = [](const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
    return std::atan2(u.cross(v).norm(), u.dot(v));
  };
  const Eigen::Vector3d axis = a.cross(b);
  const double len = axis.norm();
  const double endpoint = std::min(angle(a, x), angle(b, x));
  if (len < 1e-15) return endpoint;
  const Eigen::Vector3d n = axis / len;
  const Eigen::Vector3d p = x - x.dot(n) * n;
  if (p.norm() < 1e-15) return std::numbers::pi / 2;
  if (a.cross(p).dot(n) >= 0 && p.cross(b).dot(n) >= 0) {
    return std::asin(std::min(1.0, std::abs(x.dot(n))));
  }
  return endpoint;
}

// ---------------------------------------------------------------------------

Pencil::Pencil(const Eigen::Matrix3cd& frame, const HomogeneousPoly3& p, double clearance)
    : frame_(frame) {
  if (normalized_value(p, frame_.col(2)) < clearance) {
    throw PencilDegenerateError("projection center lies on the curve");
  }
}

Pencil Pencil::random(const HomogeneousPoly3& p, EnsembleSeed seed, double clearance) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed.seed), static_cast<std::uint32_t>(seed.seed >> 32),
                    static_cast<std::uint32_t>(seed.stream),
                    static_cast<std::uint32_t>(seed.stream >> 32), 0x9e3779b9u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Matrix3cd g;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) g(r, c) = Complex(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<Eigen::Matrix3cd> qr(g);
  Eigen::Matrix3cd q = qr.householderQ();
  const Eigen::Matrix3cd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < 3; ++c) {
    const double a = std::abs(r(c, c));
    if (a > 0) q.col(c) *= r(c, c) / a;
  }
  return Pencil(q, p, clearance);
}

// ---------------------------------------------------------------------------

BranchedCover::BranchedCover(const HomogeneousPoly3& p, const Pencil& pencil)
    : original_(p), pencil_(pencil), transformed_(compose_linear(p, pencil.frame())) {
  indices_.reserve(transformed_.size());
  for (std::size_t n = 0; n < transformed_.size(); ++n) {
    indices_.push_back(monomial_at(transformed_.degree(), n));
  }
  const int d = degree();
  const Complex lead = transformed_[{0, 0, d}];
  double scale = 0;
  for (const auto& c : transformed_.coefficients()) scale = std::max(scale, std::abs(c));
  if (std::abs(lead) <= 1e-14 * scale) {
    throw PencilDegenerateError("leading fiber coefficient underflows");
  }
}

std::vector<Complex> BranchedCover::fiber_polynomial(const BasePoint& b) const {
  const int d = degree();
  std::vector<Complex> p0(d + 1), p1(d + 1);
  p0[0] = p1[0] = 1;
  for (int e = 1; e <= d; ++e) {
    p0[e] = p0[e - 1] * b[0];
    p1[e] = p1[e - 1] * b[1];
  }
  std::vector<Complex> c(d + 1, Complex(0));
  for (std::size_t n = 0; n < indices_.size(); ++n) {
    const MultiIndex& idx = indices_[n];
    c[idx.k] += transformed_.coeff(n) * p0[idx.i] * p1[idx.j];
  }
  return c;
}

namespace {

double min_separation(const std::vector<Complex>& roots) {
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < roots.size(); ++a) {
    for (std::size_t b = a + 1; b < roots.size(); ++b) sep = std::min(sep, std::abs(roots[a] - roots[b]));
  }
  return sep;
}

}  // namespace

FiberRoots BranchedCover::fiber_roots(const BasePoint& b) const {
  const auto c = fiber_polynomial(b);
  FiberRoots out;
  out.base = b;
  out.roots = aberth_roots(c);
  for (const auto& r : out.roots) {
    if (std::abs(horner(c, r).value) > 1e-10 * coefficient_scale(c, r)) {
      throw PencilDegenerateError("fiber root residual above tolerance");
    }
  }
  out.condition = min_separation(out.roots);
  return out;
}

Eigen::Vector3cd BranchedCover::embed(const BasePoint& b, Complex w) const {
  const Eigen::Vector3cd y(b[0], b[1], w);
  return (pencil_.frame() * y).normalized();
}

// ---------------------------------------------------------------------------
// Branch points: zeros of Res_w(p, dp/dw) on CP^1, found by interpolating the
// resultant on the unit circle of the chart z = b1/b0, then polishing each
// root together with its double fiber root by Newton on (p, dp/dw) = 0.

namespace {

Complex sylvester_resultant(const std::vector<Complex>& p) {
  const int d = static_cast<int>(p.size()) - 1;
  std::vector<Complex> dp(d);
  for (int k = 1; k <= d; ++k) dp[k - 1] = p[k] * static_cast<double>(k);
  const int n = 2 * d - 1;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
  for (int r = 0; r < d - 1; ++r) {
    for (int k = 0; k <= d; ++k) s(r, r + k) = p[d - k];
  }
  for (int r = 0; r < d; ++r) {
    for (int k = 0; k <= d - 1; ++k) s(d - 1 + r, r + k) = dp[d - 1 - k];
  }
  return s.partialPivLu().determinant();
}

}  // namespace

const std::vector<BranchPoint>& BranchedCover::branch_points() const {
  if (branch_cache_) return *branch_cache_;
  const int d = degree();
  std::vector<BranchPoint> out;
  if (d < 2) {
    branch_cache_ = out;
    return *branch_cache_;
  }
  const int count = d * (d - 1);
  const int samples = count + 1;
  std::vector<Complex> nodes(samples), values(samples);
  for (int n = 0; n < samples; ++n) {
    nodes[n] = std::polar(1.0, 2 * std::numbers::pi * n / samples);
    values[n] = sylvester_resultant(fiber_polynomial(BasePoint(1.0, nodes[n])));
  }
  std::vector<Complex> coeffs(samples);
  for (int m = 0; m < samples; ++m) {
    Complex acc(0);
    for (int n = 0; n < samples; ++n) acc += values[n] * std::conj(std::pow(nodes[n], m));
    coeffs[m] = acc / static_cast<double>(samples);
  }
  if (coeffs.back() == Complex(0)) throw PencilDegenerateError("branch point at infinity");
  const auto candidates = aberth_roots(coeffs);

  const HomogeneousPoly3& q = transformed_;
  for (const Complex z0 : candidates) {
    // Chart: Y = (1, t, w) when |z| <= 1, otherwise Y = (t, 1, w) with t = 1/z.
    const bool first_chart = std::abs(z0) <= 1;
    const int tvar = first_chart ? 1 : 0;
    Complex t = first_chart ? z0 : 1.0 / z0;
    auto base_of = [&](Complex tt) { return first_chart ? BasePoint(1.0, tt) : BasePoint(tt, 1.0); };

    const auto fiber = fiber_polynomial(base_of(t));
    auto roots = aberth_roots(fiber);
    std::size_t ra = 0, rb = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < roots.size(); ++a) {
      for (std::size_t b = a + 1; b < roots.size(); ++b) {
        if (std::abs(roots[a] - roots[b]) < best) {
          best = std::abs(roots[a] - roots[b]);
          ra = a;
          rb = b;
        }
      }
    }
    Complex w = 0.5 * (roots[ra] + roots[rb]);

    Eigen::Vector3cd y;
    for (int it = 0; it < 60; ++it) {
      const BasePoint bt = base_of(t);
      y << bt[0], bt[1], w;
      Complex v;
      HomogeneousPoly3::Point g;
      HomogeneousPoly3::Hessian h;
      q.jet(y, &v, &g, &h);
      Eigen::Matrix2cd jac;
      jac << g[tvar], g[2], h(2, tvar), h(2, 2);
      const Eigen::Vector2cd rhs(v, g[2]);
      const Eigen::Vector2cd step = jac.partialPivLu().solve(rhs);
      if (!std::isfinite(step.norm())) break;
      t -= step[0];
      w -= step[1];
      if (step.norm() <= 1e-15 * (1 + std::abs(t) + std::abs(w))) break;
    }
    const BasePoint bt = base_of(t);
    y << bt[0], bt[1], w;
    if (normalized_value(q, y) > 1e-9) {
      throw PencilDegenerateError("branch point polishing did not converge");
    }
    const double s = bt.norm();
    BranchPoint bp;
    bp.base = bt / s;
    bp.sphere = sphere_from_base(bp.base);
    bp.ramification = w / s;

    const auto fb = fiber_polynomial(bp.base);
    const auto quotient = deflate(fb, bp.ramification, 2);
    bp.simple = aberth_roots(quotient);
    bp.min_root_gap = std::numeric_limits<double>::infinity();
    for (const auto& r : bp.simple) bp.min_root_gap = std::min(bp.min_root_gap, std::abs(r - bp.ramification));
    Complex v2(0);
    for (int k = 2; k <= d; ++k) {
      v2 += fb[k] * static_cast<double>(k * (k - 1)) * std::pow(bp.ramification, k - 2);
    }
    bp.second_derivative = std::abs(v2) / coefficient_scale(fb, bp.ramification);
    const double root_scale = 1 + std::abs(bp.ramification);
    const bool simple_zero = bp.second_derivative > 1e-8 && bp.min_root_gap > 1e-6 * root_scale &&
                             (bp.simple.size() < 2 || min_separation(bp.simple) > 1e-6 * root_scale);
    bp.multiplicity = simple_zero ? 1 : 2;
    if (!simple_zero) throw PencilDegenerateError("discriminant zero of multiplicity > 1");
    out.push_back(std::move(bp));
  }
  for (std::size_t a = 0; a < out.size(); ++a) {
    for (std::size_t b = a + 1; b < out.size(); ++b) {
      if (base_distance(out[a].base, out[b].base) < 1e-4) {
        throw PencilDegenerateError("branch points closer than 1e-4");
      }
    }
  }
  branch_cache_ = std::move(out);
  return *branch_cache_;
}

// ---------------------------------------------------------------------------
// Root continuation.

std::vector<Complex> BranchedCover::continue_segment(const BasePoint& a, const BasePoint& b,
                                                     std::vector<Complex> roots, double t_end,
                                                     const TrackOptions& opts, int* steps) const {
  const BasePoint dq = b - a;
  const std::size_t n = roots.size();
  auto velocity = [&](double t, Complex w) {
    const BasePoint q = a + t * dq;
    const Eigen::Vector3cd y(q[0], q[1], w);
    const auto g = transformed_.gradient(y);
    return -(g[0] * dq[0] + g[1] * dq[1]) / g[2];
  };

  double t = 0;
  double h = std::min(opts.max_step, t_end);
  std::vector<Complex> predicted(n), corrected(n);
  while (t < t_end) {
    h = std::min(h, t_end - t);
    const double tn = t + h;
    for (std::size_t k = 0; k < n; ++k) {
      const Complex w = roots[k];
      const Complex k1 = velocity(t, w);
      const Complex k2 = velocity(t + h / 2, w + h / 2 * k1);
      const Complex k3 = velocity(t + h / 2, w + h / 2 * k2);
      const Complex k4 = velocity(tn, w + h * k3);
      predicted[k] = w + h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const auto coeffs = fiber_polynomial(a + tn * dq);
    bool ok = true;
    for (std::size_t k = 0; k < n && ok; ++k) {
      Complex w = predicted[k];
      bool converged = false;
      for (int it = 0; it < 8; ++it) {
        const auto [p, dp] = horner(coeffs, w);
        if (std::abs(p) <= opts.residual_tolerance * coefficient_scale(coeffs, w)) {
          converged = true;
          break;
        }
        if (dp == Complex(0)) break;
        w -= p / dp;
      }
      if (!converged || !std::isfinite(std::abs(w))) ok = false;
      corrected[k] = w;
    }
    if (ok) {
      for (std::size_t k = 0; k < n && ok; ++k) {
        double other = std::numeric_limits<double>::infinity();
        double old_other = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
          if (j == k) continue;
          other = std::min(other, std::abs(corrected[k] - corrected[j]));
          old_other = std::min(old_other, std::abs(roots[k] - roots[j]));
        }
        const double displacement = std::abs(corrected[k] - predicted[k]);
        if (!(other > 3 * displacement) || !(std::abs(corrected[k] - roots[k]) < 0.5 * old_other)) {
          ok = false;
        }
      }
    }
    if (ok) {
      roots = corrected;
      t = tn;
      if (steps) ++*steps;
      h = std::min(opts.max_step, 1.5 * h);
    } else {
      h /= 2;
      if (h < opts.min_step) throw StepUnderflowError("root tracking step size underflow");
    }
  }
  return roots;
}

namespace {

// Representative of b whose inner product with a is real and positive.
Complex align_phase(const BasePoint& a, const BasePoint& b) {
  const Complex inner = a.dot(b);
  if (std::abs(inner) < 1e-12) throw DomainError("path segment joins antipodal base points");
  return std::conj(inner) / std::abs(inner);
}

}  // namespace

TrackResult BranchedCover::track(std::span<const BasePoint> path, const FiberRoots& start,
                                 const TrackOptions& opts,
                                 const std::vector<BranchPoint>* avoid) const {
  if (path.empty()) throw DomainError("empty path");
  TrackResult out;
  std::vector<Complex> roots = start.roots;
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    const BasePoint& a = path[s];
    const BasePoint& b = path[s + 1];
    if (avoid) {
      const Eigen::Vector3d sa = sphere_from_base(a), sb = sphere_from_base(b);
      for (const auto& bp : *avoid) {
        if (arc_distance(sa, sb, bp.sphere) / 2 < opts.clearance) {
          throw PathTooCloseError("path passes within the clearance of a branch point");
        }
      }
    }
    const Complex phase = align_phase(a, b);
    roots = continue_segment(a, phase * b, std::move(roots), 1.0, opts, &out.steps);
    for (auto& r : roots) r /= phase;
  }
  out.end = fiber_roots(path.back());
  const std::size_t n = roots.size();
  out.permutation.assign(n, -1);
  std::vector<bool> used(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < n; ++m) {
      const double dist = std::abs(roots[k] - out.end.roots[m]);
      if (dist < best_d) {
        best_d = dist;
        best = m;
      }
    }
    if (used[best] || best_d > 1e-6 * (1 + std::abs(roots[k])) + 1e-3 * out.end.condition) {
      throw LiftInconsistentError("tracked roots do not match the end fiber");
    }
    used[best] = true;
    out.permutation[k] = static_cast<int>(best);
  }
  return out;
}

std::vector<int> BranchedCover::track_into_branch(const FiberRoots& from, const BranchPoint& branch,
                                                  const TrackOptions& opts) const {
  const int d = degree();
  const Complex phase = align_phase(from.base, branch.base);
  const BasePoint target = phase * branch.base;
  std::vector<Complex> points;
  for (const auto& r : branch.simple) points.push_back(phase * r);
  points.push_back(phase * branch.ramification);

  std::vector<Complex> roots = from.roots;
  double t = 0;
  for (double eta : {1e-3, 1e-5, 1e-7, 1e-9}) {
    roots = continue_segment(from.base + t * (target - from.base), target, std::move(roots),
                             (1 - eta - t) / (1 - t), opts, nullptr);
    t = 1 - eta;
    std::vector<int> label(d, -1);
    std::vector<int> hits(points.size(), 0);
    for (int k = 0; k < d; ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < points.size(); ++m) {
        const double dist = std::abs(roots[k] - points[m]);
        if (dist < best) {
          best = dist;
          label[k] = static_cast<int>(m);
        }
      }
      ++hits[label[k]];
    }
    bool ok = hits.back() == 2;
    for (std::size_t m = 0; m + 1 < points.size(); ++m) ok = ok && hits[m] == 1;
    if (ok) return label;
  }
  throw LiftInconsistentError("could not identify sheets at a branch point");
}

// ---------------------------------------------------------------------------

FiberRoots fiber_roots(const HomogeneousPoly3& p, const Pencil& pencil, const BasePoint& b) {
  return BranchedCover(p, pencil).fiber_roots(b);
}

std::vector<BranchPoint> discriminant_points(const HomogeneousPoly3& p, const Pencil& pencil) {
  return BranchedCover(p, pencil).branch_points();
}

TrackResult track_roots(const HomogeneousPoly3& p, const Pencil& pencil,
                        std::span<const BasePoint> path, const FiberRoots& start,
                        const TrackOptions& opts) {
  BranchedCover cover(p, pencil);
  return cover.track(path, start, opts, &cover.branch_points());
}

void write_branch_report(std::ostream& out, const std::vector<BranchPoint>& branches) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "# sphere_x sphere_y sphere_z base0_re base0_im base1_re base1_im min_root_gap multiplicity\n";
  for (const auto& b : branches) {
    s << b.sphere.x() << ' ' << b.sphere.y() << ' ' << b.sphere.z() << ' ' << b.base[0].real() << ' '
      << b.base[0].imag() << ' ' << b.base[1].real() << ' ' << b.base[1].imag() << ' '
      << b.min_root_gap << ' ' << b.multiplicity << '\n';
  }
  out << s.str();
}

}  // namespace rcl
