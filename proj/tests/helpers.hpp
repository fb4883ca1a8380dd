#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sfpca/bench.hpp"
#include "sfpca/rng.hpp"
#include "sfpca/space_form.hpp"
#include "sfpca/subspace.hpp"

namespace sfpca::testing {

inline Vector random_point(const SpaceForm& space, SplitMix64& rng) {
  const Index n = space.coord_size();
  Vector w(n);
  if (space.spherical()) {
    do {
      for (Index i = 0; i < n; ++i) w[i] = rng.next_gaussian();
    } while (w.norm() < 1e-12);
    return space.radius() * w / w.norm();
  }
  for (Index i = 0; i < n; ++i) w[i] = rng.next_gaussian();
  Vector p(n);
  p.tail(n - 1) = w.tail(n - 1);
  p[0] = std::sqrt(1.0 + w.tail(n - 1).squaredNorm());
  return space.radius() * p;
}

// Isotropic tangent Gaussian with per-direction deviation `scale`, drawn in
// a metric-orthonormal frame. Projecting ambient Gaussians instead would
// inflate norms anisotropically at bases far from the hyperboloid pole.
inline Vector random_tangent(const SpaceForm& space, const Vector& p,
                             SplitMix64& rng, double scale = 1.0) {
  const Matrix frame = tangent_frame(space, p);
  Vector coeffs(frame.cols());
  for (Index i = 0; i < coeffs.size(); ++i)
    coeffs[i] = scale * rng.next_gaussian();
  return frame * coeffs;
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// Random orthogonal matrix (QR of a Gaussian draw).
inline Matrix random_orthogonal(Index n, SplitMix64& rng) {
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = rng.next_gaussian();
  return Eigen::HouseholderQR<Matrix>(a).householderQ();
}

/// Random J-unitary transform in the identity component (preserves the upper
/// sheet): exp(J W) with W antisymmetric.
inline Matrix random_j_unitary(Index n, SplitMix64& rng, double scale = 0.2) {
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = scale * rng.next_gaussian();
  Matrix w = a - a.transpose();
  Matrix generator = w;
  generator.row(0) *= -1.0;  // J * W
  return generator.exp();
}

/// Tangent basis of the orthogonal complement of the subspace within T_p,
/// scaled like the subspace basis (norm |C|). Test-only: the library never
/// materializes complements.
inline Matrix complement_basis(const AffineSubspace& sub) {
  const SpaceForm& space = sub.space();
  const Index n = space.coord_size();
  const int k_prime = space.ambient_dim() - sub.subspace_dim();
  Matrix comp(n, k_prime);
  int accepted = 0;
  for (Index axis = 0; axis < n && accepted < k_prime; ++axis) {
    Vector t = space.tangent_project(sub.base(), Vector::Unit(n, axis));
    for (Index j = 0; j < sub.basis().cols(); ++j) {
      const Vector h = sub.basis().col(j);
      t -= (space.metric(t, h) / space.metric(h, h)) * h;
    }
    for (int j = 0; j < accepted; ++j) {
      const Vector h = comp.col(j);
      t -= (space.metric(t, h) / space.metric(h, h)) * h;
    }
    const double nrm = space.tangent_norm(t);
    if (nrm < 1e-8) continue;
    comp.col(accepted++) = t * (std::sqrt(std::abs(space.curvature())) / nrm);
  }
  if (accepted != k_prime)
    throw std::runtime_error("complement_basis: completion failed");
  return comp;
}

/// Brute-force projection distance: minimize d(x, .) over the subspace
/// parameterized through the low-dimensional isometry, by multi-start
/// cyclic coordinate search (coarse grid + golden-section refinement)
/// finished with gradient descent and a re-centered refinement pass.
/// Independent of the closed-form distance it is used to check.
/// Searches the chart y = exp_center(sum u_c f_c) in the low-dimensional
/// model, starting from u = 0; returns the best value and the point reached
/// (through `reached`).
inline double oracle_search_chart(const AffineSubspace& sub, const Vector& x,
                                  const Vector& center, double bound, int grid,
                                  int sweeps, Vector* reached) {
  const SpaceForm& space = sub.space();
  const int k = sub.subspace_dim();
  const SpaceForm low = sub.low_dim_space();
  const Matrix frame = tangent_frame(low, center);

  auto point_at = [&](const Vector& coords) {
    return low.exp_map(center, frame * coords);
  };
  auto value_at = [&](const Vector& coords) {
    try {
      return space.distance(x, sub.from_low_dim(point_at(coords)));
    } catch (const Error&) {
      return 1e300;  // candidate outside the numerically representable range
    }
  };

  constexpr double kGolden = 0.6180339887498949;

  Vector u = Vector::Zero(k);
  double best = value_at(u);
  double window = bound;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int c = 0; c < k; ++c) {
      const double lo = u[c] - window;
      const double hi = u[c] + window;
      double best_t = u[c];
      double best_v = best;
      for (int g = 0; g <= grid; ++g) {
        const double t = lo + (hi - lo) * g / grid;
        u[c] = t;
        const double v = value_at(u);
        if (v < best_v) {
          best_v = v;
          best_t = t;
        }
      }
      const double step = (hi - lo) / grid;
      double a = best_t - step;
      double b = best_t + step;
      double x1 = b - kGolden * (b - a);
      double x2 = a + kGolden * (b - a);
      u[c] = x1;
      double f1 = value_at(u);
      u[c] = x2;
      double f2 = value_at(u);
      for (int it = 0; it < 100 && (b - a) > 1e-10 * (1.0 + std::abs(best_t));
           ++it) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - kGolden * (b - a);
          u[c] = x1;
          f1 = value_at(u);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + kGolden * (b - a);
          u[c] = x2;
          f2 = value_at(u);
        }
      }
      if (std::min(f1, f2) < best_v) {
        best_v = std::min(f1, f2);
        best_t = f1 < f2 ? x1 : x2;
      }
      u[c] = best_t;
      best = best_v;
    }
    // Pattern-search shrink: the first sweeps localize the basin, later
    // sweeps refine inside it.
    if (sweep > 0) window = std::max(window * 0.5, 1e-6);
  }

  // Gradient polish: cyclic coordinate search alone stalls on coupled
  // coordinates; central-difference descent with backtracking finishes the
  // refinement.
  double step = 0.25;
  for (int it = 0; it < 200 && step > 1e-12; ++it) {
    Vector grad(k);
    const double h = 1e-6;
    for (int c = 0; c < k; ++c) {
      const double saved = u[c];
      u[c] = saved + h;
      const double fp = value_at(u);
      u[c] = saved - h;
      const double fm = value_at(u);
      u[c] = saved;
      grad[c] = (fp - fm) / (2.0 * h);
    }
    const double gnorm = grad.norm();
    if (gnorm < 1e-12) break;
    bool moved = false;
    while (step > 1e-12) {
      const Vector candidate = u - (step / gnorm) * grad;
      const double value = value_at(candidate);
      if (value < best - 1e-16) {
        u = candidate;
        best = value;
        moved = true;
        step = std::min(step * 2.0, 1.0);  // recover after cautious phases
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  if (reached) *reached = point_at(u);
  return best;
}

inline double oracle_projection_distance(const AffineSubspace& sub,
                                         const Vector& x, int grid = 24,
                                         int sweeps = 12) {
  const SpaceForm& space = sub.space();
  const int k = sub.subspace_dim();
  if (k == 0) return space.distance(x, sub.base());

  const SpaceForm low = sub.low_dim_space();
  Vector pole = Vector::Zero(k + 1);
  pole[0] = low.radius();
  const double bound =
      space.spherical()
          ? std::numbers::pi / std::sqrt(space.curvature())
          : 2.0 * space.distance(x, sub.base()) + 1.0;

  // Multi-start around the pole chart: the sliced distance on a subsphere
  // has local minima that trap a single coordinate-descent run.
  SplitMix64 starts(12345);
  Vector best_point;
  double best = oracle_search_chart(sub, x, pole, bound, grid, sweeps,
                                    &best_point);
  const int restarts = space.spherical() ? 5 : 1;
  const Matrix pole_frame = tangent_frame(low, pole);
  for (int restart = 0; restart < restarts; ++restart) {
    Vector u(k);
    for (int c = 0; c < k; ++c)
      u[c] = (2.0 * starts.next_double() - 1.0) * bound;
    Vector reached;
    const Vector center = low.exp_map(pole, pole_frame * u);
    const double value = oracle_search_chart(sub, x, center, bound, grid,
                                             sweeps, &reached);
    if (value < best) {
      best = value;
      best_point = reached;
    }
  }

  // Re-centered refinement: charts distort near their cut locus, so finish
  // in a chart centered on the best point found, where the minimizer is
  // interior and distortion-free.
  Vector polished;
  const double refined = oracle_search_chart(
      sub, x, best_point, std::min(bound, 1.0), grid, sweeps, &polished);
  return std::min(best, refined);
}

}  // namespace sfpca::testing
