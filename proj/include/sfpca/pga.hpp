#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>
#include <vector>

#include "sfpca/errors.hpp"
#include "sfpca/pca.hpp"
#include "sfpca/space_form.hpp"
#include "sfpca/subspace.hpp"

namespace sfpca {

/// Gradient-descent settings for the Fréchet mean. The defaults are
/// deterministic and untuned: unit step with halving on objective increase.
struct PgaConfig {
  int max_iters = 1000;
  double step_size = 1.0;
  double grad_tol = 1e-9;
  int max_halvings = 40;
  bool record_history = false;
};

struct FrechetResult {
  Vector mean;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
  std::vector<double> objective_history;  // filled when record_history is set
};

namespace detail {

inline double frechet_objective(const SpaceForm& space, const Matrix& points,
                                const Vector& p) {
  double acc = 0.0;
  for (Index i = 0; i < points.cols(); ++i) {
    const double d = space.distance(points.col(i), p);
    acc += d * d;
  }
  return acc / static_cast<double>(points.cols());
}

// Extrinsic average rescaled onto the manifold. The hyperbolic average of
// upper-sheet points is always timelike, so the projection is well-defined;
// a (measure-zero) vanishing spherical average falls back to the first point.
inline Vector extrinsic_init(const SpaceForm& space, const Matrix& points) {
  Vector m = points.rowwise().mean();
  if (space.spherical() && m.norm() < 1e-12) return points.col(0);
  return space.renormalize(m);
}

}  // namespace detail

/// Fréchet mean p* = argmin_p E_N[d(x_n, p)^2] by Riemannian gradient
/// descent: p <- exp_p(step * E_N[log_p(x_n)]) until the tangent gradient
/// norm drops below grad_tol. Convergence is guaranteed only for spherical
/// data inside an open hemisphere; the result carries a convergence flag
/// rather than failing.
inline FrechetResult frechet_mean(const SpaceForm& space, const Matrix& points,
                                  const PgaConfig& cfg = {}) {
  if (points.cols() == 0) throw EmptyInput("frechet_mean: no points");
  if (cfg.max_iters < 1 || !(cfg.grad_tol > 0.0) || !(cfg.step_size > 0.0))
    throw ConfigError("frechet_mean: invalid configuration");

  FrechetResult res;
  res.mean = detail::extrinsic_init(space, points);
  double objective = detail::frechet_objective(space, points, res.mean);
  if (cfg.record_history) res.objective_history.push_back(objective);
  double step = cfg.step_size;
  const double inv_n = 1.0 / static_cast<double>(points.cols());

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    res.iterations = iter;
    Vector grad = Vector::Zero(space.coord_size());
    for (Index i = 0; i < points.cols(); ++i)
      grad += space.log_map(res.mean, points.col(i));
    grad *= inv_n;
    res.grad_norm = space.tangent_norm(grad);
    if (res.grad_norm <= cfg.grad_tol) {
      res.converged = true;
      return res;
    }

    bool accepted = false;
    for (int h = 0; h < cfg.max_halvings; ++h) {
      Vector candidate = space.exp_map(res.mean, step * grad);
      const double cand_obj = detail::frechet_objective(space, points, candidate);
      // ulp-level slack: near the optimum the objective moves below double
      // resolution while the gradient still has decades to contract.
      if (cand_obj <= objective + 1e-14 * (1.0 + objective)) {
        res.mean = std::move(candidate);
        objective = cand_obj;
        if (cfg.record_history) res.objective_history.push_back(objective);
        accepted = true;
        break;
      }
      // Halved steps are kept: re-growing the step re-enters the overshoot
      // regime on spread hyperbolic data and stalls the gradient decay.
      step *= 0.5;
    }
    if (!accepted) return res;  // stalled; converged stays false
  }
  return res;
}

/// Principal geodesic analysis baseline: Fréchet mean followed by Euclidean
/// PCA of the log-mapped tangent vectors, expressed in a metric-orthonormal
/// tangent frame. Packaged in the same model shape as the closed-form fits
/// so downstream evaluation treats methods uniformly. The prefix subspaces
/// come from eigen-ordering at the fixed mean; unlike the closed-form
/// solver, PGA offers no optimality or nesting guarantee.
inline PcaModel fit_pga(const SpaceForm& space, const Matrix& points,
                        const PgaConfig& cfg = {}) {
  const FrechetResult fm = frechet_mean(space, points, cfg);
  const Index n = space.coord_size();
  const Index count = points.cols();

  Matrix logs(n, count);
  for (Index i = 0; i < count; ++i)
    logs.col(i) = space.log_map(fm.mean, points.col(i));

  // Coordinates of the tangent vectors in an orthonormal frame of T_p.
  const Matrix frame = tangent_frame(space, fm.mean);
  Matrix coords;
  if (space.spherical()) {
    coords = frame.transpose() * logs;
  } else {
    Matrix jlogs = logs;
    jlogs.row(0) *= -1.0;
    coords = frame.transpose() * jlogs;
  }
  Matrix tangent_moment =
      coords * coords.transpose() / static_cast<double>(count);
  tangent_moment = ((tangent_moment + tangent_moment.transpose()) * 0.5).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(tangent_moment);
  if (solver.info() != Eigen::Success)
    throw Error("fit_pga: tangent eigensolver did not converge");

  const Index d = space.ambient_dim();
  PcaModel model{space, "pga", Vector(), Matrix(), 0.0, Vector()};
  model.base = fm.mean;
  model.components.resize(n, d);
  model.component_eigenvalues.resize(d);
  const double comp_scale = std::sqrt(std::abs(space.curvature()));
  for (Index i = 0; i < d; ++i) {  // descending
    model.component_eigenvalues[i] = solver.eigenvalues()[d - 1 - i];
    Vector u = frame * solver.eigenvectors().col(d - 1 - i);
    detail::orient_first_entry(u);
    model.components.col(i) = comp_scale * u;
  }
  model.converged = fm.converged;
  model.degenerate = detail::spectrum_degenerate(model.component_eigenvalues);
  return model;
}

}  // namespace sfpca
