#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "sfpca/errors.hpp"
#include "sfpca/pca.hpp"
#include "sfpca/pga.hpp"
#include "sfpca/rng.hpp"
#include "sfpca/space_form.hpp"
#include "sfpca/subspace.hpp"

namespace sfpca {

/// Grid of synthetic denoising experiments: planted random subspaces, noisy
/// points, and the normalized output error n_o/n_i per (method, D, K, N,
/// sigma) cell. Deterministic: every trial draws from a pre-split RNG stream
/// keyed by (seed, cell, trial), so results do not depend on scheduling.
struct ExperimentConfig {
  std::string name = "experiment";
  Geometry kind = Geometry::Hyperbolic;
  double curvature = -1.0;
  std::vector<int> ambient_dims;     // D values
  std::vector<int> subspace_dims;    // K values; cells with K > D are skipped
  std::vector<int> point_counts;     // N values
  std::vector<double> noise_levels;  // sigma values
  int trials = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> methods = {"sfpca"};
  int threads = 1;
  PgaConfig pga;
};

struct TrialReport {
  std::string experiment;
  std::string method;
  int ambient_dim = 0;
  int subspace_dim = 0;
  int n_points = 0;
  double sigma = 0.0;
  int trial = 0;
  double n_i = 0.0;        // mean distance of raw points to the true subspace
  double n_o = 0.0;        // mean distance of denoised points to it
  double ratio = 0.0;      // n_o / n_i, or 0 when flagged noiseless
  double fit_seconds = 0.0;
  bool converged = true;
  bool zero_noise_input = false;  // n_i at floating-point floor; ratio forced 0
  std::string error;              // nonempty when the method failed
};

/// Dilation used by the synthetic point sampler: pi/4 on spheres, 1 on
/// hyperboloids.
inline double noise_dilation(const SpaceForm& space) {
  return space.spherical() ? std::numbers::pi / 4.0 : 1.0;
}

/// Random K-dimensional affine subspace: a normalized Gaussian base point
/// and Gram-Schmidt of Gaussian draws in its tangent space. The hyperbolic
/// base uses the spatial part of the draw with the time coordinate solved
/// from the norm constraint, which is always valid.
inline AffineSubspace random_subspace(const SpaceForm& space, int k,
                                      SplitMix64& rng) {
  if (k < 0 || k > space.ambient_dim())
    throw ConfigError("random_subspace: K out of range");
  const Index n = space.coord_size();

  Vector draw(n);
  Vector base;
  if (space.spherical()) {
    do {
      for (Index i = 0; i < n; ++i) draw[i] = rng.next_gaussian();
    } while (draw.norm() < 1e-12);
    base = space.radius() * draw / draw.norm();
  } else {
    for (Index i = 0; i < n; ++i) draw[i] = rng.next_gaussian();
    base.resize(n);
    base.tail(n - 1) = draw.tail(n - 1);
    base[0] = std::sqrt(1.0 + draw.tail(n - 1).squaredNorm());
    base *= space.radius();
  }

  Matrix basis(n, k);
  const double target = std::sqrt(std::abs(space.curvature()));
  for (int col = 0; col < k;) {
    for (Index i = 0; i < n; ++i) draw[i] = rng.next_gaussian();
    Vector t = space.tangent_project(base, draw);
    for (int j = 0; j < col; ++j) {
      const Vector h = basis.col(j);
      t -= (space.metric(t, h) / space.metric(h, h)) * h;
    }
    const double nrm = space.tangent_norm(t);
    if (nrm < 1e-8) continue;  // resample near-zero draws
    basis.col(col++) = t * (target / nrm);
  }
  return AffineSubspace(space, std::move(base), std::move(basis),
                        /*validate=*/false);
}

/// Noise-contaminated points x_n = exp_p(v_n + proj_p(nu_n)) where
/// v_n = sum_k c_k h_k with c ~ N(0, alpha I_K) over the unit-norm subspace
/// basis and nu ~ N(0, alpha sigma^2 I_{D+1}) projected onto the tangent
/// space. With sigma = 0 every point lies exactly on the subspace.
inline Matrix noisy_points(const AffineSubspace& sub, int n_points,
                           double sigma, SplitMix64& rng) {
  const SpaceForm& space = sub.space();
  const Index n = space.coord_size();
  const int k = sub.subspace_dim();
  const double alpha = noise_dilation(space);
  const double coeff_sd = std::sqrt(alpha);
  const double noise_sd = coeff_sd * sigma;
  // Unit-norm signal directions; the stored basis carries the |C| scaling.
  const Matrix unit_basis = sub.basis() / std::sqrt(std::abs(space.curvature()));

  Matrix points(n, n_points);
  Vector noise(n);
  for (int col = 0; col < n_points; ++col) {
    Vector v = Vector::Zero(n);
    for (int i = 0; i < k; ++i)
      v += (coeff_sd * rng.next_gaussian()) * unit_basis.col(i);
    for (Index i = 0; i < n; ++i) noise[i] = noise_sd * rng.next_gaussian();
    v += space.tangent_project(sub.base(), noise);
    points.col(col) = space.exp_map(sub.base(), v);
  }
  return points;
}

/// Input and output errors of a fitted model against the planted subspace:
/// n_i averages d(x_n, P_H(x_n)), n_o averages the distance of the denoised
/// points to the true subspace. Denoising is each model's own K-dimensional
/// reconstruction (PcaModel::denoise), matching how the methods are used.
/// When n_i sits at the floating-point floor (noiseless data) the ratio is
/// reported as 0 and flagged.
inline TrialReport evaluate(const AffineSubspace& true_sub,
                            const PcaModel& model, int k,
                            const Matrix& points) {
  TrialReport report;
  report.method = model.method;
  report.converged = model.converged;

  double acc_in = 0.0;
  double acc_out = 0.0;
  for (Index i = 0; i < points.cols(); ++i) {
    acc_in += true_sub.projection_distance(points.col(i));
    acc_out += true_sub.projection_distance(model.denoise(points.col(i), k));
  }
  const double inv_n = 1.0 / static_cast<double>(points.cols());
  report.n_i = acc_in * inv_n;
  report.n_o = acc_out * inv_n;
  if (report.n_i <= 1e-6 * true_sub.space().radius()) {
    report.zero_noise_input = true;
    report.ratio = 0.0;
  } else {
    report.ratio = report.n_o / report.n_i;
  }
  return report;
}

namespace detail {

struct GridCell {
  int ambient_dim, subspace_dim, n_points;
  double sigma;
};

inline std::vector<GridCell> expand_grid(const ExperimentConfig& cfg) {
  std::vector<GridCell> cells;
  for (int d : cfg.ambient_dims)
    for (int k : cfg.subspace_dims)
      for (int n : cfg.point_counts)
        for (double s : cfg.noise_levels)
          if (k >= 1 && k <= d) cells.push_back(GridCell{d, k, n, s});
  return cells;
}

inline PcaModel fit_by_name(const std::string& method, const SpaceForm& space,
                            const Matrix& points, const PgaConfig& pga) {
  if (method == "sfpca") return fit(space, points);
  if (method == "pga") return fit_pga(space, points, pga);
  throw ConfigError("unknown method: " + method);
}

}  // namespace detail

/// Runs the full Cartesian grid. Trials are independent and parallelized up
/// to cfg.threads; the report order is a pure function of the config.
/// Per-method failures are recorded in the report and the grid continues.
inline std::vector<TrialReport> run_grid(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("run_grid: trials must be >= 1");
  if (cfg.methods.empty()) throw ConfigError("run_grid: no methods");
  for (int d : cfg.ambient_dims)
    if (d < 2) throw ConfigError("run_grid: ambient dimension must be >= 2");
  for (int n : cfg.point_counts)
    if (n < 1) throw ConfigError("run_grid: point count must be >= 1");
  for (double s : cfg.noise_levels)
    if (s < 0.0) throw ConfigError("run_grid: negative noise level");

  const std::vector<detail::GridCell> cells = detail::expand_grid(cfg);
  const size_t n_methods = cfg.methods.size();
  const size_t n_tasks = cells.size() * static_cast<size_t>(cfg.trials);
  std::vector<TrialReport> reports(n_tasks * n_methods);

  auto run_task = [&](size_t task) {
    const size_t cell_idx = task / static_cast<size_t>(cfg.trials);
    const int trial = static_cast<int>(task % static_cast<size_t>(cfg.trials));
    const detail::GridCell& cell = cells[cell_idx];
    const SpaceForm space(cfg.kind, cfg.curvature, cell.ambient_dim);

    SplitMix64 rng(SplitMix64::derive_key(cfg.seed, cell_idx,
                                          static_cast<std::uint64_t>(trial)));
    for (size_t m = 0; m < n_methods; ++m) {
      TrialReport& report = reports[task * n_methods + m];
      report.experiment = cfg.name;
      report.method = cfg.methods[m];
      report.ambient_dim = cell.ambient_dim;
      report.subspace_dim = cell.subspace_dim;
      report.n_points = cell.n_points;
      report.sigma = cell.sigma;
      report.trial = trial;
    }

    try {
      const AffineSubspace sub = random_subspace(space, cell.subspace_dim, rng);
      const Matrix points = noisy_points(sub, cell.n_points, cell.sigma, rng);
      for (size_t m = 0; m < n_methods; ++m) {
        TrialReport& report = reports[task * n_methods + m];
        try {
          const auto start = std::chrono::steady_clock::now();
          const PcaModel model =
              detail::fit_by_name(cfg.methods[m], space, points, cfg.pga);
          const auto stop = std::chrono::steady_clock::now();
          TrialReport eval = evaluate(sub, model, cell.subspace_dim, points);
          report.n_i = eval.n_i;
          report.n_o = eval.n_o;
          report.ratio = eval.ratio;
          report.converged = eval.converged;
          report.zero_noise_input = eval.zero_noise_input;
          report.fit_seconds =
              std::chrono::duration<double>(stop - start).count();
        } catch (const std::exception& e) {
          report.error = e.what();
          report.converged = false;
        }
      }
    } catch (const std::exception& e) {
      for (size_t m = 0; m < n_methods; ++m) {
        reports[task * n_methods + m].error = e.what();
        reports[task * n_methods + m].converged = false;
      }
    }
  };

  const int n_threads =
      std::max(1, std::min(cfg.threads,
                           static_cast<int>(std::thread::hardware_concurrency() == 0
                                                ? 1
                                                : std::thread::hardware_concurrency())));
  if (n_threads == 1 || n_tasks <= 1) {
    for (size_t t = 0; t < n_tasks; ++t) run_task(t);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t t; (t = next.fetch_add(1)) < n_tasks;) run_task(t);
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  }
  return reports;
}

}  // namespace sfpca
