#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <utility>

#include "sfpca/errors.hpp"
#include "sfpca/lorentz.hpp"
#include "sfpca/space_form.hpp"
#include "sfpca/subspace.hpp"
#include "sfpca/types.hpp"

namespace sfpca {

/// Empirical second moment C_x = (1/N) sum x_n x_n^T of ambient coordinates.
/// Symmetric positive semidefinite by construction.
struct SecondMoment {
  Matrix matrix;
  Index n_points = 0;
};

/// Points are the columns of `points`.
inline SecondMoment second_moment(const Matrix& points) {
  if (points.cols() == 0) throw EmptyInput("second_moment: no points");
  Matrix m = points * points.transpose() / static_cast<double>(points.cols());
  m = ((m + m.transpose()) * 0.5).eval();
  return SecondMoment{std::move(m), points.cols()};
}

/// Fitted space-form PCA model. All D components are stored so that the
/// optimal K-dimensional subspace is the K-prefix for every K without
/// refitting; nesting is a property of the solution, which makes this free.
struct PcaModel {
  SpaceForm space;
  std::string method;            // "sfpca" or "pga"
  Vector base;                   // optimal base point, on the manifold
  Matrix components;             // (D+1) x D, canonical norm g(h,h) = |C|
  double base_eigenvalue = 0.0;  // eigenvalue paired with the base axis
  Vector component_eigenvalues;  // size D, descending
  bool degenerate = false;       // spectrum had repeated/deficient structure
  bool regularized = false;      // a ridge was added to recover the spectrum
  bool converged = true;         // iterative base-point search converged

  /// The optimal K-dimensional affine subspace (basis prefix).
  AffineSubspace subspace(int k) const {
    if (k < 0 || k > components.cols())
      throw DimensionMismatch("PcaModel::subspace: K out of range");
    return AffineSubspace(space, base, components.leftCols(k),
                          /*validate=*/false);
  }

  /// The model's own K-dimensional reconstruction of a point. Closed-form
  /// models denoise by geodesic projection; the tangent-space baseline
  /// reconstructs through its own pipeline (log at the mean, project onto
  /// the leading tangent directions, exp back). Comparisons between methods
  /// must use each method's reconstruction, not a shared projection.
  Vector denoise(const Vector& x, int k) const {
    if (k < 0 || k > components.cols())
      throw DimensionMismatch("PcaModel::denoise: K out of range");
    if (method == "pga") {
      const Vector v = space.log_map(base, x);
      Vector projected = Vector::Zero(v.size());
      for (int i = 0; i < k; ++i) {
        const Vector h = components.col(i);
        projected += (space.metric(v, h) / space.metric(h, h)) * h;
      }
      return space.exp_map(base, projected);
    }
    return subspace(k).project(x);
  }
};

namespace detail {

inline void orient_first_entry(Vector& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

// Repeated eigenvalues or rank deficiency make the eigenbasis non-unique;
// flag so callers can treat the component choice as one of many.
inline bool spectrum_degenerate(const Vector& descending) {
  const Index n = descending.size();
  const double scale = std::max(1.0, std::abs(descending[0]));
  for (Index i = 0; i + 1 < n; ++i)
    if (std::abs(descending[i] - descending[i + 1]) <= 1e-10 * scale)
      return true;
  return descending[n - 1] <= 1e-12 * scale;
}

}  // namespace detail

/// Spherical PCA: base point is the scaled leading eigenvector of the second
/// moment, components follow in descending eigenvalue order. Closed form; no
/// iteration.
inline PcaModel fit_spherical(const SpaceForm& space, const Matrix& points) {
  if (!space.spherical())
    throw ConfigError("fit_spherical: space form is not spherical");
  if (points.rows() != space.coord_size())
    throw DimensionMismatch("fit_spherical: points have wrong row count");
  const SecondMoment moment = second_moment(points);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(moment.matrix);
  if (solver.info() != Eigen::Success)
    throw Error("fit_spherical: eigensolver did not converge");

  const Index n = space.coord_size();
  Vector values(n);
  Matrix vectors(n, n);
  for (Index i = 0; i < n; ++i) {  // descending order
    values[i] = solver.eigenvalues()[n - 1 - i];
    Vector v = solver.eigenvectors().col(n - 1 - i);
    detail::orient_first_entry(v);
    vectors.col(i) = v;
  }

  PcaModel model{space, "sfpca", Vector(), Matrix(), 0.0, Vector()};
  model.base = space.radius() * vectors.col(0);
  model.base_eigenvalue = values[0];
  const double comp_scale = std::sqrt(space.curvature());
  model.components = comp_scale * vectors.rightCols(n - 1);
  model.component_eigenvalues = values.tail(n - 1);
  model.degenerate = detail::spectrum_degenerate(values);
  return model;
}

/// Hyperbolic PCA: base point is the scaled negative J-eigenvector of the
/// second moment, components are the positive J-eigenvectors in descending
/// J-eigenvalue order. If the decomposition degenerates (rank-deficient
/// moment), a ridge of 1e-12 * trace is added once and the model flagged.
inline PcaModel fit_hyperbolic(const SpaceForm& space, const Matrix& points) {
  if (space.spherical())
    throw ConfigError("fit_hyperbolic: space form is not hyperbolic");
  if (points.rows() != space.coord_size())
    throw DimensionMismatch("fit_hyperbolic: points have wrong row count");
  const SecondMoment moment = second_moment(points);

  JEigenDecomposition dec;
  bool regularized = false;
  try {
    dec = j_eigendecompose(moment.matrix);
  } catch (const DegenerateNorm&) {
    const double ridge = 1e-12 * moment.matrix.trace();
    Matrix lifted =
        moment.matrix + ridge * Matrix::Identity(moment.matrix.rows(),
                                                 moment.matrix.cols());
    dec = j_eigendecompose(lifted);
    regularized = true;
  }

  int negatives = 0;
  for (Index i = 0; i < dec.signs.size(); ++i)
    if (dec.signs[i] < 0) ++negatives;
  if (negatives != 1)
    throw EigenstructureError(
        "fit_hyperbolic: expected exactly one negative J-eigenvector");

  const Index n = space.coord_size();
  PcaModel model{space, "sfpca", Vector(), Matrix(), 0.0, Vector()};
  Vector base = space.radius() * dec.vectors.col(0);
  if (base[0] < 0.0) base = -base;  // upper sheet
  model.base = std::move(base);
  model.base_eigenvalue = dec.eigenvalues[0];
  model.components = std::sqrt(-space.curvature()) * dec.vectors.rightCols(n - 1);
  model.component_eigenvalues = dec.eigenvalues.tail(n - 1);
  model.degenerate = dec.degenerate;
  model.regularized = regularized;
  return model;
}

inline PcaModel fit(const SpaceForm& space, const Matrix& points) {
  return space.spherical() ? fit_spherical(space, points)
                           : fit_hyperbolic(space, points);
}

/// Mean projection cost of the K-prefix subspace: the average residual
/// energy of the points, i.e. the proper PCA objective at dimension K.
inline double cost(const PcaModel& model, int k, const Matrix& points) {
  const AffineSubspace sub = model.subspace(k);
  double acc = 0.0;
  for (Index i = 0; i < points.cols(); ++i)
    acc += sub.residual_energy(points.col(i));
  return acc / static_cast<double>(points.cols());
}

/// The centroid implied by the proper cost: the optimal zero-dimensional
/// subspace, identical to the base point of every fitted model. The
/// spherical mean identifies a direction only; its sign is fixed by the
/// first-nonzero-entry convention.
inline Vector mean_point(const SpaceForm& space, const Matrix& points) {
  return fit(space, points).base;
}

}  // namespace sfpca
