#pragma once

#include <cmath>
#include <sstream>
#include <utility>

#include "sfpca/errors.hpp"
#include "sfpca/space_form.hpp"
#include "sfpca/types.hpp"

namespace sfpca {

/// Riemannian affine subspace of a space form: the image under exp_p of the
/// span of K tangent vectors at p, equivalently the intersection of the
/// manifold with span{p, h_1, ..., h_K}. Basis vectors are stored with the
/// canonical scaling g(h_i, h_j) = |C| delta_ij, which makes the closed-form
/// projection, distance and isometry formulas coefficient-free. K = 0 is the
/// single point p. Immutable after construction; all operations are pure.
class AffineSubspace {
 public:
  /// `basis` columns must already be tangent at `base` and mutually
  /// orthogonal; they are rescaled to the canonical norm. Pass
  /// validate = false on hot paths where the caller guarantees the
  /// invariants (fit output, generated subspaces).
  AffineSubspace(SpaceForm space, Vector base, Matrix basis,
                 bool validate = true)
      : space_(space), base_(std::move(base)), basis_(std::move(basis)) {
    if (basis_.size() > 0 && basis_.rows() != space_.coord_size())
      throw DimensionMismatch("AffineSubspace: basis rows must equal D+1");
    if (basis_.cols() > space_.ambient_dim())
      throw DimensionMismatch("AffineSubspace: more basis vectors than D");
    if (validate) {
      space_.check_point(base_);
      for (Index i = 0; i < basis_.cols(); ++i) {
        if (!space_.is_tangent(base_, basis_.col(i), 1e-8))
          throw InvalidPoint("AffineSubspace: basis vector not tangent at base");
        for (Index j = 0; j < i; ++j) {
          if (std::abs(space_.metric(basis_.col(i), basis_.col(j))) >
              1e-8 * std::abs(space_.curvature()))
            throw InvalidPoint("AffineSubspace: basis vectors not orthogonal");
        }
      }
    }
    const double target = std::sqrt(std::abs(space_.curvature()));
    for (Index i = 0; i < basis_.cols(); ++i) {
      const double nrm = space_.tangent_norm(basis_.col(i));
      if (nrm < 1e-12)
        throw InvalidPoint("AffineSubspace: basis vector has zero norm");
      basis_.col(i) *= target / nrm;
    }
  }

  /// Builds a subspace from an unnormalized spanning set by Gram-Schmidt
  /// under the manifold's bilinear form. Throws on rank-deficient input.
  static AffineSubspace from_spanning(const SpaceForm& space,
                                      const Vector& base,
                                      const Matrix& spanning) {
    space.check_point(base);
    Matrix basis(space.coord_size(), spanning.cols());
    Index accepted = 0;
    for (Index i = 0; i < spanning.cols(); ++i) {
      Vector t = space.tangent_project(base, spanning.col(i));
      for (Index j = 0; j < accepted; ++j) {
        const Vector h = basis.col(j);
        t -= (space.metric(t, h) / space.metric(h, h)) * h;
      }
      const double nrm = space.tangent_norm(t);
      if (nrm < 1e-10 * (1.0 + spanning.col(i).norm()))
        throw InvalidPoint("from_spanning: spanning set is rank-deficient");
      basis.col(accepted++) = t * (std::sqrt(std::abs(space.curvature())) / nrm);
    }
    return AffineSubspace(space, base, std::move(basis), /*validate=*/false);
  }

  const SpaceForm& space() const { return space_; }
  const Vector& base() const { return base_; }
  const Matrix& basis() const { return basis_; }
  int subspace_dim() const { return static_cast<int>(basis_.cols()); }

  /// Geodesic (distance-minimizing) projection onto the subspace. Spherical
  /// points equidistant from the whole subspace have no unique projection
  /// and raise NonUniqueProjection.
  Vector project(const Vector& x) const {
    Vector p = combination(x);
    if (space_.spherical() && p.norm() < kDegenerateTol * space_.radius())
      throw NonUniqueProjection(
          "project: point is equidistant from the whole subspace");
    return space_.renormalize(p);
  }

  /// min_y d(x, y) over the subspace, evaluated from the basis of H with
  /// domain clamping. Well-defined even where the projection is not unique.
  double projection_distance(const Vector& x) const {
    const double r = alignment(x);
    if (space_.spherical())
      return std::acos(std::sqrt(std::clamp(r, 0.0, 1.0))) /
             std::sqrt(space_.curvature());
    return std::acosh(std::sqrt(std::max(r, 1.0))) /
           std::sqrt(-space_.curvature());
  }

  /// Squared residual of x against the orthogonal complement of the
  /// subspace: sin^2 resp. sinh^2 of the scaled projection distance.
  /// Computed from the basis of H, so no explicit complement is needed.
  double residual_energy(const Vector& x) const {
    const double r = alignment(x);
    if (space_.spherical()) return std::max(0.0, 1.0 - r);
    return std::max(0.0, r - 1.0);
  }

  /// Isometry onto the K-dimensional space form of the same curvature.
  /// Points off the subspace are projected first when auto_project is set,
  /// otherwise rejected once their residual exceeds `tol`.
  Vector to_low_dim(const Vector& x, bool auto_project = true,
                    double tol = 1e-8) const {
    Vector y = x;
    if (residual_energy(y) > tol) {
      if (!auto_project)
        throw PointNotOnSubspace("to_low_dim: point is not on the subspace");
      y = project(y);
    }
    const int k = subspace_dim();
    Vector out(k + 1);
    const double alpha = space_.radius();
    out[0] = alpha * space_.curvature() * space_.metric(y, base_);
    for (int i = 0; i < k; ++i)
      out[i + 1] = alpha * space_.metric(y, basis_.col(i));
    return out;
  }

  /// Inverse of to_low_dim; maps a point of the K-dimensional model into the
  /// subspace. Validates y against the low-dimensional norm constraint.
  Vector from_low_dim(const Vector& y) const {
    const int k = subspace_dim();
    if (y.size() != k + 1)
      throw DimensionMismatch("from_low_dim: expected a vector of length K+1");
    check_low_dim_point(y);
    const double alpha = space_.radius();
    const double s = space_.spherical() ? 1.0 : -1.0;
    Vector x = alpha * s * space_.curvature() * y[0] * base_;
    if (k > 0) x += alpha * (basis_ * y.tail(k));
    return space_.renormalize(x);
  }

  /// The (D+1)x(K+1) sliced matrix G = [sqrt|C| p, h_1/sqrt|C|, ...] with
  /// G^T G = I (spherical) resp. G^T J G = J_K (hyperbolic); G y equals
  /// from_low_dim(y).
  Matrix sliced_matrix() const {
    const double root = std::sqrt(std::abs(space_.curvature()));
    Matrix g(space_.coord_size(), subspace_dim() + 1);
    g.col(0) = root * base_;
    for (int i = 0; i < subspace_dim(); ++i)
      g.col(i + 1) = basis_.col(i) / root;
    return g;
  }

  /// The K-dimensional space form the subspace is isometric to (K >= 1).
  SpaceForm low_dim_space() const {
    if (subspace_dim() < 1)
      throw DimensionMismatch("low_dim_space: subspace is a single point");
    return SpaceForm(space_.kind(), space_.curvature(), subspace_dim());
  }

 private:
  static constexpr double kDegenerateTol = 1e-10;

  // C^2 g(x,p)^2 + sum g(x,h_k)^2 (spherical; <= 1 on the manifold) resp.
  // C^2 [x,p]^2 - sum [x,h_k]^2 (hyperbolic; >= 1 on the manifold).
  double alignment(const Vector& x) const {
    const double a0 = space_.curvature() * space_.metric(x, base_);
    double acc = a0 * a0;
    const double sgn = space_.spherical() ? 1.0 : -1.0;
    for (Index i = 0; i < basis_.cols(); ++i) {
      const double a = space_.metric(x, basis_.col(i));
      acc += sgn * a * a;
    }
    return acc;
  }

  // Unnormalized projection C g(x,p) p +- (1/C) sum g(x,h_k) h_k.
  Vector combination(const Vector& x) const {
    Vector p = space_.curvature() * space_.metric(x, base_) * base_;
    const double sgn = space_.spherical() ? 1.0 : -1.0;
    for (Index i = 0; i < basis_.cols(); ++i)
      p += sgn * (space_.metric(x, basis_.col(i)) / space_.curvature()) *
           basis_.col(i);
    return p;
  }

  void check_low_dim_point(const Vector& y) const {
    double q;
    if (space_.spherical()) {
      q = y.dot(y);
    } else {
      q = y.dot(y) - 2.0 * y[0] * y[0];
      if (!(y[0] > 0.0))
        throw InvalidPoint("from_low_dim: hyperbolic point must have y0 > 0");
    }
    if (std::abs(space_.curvature() * q - 1.0) > kValidationTol)
      throw InvalidPoint("from_low_dim: point violates the norm constraint");
  }

  SpaceForm space_;
  Vector base_;
  Matrix basis_;
};

/// Deterministic metric-orthonormal basis of the tangent space at p,
/// completed from the coordinate axes; g(f_i, f_j) = delta_ij.
inline Matrix tangent_frame(const SpaceForm& space, const Vector& p) {
  const Index n = space.coord_size();
  Matrix frame(n, space.ambient_dim());
  Index accepted = 0;
  for (Index axis = 0; axis < n && accepted < space.ambient_dim(); ++axis) {
    Vector t = space.tangent_project(p, Vector::Unit(n, axis));
    for (Index j = 0; j < accepted; ++j)
      t -= space.metric(t, frame.col(j)) * frame.col(j);
    const double nrm = space.tangent_norm(t);
    if (nrm < 1e-8) continue;
    frame.col(accepted++) = t / nrm;
  }
  if (accepted != space.ambient_dim())
    throw Error("tangent_frame: failed to complete a tangent basis");
  return frame;
}

}  // namespace sfpca
