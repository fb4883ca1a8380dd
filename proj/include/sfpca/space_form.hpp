#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "sfpca/errors.hpp"
#include "sfpca/lorentz.hpp"
#include "sfpca/types.hpp"

namespace sfpca {

enum class Geometry { Spherical, Hyperbolic };

inline const char* to_string(Geometry kind) {
  return kind == Geometry::Spherical ? "spherical" : "hyperbolic";
}

/// Relative tolerance used by the explicit point/tangent validation calls.
inline constexpr double kValidationTol = 1e-6;

/// A sphere or hyperboloid of constant curvature C, realized in R^{D+1}:
///
///   spherical   {x : <x,x> = 1/C},           C > 0
///   hyperbolic  {x : [x,x] = 1/C, x_0 > 0},  C < 0
///
/// where <.,.> is the dot product and [.,.] the Lorentzian product. Geodesic
/// operations are raw closed forms with domain clamping; validity of inputs
/// is checked only through the explicit check_point / check_tangent calls so
/// that inner loops stay branch-light. All members are const-pure and safe
/// for unrestricted parallel use.
class SpaceForm {
 public:
  SpaceForm(Geometry kind, double curvature, int ambient_dim)
      : kind_(kind), curvature_(curvature), dim_(ambient_dim) {
    if (ambient_dim < 1)
      throw ConfigError("SpaceForm: ambient dimension must be at least 1");
    if (kind == Geometry::Spherical && !(curvature > 0.0))
      throw ConfigError("SpaceForm: spherical curvature must be positive");
    if (kind == Geometry::Hyperbolic && !(curvature < 0.0))
      throw ConfigError("SpaceForm: hyperbolic curvature must be negative");
  }

  static SpaceForm spherical(double curvature, int ambient_dim) {
    return SpaceForm(Geometry::Spherical, curvature, ambient_dim);
  }
  static SpaceForm hyperbolic(double curvature, int ambient_dim) {
    return SpaceForm(Geometry::Hyperbolic, curvature, ambient_dim);
  }

  Geometry kind() const { return kind_; }
  double curvature() const { return curvature_; }
  int ambient_dim() const { return dim_; }
  Index coord_size() const { return dim_ + 1; }
  bool spherical() const { return kind_ == Geometry::Spherical; }

  /// Curvature radius 1/sqrt(|C|).
  double radius() const { return 1.0 / std::sqrt(std::abs(curvature_)); }

  /// The bilinear form of the ambient model: dot product (spherical) or
  /// Lorentzian product (hyperbolic).
  double metric(const Vector& u, const Vector& v) const {
    if (u.size() != coord_size() || v.size() != coord_size())
      throw DimensionMismatch("metric: expected vectors of length D+1");
    if (spherical()) return u.dot(v);
    return u.dot(v) - 2.0 * u[0] * v[0];
  }

  /// Norm of a tangent vector. Tangent vectors at hyperbolic points have
  /// nonnegative self-product; tiny negative excursions are clamped to zero.
  double tangent_norm(const Vector& v) const {
    return std::sqrt(std::max(metric(v, v), 0.0));
  }

  /// Geodesic distance, with the acos argument clamped to [-1,1] and the
  /// acosh argument to [1,inf) so near-coincident points cannot produce NaN.
  double distance(const Vector& x, const Vector& y) const {
    const double g = curvature_ * metric(x, y);
    if (spherical())
      return std::acos(std::clamp(g, -1.0, 1.0)) / std::sqrt(curvature_);
    return std::acosh(std::max(g, 1.0)) / std::sqrt(-curvature_);
  }

  /// Geodesic starting at p with initial velocity v, evaluated at time 1.
  /// The result is renormalized onto the manifold to stop constraint drift
  /// across iterated calls. Far hyperbolic outputs (coordinates ~1e7 and
  /// beyond) lose the rescaling factor to cancellation; there the time
  /// coordinate is solved from the spatial part instead, which restores the
  /// constraint without subtractions.
  Vector exp_map(const Vector& p, const Vector& v) const {
    const double t = tangent_norm(v);
    const double s = std::sqrt(std::abs(curvature_)) * t;
    Vector y;
    if (spherical()) {
      y = std::cos(s) * p + sinc(s) * v;
      return renormalize(y);
    }
    y = std::cosh(s) * p + sinch(s) * v;
    const double q = curvature_ * metric(y, y);
    if (q > 0.5) return y / std::sqrt(q);
    y[0] = std::sqrt(-1.0 / curvature_ + y.tail(y.size() - 1).squaredNorm());
    return y;
  }

  /// Initial velocity of the geodesic from p to x; ||log_p(x)|| = d(p, x).
  /// Throws AntipodalPoint for spherical x at distance pi/sqrt(C) from p,
  /// where the geodesic is not unique.
  Vector log_map(const Vector& p, const Vector& x) const {
    const double g = curvature_ * metric(x, p);
    if (spherical()) {
      const double c = std::clamp(g, -1.0, 1.0);
      if (c <= -1.0 + kAntipodalTol)
        throw AntipodalPoint("log_map: antipodal points have no unique geodesic");
      const double s = std::acos(c);
      const double f = s < 1e-8 ? 1.0 : s / std::sin(s);
      return f * (x - c * p);
    }
    const double c = std::max(g, 1.0);
    const double s = std::acosh(c);
    const double f = s < 1e-8 ? 1.0 : s / std::sinh(s);
    return f * (x - c * p);
  }

  /// Component of w tangent at p, i.e. w - C g(w,p) p; the unique
  /// decomposition with metric(result, p) = 0.
  Vector tangent_project(const Vector& p, const Vector& w) const {
    return w - curvature_ * metric(w, p) * p;
  }

  /// Rescales x onto the manifold. x must be on the correct side of the
  /// light cone (hyperbolic) resp. nonzero (spherical).
  Vector renormalize(const Vector& x) const {
    const double q = curvature_ * metric(x, x);
    if (!(q > 0.0))
      throw InvalidPoint("renormalize: vector cannot be scaled onto the manifold");
    return x / std::sqrt(q);
  }

  /// |C g(x,x) - 1|; zero on the manifold.
  double point_residual(const Vector& x) const {
    return std::abs(curvature_ * metric(x, x) - 1.0);
  }

  bool is_point(const Vector& x, double tol = kValidationTol) const {
    if (x.size() != coord_size()) return false;
    if (!spherical() && !(x[0] > 0.0)) return false;
    return point_residual(x) <= tol;
  }

  void check_point(const Vector& x, double tol = kValidationTol) const {
    if (x.size() != coord_size())
      throw InvalidPoint("check_point: expected a vector of length D+1");
    if (!spherical() && !(x[0] > 0.0))
      throw InvalidPoint("check_point: hyperbolic point must have x0 > 0");
    const double r = point_residual(x);
    if (r > tol) {
      std::ostringstream msg;
      msg << "check_point: norm constraint violated, residual " << r
          << " exceeds tolerance " << tol;
      throw InvalidPoint(msg.str());
    }
  }

  bool is_tangent(const Vector& p, const Vector& v,
                  double tol = kValidationTol) const {
    if (v.size() != coord_size()) return false;
    return std::abs(metric(v, p)) <= tol * radius() * (1.0 + tangent_norm(v));
  }

  void check_tangent(const Vector& p, const Vector& v,
                     double tol = kValidationTol) const {
    if (!is_tangent(p, v, tol))
      throw InvalidPoint("check_tangent: vector is not tangent at the base point");
  }

 private:
  static constexpr double kAntipodalTol = 1e-12;

  static double sinc(double s) {
    return s < 1e-8 ? 1.0 - s * s / 6.0 : std::sin(s) / s;
  }
  static double sinch(double s) {
    return s < 1e-8 ? 1.0 + s * s / 6.0 : std::sinh(s) / s;
  }

  Geometry kind_;
  double curvature_;
  int dim_;
};

}  // namespace sfpca
