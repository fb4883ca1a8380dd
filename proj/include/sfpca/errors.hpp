#pragma once

#include <stdexcept>

namespace sfpca {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
  using Error::Error;
};

class InvalidPoint : public Error {
  using Error::Error;
};

class EmptyInput : public Error {
  using Error::Error;
};

/// Spherical logarithm at an antipodal pair: the geodesic is not unique.
class AntipodalPoint : public Error {
  using Error::Error;
};

/// Spherical projection of a point equidistant from the whole subspace.
class NonUniqueProjection : public Error {
  using Error::Error;
};

class PointNotOnSubspace : public Error {
  using Error::Error;
};

/// The J-eigenproblem produced eigenvalues with non-negligible imaginary parts.
class ComplexSpectrum : public Error {
  using Error::Error;
};

/// An eigenvector of A*J has (numerically) zero Lorentzian self-product.
class DegenerateNorm : public Error {
  using Error::Error;
};

/// A decomposition lacks the sign structure the caller requires.
class EigenstructureError : public Error {
  using Error::Error;
};

class IoError : public Error {
  using Error::Error;
};

class ConfigError : public Error {
  using Error::Error;
};

}  // namespace sfpca
