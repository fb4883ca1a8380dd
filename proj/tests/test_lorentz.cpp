#include <catch2/catch.hpp>

#include <cmath>

#include "helpers.hpp"
#include "sfpca/lorentz.hpp"
#include "sfpca/pca.hpp"

using namespace sfpca;
using sfpca::testing::random_point;
using sfpca::testing::random_tangent;

namespace {

Matrix random_square(Index n, SplitMix64& rng) {
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = rng.next_gaussian();
  return a;
}

// Cloud of hyperbolic points spread around a random base.
Matrix hyperbolic_cloud(const SpaceForm& space, Index count, SplitMix64& rng,
                        double spread = 1.0) {
  Matrix points(space.coord_size(), count);
  const Vector base = random_point(space, rng);
  for (Index i = 0; i < count; ++i)
    points.col(i) =
        space.exp_map(base, random_tangent(space, base, rng, spread));
  return points;
}

}  // namespace

TEST_CASE("j_inner basics") {
  CHECK(j_inner(Vector::Unit(3, 0), Vector::Unit(3, 0)) == -1.0);
  CHECK(j_inner(Vector::Unit(3, 1), Vector::Unit(3, 1)) == 1.0);

  Vector light(2);
  light << 1.0, 1.0;
  CHECK(j_inner(light, light) == 0.0);

  CHECK_THROWS_AS(j_inner(Vector::Zero(2), Vector::Zero(3)),
                  DimensionMismatch);
}

TEST_CASE("j_adjoint fixed points, involution and product rule") {
  const Index n = 4;
  CHECK((j_adjoint(Matrix::Identity(n, n)) - Matrix::Identity(n, n)).norm() ==
        0.0);
  CHECK((j_adjoint(j_matrix(n)) - j_matrix(n)).norm() == 0.0);

  SplitMix64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = random_square(n, rng);
    const Matrix b = random_square(n, rng);
    CHECK((j_adjoint(j_adjoint(a)) - a).norm() == 0.0);
    CHECK((j_adjoint(a * b) - j_adjoint(b) * j_adjoint(a)).norm() <
          1e-12 * a.norm() * b.norm());
  }
}

TEST_CASE("is_j_unitary recognizes boosts and rejects scalings") {
  CHECK(is_j_unitary(Matrix::Identity(3, 3)));

  const double t = 0.8;
  Matrix boost(2, 2);
  boost << std::cosh(t), std::sinh(t), std::sinh(t), std::cosh(t);
  CHECK(is_j_unitary(boost));

  CHECK_FALSE(is_j_unitary(2.0 * Matrix::Identity(3, 3)));
}

TEST_CASE("identity decomposes into the standard basis") {
  const Index n = 4;
  const JEigenDecomposition dec = j_eigendecompose(Matrix::Identity(n, n));

  CHECK(dec.signs[0] == -1);
  for (Index i = 1; i < n; ++i) CHECK(dec.signs[i] == 1);
  for (Index i = 0; i < n; ++i) CHECK(dec.eigenvalues[i] == Approx(1.0));
  // e_0 is the unique timelike direction.
  CHECK(std::abs(dec.vectors(0, 0)) == Approx(1.0));
  CHECK(dec.degenerate);  // all eigenvalues coincide
  CHECK((j_reconstruct(dec) - Matrix::Identity(n, n)).norm() < 1e-10);
}

TEST_CASE("diagonal matrices with distinct entries decompose exactly") {
  Vector d(4);
  d << 0.9, 2.0, 0.4, 1.3;
  const Matrix a = d.asDiagonal();
  const JEigenDecomposition dec = j_eigendecompose(a);

  CHECK(dec.signs[0] == -1);
  CHECK(dec.eigenvalues[0] == Approx(0.9));
  // positive vectors follow in descending eigenvalue order
  CHECK(dec.eigenvalues[1] == Approx(2.0));
  CHECK(dec.eigenvalues[2] == Approx(1.3));
  CHECK(dec.eigenvalues[3] == Approx(0.4));
  CHECK_FALSE(dec.degenerate);
  CHECK((j_reconstruct(dec) - a).norm() < 1e-12);
}

TEST_CASE("1+1 Lorentz diagonal reconstructs exactly") {
  Vector d(2);
  d << 2.0, 3.0;
  const Matrix a = d.asDiagonal();
  const JEigenDecomposition dec = j_eigendecompose(a);
  CHECK((j_reconstruct(dec) - a).norm() < 1e-12);
}

TEST_CASE("second moments of hyperbolic clouds satisfy the eigen contract") {
  SplitMix64 rng(77);
  const SpaceForm space = SpaceForm::hyperbolic(-1.0, 5);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix cloud = hyperbolic_cloud(space, 50, rng);
    const Matrix cx = second_moment(cloud).matrix;
    const JEigenDecomposition dec = j_eigendecompose(cx);

    int negatives = 0;
    for (Index i = 0; i < dec.signs.size(); ++i)
      if (dec.signs[i] < 0) ++negatives;
    CHECK(negatives == 1);
    CHECK(dec.signs[0] == -1);

    for (Index i = 0; i < dec.eigenvalues.size(); ++i)
      CHECK(dec.eigenvalues[i] >= -1e-10);

    // |[v,v]| = 1 for every column.
    for (Index i = 0; i < dec.vectors.cols(); ++i)
      CHECK(std::abs(std::abs(j_inner(dec.vectors.col(i),
                                      dec.vectors.col(i))) -
                     1.0) < 1e-8);

    // V^T J V = J.
    const Matrix vjv = dec.vectors.transpose() * j_matrix(6) * dec.vectors;
    CHECK((vjv - j_matrix(6)).norm() < 1e-8 * std::sqrt(6.0));

    // Reconstruction.
    CHECK((j_reconstruct(dec) - cx).norm() < 1e-8 * cx.norm());

    // Each column solves the eigenequation of Cx * J to residual accuracy.
    Matrix cxj = cx;
    cxj.col(0) *= -1.0;
    for (Index i = 0; i < dec.vectors.cols(); ++i) {
      const Vector v = dec.vectors.col(i);
      const Vector residual =
          cxj * v - double(dec.signs[i]) * dec.eigenvalues[i] * v;
      CHECK(residual.norm() < 1e-8 * cx.norm() * v.norm());
    }
  }
}

TEST_CASE("decomposition is deterministic") {
  SplitMix64 rng(123);
  const SpaceForm space = SpaceForm::hyperbolic(-1.0, 4);
  const Matrix cloud = hyperbolic_cloud(space, 30, rng);
  const Matrix cx = second_moment(cloud).matrix;
  const JEigenDecomposition a = j_eigendecompose(cx);
  const JEigenDecomposition b = j_eigendecompose(cx);
  CHECK((a.vectors - b.vectors).norm() == 0.0);
  CHECK((a.eigenvalues - b.eigenvalues).norm() == 0.0);
}

TEST_CASE("symmetric indefinite input with rotational spectrum is rejected") {
  Matrix a(2, 2);
  a << 0.0, 1.0, 1.0, 0.0;  // A*J has eigenvalues +-i
  CHECK_THROWS_AS(j_eigendecompose(a), ComplexSpectrum);
}

TEST_CASE("lightlike rank-deficient input raises DegenerateNorm") {
  Matrix a(2, 2);
  a << 1.0, 1.0, 1.0, 1.0;  // v v^T for lightlike v
  CHECK_THROWS_AS(j_eigendecompose(a), DegenerateNorm);
}

TEST_CASE("nonsymmetric input is rejected") {
  Matrix a(2, 2);
  a << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(j_eigendecompose(a), Error);
}
