#include <catch2/catch.hpp>

#include <cmath>

#include "helpers.hpp"
#include "sfpca/bench.hpp"
#include "sfpca/pca.hpp"
#include "sfpca/pga.hpp"

using namespace sfpca;
using sfpca::testing::random_point;
using sfpca::testing::random_tangent;

namespace {

Matrix cloud(const SpaceForm& space, int n, std::uint64_t seed,
             double spread = 0.6) {
  SplitMix64 rng(seed);
  const Vector base = random_point(space, rng);
  Matrix points(space.coord_size(), n);
  for (int i = 0; i < n; ++i)
    points.col(i) = space.exp_map(base, random_tangent(space, base, rng, spread));
  return points;
}

}  // namespace

TEST_CASE("frechet mean of identical points is the point") {
  const SpaceForm space = SpaceForm::hyperbolic(-1.0, 3);
  SplitMix64 rng(3);
  const Vector x = random_point(space, rng);
  Matrix points(4, 5);
  for (int i = 0; i < 5; ++i) points.col(i) = x;
  const FrechetResult res = frechet_mean(space, points);
  CHECK(res.converged);
  CHECK(res.iterations <= 2);
  CHECK((res.mean - x).norm() < 1e-9);
}

TEST_CASE("frechet mean of a symmetric hyperbolic pair is the midpoint") {
  const SpaceForm space = SpaceForm::hyperbolic(-1.0, 2);
  Matrix points(3, 2);
  points.col(0) << std::cosh(1.0), std::sinh(1.0), 0.0;
  points.col(1) << std::cosh(1.0), -std::sinh(1.0), 0.0;
  const FrechetResult res = frechet_mean(space, points);
  CHECK(res.converged);
  CHECK((res.mean - Vector::Unit(3, 0)).norm() < 1e-6);
}

TEST_CASE("the returned mean satisfies the first-order condition") {
  PgaConfig cfg;
  cfg.record_history = true;
  for (const SpaceForm& space :
       {SpaceForm::spherical(1.0, 4), SpaceForm::hyperbolic(-1.0, 4)}) {
    for (std::uint64_t seed : {7u, 8u, 9u}) {
      const Matrix points = cloud(space, 30, seed);
      const FrechetResult res = frechet_mean(space, points, cfg);
      REQUIRE(res.converged);
      CHECK(res.grad_norm <= cfg.grad_tol);

      // Accepted iterations never increase the objective beyond ulp slack.
      for (size_t i = 1; i < res.objective_history.size(); ++i)
        CHECK(res.objective_history[i] <=
              res.objective_history[i - 1] +
                  1e-13 * (1.0 + res.objective_history[i - 1]));
    }
  }
}

TEST_CASE("invalid configurations are rejected") {
  const SpaceForm space = SpaceForm::spherical(1.0, 3);
  const Matrix points = cloud(space, 5, 1);
  PgaConfig bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(frechet_mean(space, points, bad), ConfigError);
  CHECK_THROWS_AS(frechet_mean(space, Matrix(4, 0), PgaConfig{}), EmptyInput);
}

TEST_CASE("log-mapped vectors are tangent at the mean") {
  const SpaceForm space = SpaceForm::hyperbolic(-2.0, 5);
  const Matrix points = cloud(space, 40, 21);
  const FrechetResult res = frechet_mean(space, points);
  for (Index i = 0; i < points.cols(); ++i) {
    const Vector v = space.log_map(res.mean, points.col(i));
    CHECK(std::abs(space.metric(v, res.mean)) < 1e-8 * (1.0 + v.norm()));
  }
}

TEST_CASE("pga recovers noiseless planted subspaces") {
  for (const SpaceForm& space :
       {SpaceForm::spherical(1.0, 6), SpaceForm::hyperbolic(-1.0, 6)}) {
    SplitMix64 rng(17);
    const AffineSubspace sub = random_subspace(space, 2, rng);
    const Matrix points = noisy_points(sub, 80, 0.0, rng);
    const PcaModel model = fit_pga(space, points);
    CHECK(cost(model, 2, points) < 1e-8);
  }
}

TEST_CASE("pga with K = 0 is just the frechet mean") {
  const SpaceForm space = SpaceForm::hyperbolic(-1.0, 4);
  const Matrix points = cloud(space, 30, 23);
  const PcaModel model = fit_pga(space, points);
  const FrechetResult res = frechet_mean(space, points);
  CHECK((model.base - res.mean).norm() == 0.0);
  const AffineSubspace sub = model.subspace(0);
  CHECK(sub.subspace_dim() == 0);
}

TEST_CASE("pga components form a valid nested model") {
  const SpaceForm space = SpaceForm::spherical(1.0, 5);
  const Matrix points = cloud(space, 50, 29);
  const PcaModel model = fit_pga(space, points);
  CHECK(model.method == "pga");
  // Components tangent at the base and mutually orthogonal: the subspace
  // constructor validates this at tolerance.
  for (int k = 1; k <= 5; ++k)
    CHECK_NOTHROW(AffineSubspace(space, model.base,
                                 model.components.leftCols(k),
                                 /*validate=*/true));
  // Eigenvalues descending.
  for (Index i = 0; i + 1 < model.component_eigenvalues.size(); ++i)
    CHECK(model.component_eigenvalues[i] >=
          model.component_eigenvalues[i + 1] - 1e-15);
}

TEST_CASE("the closed-form fit never loses to pga under the proper cost") {
  for (const SpaceForm& space :
       {SpaceForm::spherical(1.0, 5), SpaceForm::hyperbolic(-1.0, 5)}) {
    for (std::uint64_t seed : {31u, 37u, 41u}) {
      const Matrix points = cloud(space, 60, seed, 0.8);
      const PcaModel closed = fit(space, points);
      const PcaModel pga = fit_pga(space, points);
      for (int k = 0; k <= 5; ++k)
        CHECK(cost(closed, k, points) <= cost(pga, k, points) + 1e-10);
    }
  }
}
