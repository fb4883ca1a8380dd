#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <vector>

#include "sfpca/errors.hpp"
#include "sfpca/types.hpp"

namespace sfpca {

/// Lorentzian inner product [x, y] = x^T J y with J = diag(-1, 1, ..., 1).
inline double j_inner(const Vector& x, const Vector& y) {
  if (x.size() != y.size())
    throw DimensionMismatch("j_inner: vectors have different lengths");
  if (x.size() == 0) throw DimensionMismatch("j_inner: empty vectors");
  return x.dot(y) - 2.0 * x[0] * y[0];
}

/// J x, i.e. x with the time coordinate negated.
inline Vector j_apply(Vector x) {
  x[0] = -x[0];
  return x;
}

inline Matrix j_matrix(Index n) {
  Matrix j = Matrix::Identity(n, n);
  j(0, 0) = -1.0;
  return j;
}

/// J-adjoint J A^T J. An involution; (AB)^adj = B^adj A^adj.
inline Matrix j_adjoint(const Matrix& a) {
  if (a.rows() != a.cols())
    throw DimensionMismatch("j_adjoint: matrix must be square");
  Matrix b = a.transpose();
  b.row(0) *= -1.0;
  b.col(0) *= -1.0;
  return b;
}

/// True iff ||A^T J A - J||_F <= tol * ||J||_F.
inline bool is_j_unitary(const Matrix& a, double tol = 1e-10) {
  if (a.rows() != a.cols())
    throw DimensionMismatch("is_j_unitary: matrix must be square");
  Matrix ja = a;
  ja.row(0) *= -1.0;
  Matrix residual = a.transpose() * ja - j_matrix(a.rows());
  return residual.norm() <= tol * std::sqrt(static_cast<double>(a.rows()));
}

/// Solution of the indefinite eigenproblem A J v = sgn([v,v]) lambda v.
/// Columns of `vectors` are scaled to |[v,v]| = 1 and classified by the sign
/// of their self-product. For a second moment of hyperbolic points there is
/// exactly one negative-sign column and all eigenvalues are nonnegative; the
/// negative column comes first, then positive columns by descending
/// eigenvalue.
struct JEigenDecomposition {
  Vector eigenvalues;
  Matrix vectors;
  Eigen::VectorXi signs;
  bool degenerate = false;  // a repeated eigenvalue block was re-orthogonalized
};

namespace detail {

// Deterministic orientation: first entry of magnitude > 1e-12 made positive.
inline void fix_vector_sign(Vector& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

inline bool lex_less(const Vector& a, const Vector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace detail

/// Decomposes a symmetric matrix via the standard eigenproblem of A*J, then
/// rescales each eigenvector by |[v,v]|^{-1/2}. Eigenvalue realness is
/// asserted, not assumed: imaginary parts above imag_tol raise
/// ComplexSpectrum. Vectors whose self-product falls below degenerate_tol
/// (possible only for rank-deficient input) raise DegenerateNorm. Blocks of
/// repeated eigenvalues of A*J are re-orthogonalized under [.,.] and flagged.
inline JEigenDecomposition j_eigendecompose(const Matrix& a,
                                            double imag_tol = 1e-8,
                                            double degenerate_tol = 1e-10) {
  const Index n = a.rows();
  if (a.cols() != n)
    throw DimensionMismatch("j_eigendecompose: matrix must be square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw Error("j_eigendecompose: input must be symmetric");

  Matrix b = a;
  b.col(0) *= -1.0;  // A * J
  Eigen::EigenSolver<Matrix> solver(b);
  if (solver.info() != Eigen::Success)
    throw Error("j_eigendecompose: eigensolver did not converge");

  std::vector<double> mu(static_cast<size_t>(n));
  std::vector<Vector> vecs(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const std::complex<double> lam = solver.eigenvalues()[i];
    if (std::abs(lam.imag()) > imag_tol * std::max(1.0, std::abs(lam.real()))) {
      std::ostringstream msg;
      msg << "j_eigendecompose: complex eigenvalue " << lam.real() << " + "
          << lam.imag() << "i exceeds tolerance";
      throw ComplexSpectrum(msg.str());
    }
    Vector v = solver.eigenvectors().col(i).real();
    // A real eigenvalue stored with a tiny imaginary part can surface with a
    // complex phase; recover the real direction from whichever part is live.
    if (v.norm() < 1e-3) v = solver.eigenvectors().col(i).imag();
    v.normalize();
    mu[static_cast<size_t>(i)] = lam.real();
    vecs[static_cast<size_t>(i)] = std::move(v);
  }

  // Group by eigenvalue of A*J; re-orthogonalize repeated blocks under [.,.].
  std::vector<size_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t i, size_t j) { return mu[i] < mu[j]; });

  bool degenerate = false;
  size_t start = 0;
  while (start < order.size()) {
    size_t stop = start + 1;
    while (stop < order.size() &&
           std::abs(mu[order[stop]] - mu[order[start]]) <=
               1e-8 * std::max(1.0, std::abs(mu[order[start]]))) {
      ++stop;
    }
    if (stop - start > 1) {
      degenerate = true;
      const bool zero_block =
          std::abs(mu[order[start]]) <= 1e-10 * scale &&
          std::abs(mu[order[stop - 1]]) <= 1e-10 * scale;
      if (zero_block) {
        // Kernel cluster of A*J, which equals J * null(A). The nonsymmetric
        // solver returns near-dependent vectors for large clusters; the
        // symmetric eigenproblem recovers the kernel reliably.
        Eigen::SelfAdjointEigenSolver<Matrix> sym(a);
        if (sym.info() != Eigen::Success)
          throw Error("j_eigendecompose: symmetric kernel solve failed");
        for (size_t k = start; k < stop; ++k) {
          Vector v = sym.eigenvectors().col(static_cast<Index>(k - start));
          v[0] = -v[0];  // J * kernel vector
          mu[order[k]] = 0.0;
          vecs[order[k]] = std::move(v);
        }
      }
      std::vector<Vector> accepted;
      for (size_t k = start; k < stop; ++k) {
        Vector u = vecs[order[k]];
        for (const Vector& w : accepted)
          u -= (j_inner(u, w) / j_inner(w, w)) * w;
        if (u.norm() < 1e-12)
          throw DegenerateNorm(
              "j_eigendecompose: repeated block is numerically defective");
        u.normalize();
        accepted.push_back(u);
        vecs[order[k]] = std::move(u);
      }
    }
    start = stop;
  }

  struct Entry {
    double value;
    int sign;
    Vector vector;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<size_t>(n));
  for (size_t i = 0; i < static_cast<size_t>(n); ++i) {
    const double q = j_inner(vecs[i], vecs[i]);
    if (std::abs(q) < degenerate_tol) {
      std::ostringstream msg;
      msg << "j_eigendecompose: eigenvector with |[v,v]| = " << std::abs(q)
          << " below tolerance (rank-deficient input)";
      throw DegenerateNorm(msg.str());
    }
    const int sign = q > 0.0 ? 1 : -1;
    Vector v = vecs[i] / std::sqrt(std::abs(q));
    detail::fix_vector_sign(v);
    entries.push_back(Entry{sign * mu[i], sign, std::move(v)});
  }

  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.sign != y.sign) return x.sign < y.sign;  // negative-sign first
    if (x.value != y.value) return x.value > y.value;
    return detail::lex_less(x.vector, y.vector);
  });

  JEigenDecomposition dec;
  dec.eigenvalues.resize(n);
  dec.vectors.resize(n, n);
  dec.signs.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Entry& e = entries[static_cast<size_t>(i)];
    dec.eigenvalues[i] = e.value;
    dec.vectors.col(i) = e.vector;
    dec.signs[i] = e.sign;
  }
  dec.degenerate = degenerate;
  return dec;
}

/// Rebuilds V diag(lambda) V^T; inverts j_eigendecompose for full-rank
/// symmetric inputs with distinct absolute eigenvalues.
inline Matrix j_reconstruct(const JEigenDecomposition& dec) {
  return dec.vectors * dec.eigenvalues.asDiagonal() * dec.vectors.transpose();
}

}  // namespace sfpca
