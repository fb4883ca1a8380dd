#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sfpca/errors.hpp"
#include "sfpca/pca.hpp"

namespace sfpca {

/// Cumulative normalized component energy of a hyperbolic spectrum over the
/// normalized dimension x = (K-1)/D, together with its crossing of the
/// y = 1 - x line. Energy concentrated in few components pushes the knee
/// toward x = 0, the signature of an outlier direction in the data.
struct SpectrumCurve {
  Vector normalized_dims;  // x grid, (K-1)/D for K = 1..D+1
  Vector retained;         // nondecreasing, 0 at x=0 and 1 at x=1
  double knee_x = 0.0;
  bool degenerate_energy = false;  // all component eigenvalues at zero
};

/// Component energy below this fraction of the base eigenvalue is treated
/// as zero: coincident points leave only eigensolver and ridge residue in
/// the component spectrum.
inline constexpr double kDegenerateEnergyTol = 1e-9;

/// Fraction of component eigenvalue mass captured by the leading K-1
/// components (the first eigenvalue belongs to the base point, so K = 1
/// retains nothing). Zero total energy yields 1 and flags the curve.
inline double retained_energy(const PcaModel& model, int k) {
  if (model.space.spherical())
    throw ConfigError("retained_energy: defined for hyperbolic models");
  const Index d = model.component_eigenvalues.size();
  if (k < 1 || k > d + 1)
    throw DimensionMismatch("retained_energy: K out of range");
  double total = 0.0;
  double top = 0.0;
  for (Index i = 0; i < d; ++i) {
    const double lam = std::max(model.component_eigenvalues[i], 0.0);
    total += lam;
    if (i < k - 1) top += lam;
  }
  if (total <= kDegenerateEnergyTol * std::max(1.0, model.base_eigenvalue))
    return 1.0;
  return top / total;
}

/// Piecewise-linear crossing of the retained-energy curve with y = 1 - x.
/// The curve is nondecreasing and the line decreasing, so the crossing
/// always exists and is unique.
inline double knee_point(const SpectrumCurve& curve) {
  const Index n = curve.normalized_dims.size();
  double prev_gap = curve.retained[0] - (1.0 - curve.normalized_dims[0]);
  if (prev_gap >= 0.0) return curve.normalized_dims[0];
  for (Index i = 1; i < n; ++i) {
    const double gap = curve.retained[i] - (1.0 - curve.normalized_dims[i]);
    if (gap >= 0.0) {
      const double t = -prev_gap / (gap - prev_gap);
      return curve.normalized_dims[i - 1] +
             t * (curve.normalized_dims[i] - curve.normalized_dims[i - 1]);
    }
    prev_gap = gap;
  }
  return curve.normalized_dims[n - 1];
}

inline SpectrumCurve spectrum_curve(const PcaModel& model) {
  const Index d = model.component_eigenvalues.size();
  SpectrumCurve curve;
  curve.normalized_dims.resize(d + 1);
  curve.retained.resize(d + 1);
  double total = 0.0;
  for (Index i = 0; i < d; ++i)
    total += std::max(model.component_eigenvalues[i], 0.0);
  curve.degenerate_energy =
      total <= kDegenerateEnergyTol * std::max(1.0, model.base_eigenvalue);
  for (Index k = 1; k <= d + 1; ++k) {
    curve.normalized_dims[k - 1] =
        static_cast<double>(k - 1) / static_cast<double>(d);
    curve.retained[k - 1] = retained_energy(model, static_cast<int>(k));
  }
  curve.knee_x = knee_point(curve);
  return curve;
}

struct RankedDataset {
  int index = 0;       // position in the input list
  double knee_x = 0.0;
  bool failed = false;  // fit failed; ranked after all successes
  std::string error;
};

/// Sorts datasets by ascending knee point: energy concentrated in few
/// components (small knee) ranks first, which is the outlier-suspect end.
/// Failed fits are ranked last and flagged. The sort is stable, so
/// identical datasets keep their input order.
inline std::vector<RankedDataset> rank_datasets(
    const SpaceForm& space, const std::vector<Matrix>& datasets) {
  std::vector<RankedDataset> ranked(datasets.size());
  for (size_t i = 0; i < datasets.size(); ++i) {
    ranked[i].index = static_cast<int>(i);
    try {
      const PcaModel model = fit_hyperbolic(space, datasets[i]);
      ranked[i].knee_x = spectrum_curve(model).knee_x;
    } catch (const std::exception& e) {
      ranked[i].failed = true;
      ranked[i].error = e.what();
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedDataset& a, const RankedDataset& b) {
                     if (a.failed != b.failed) return !a.failed;
                     if (a.failed) return false;
                     return a.knee_x < b.knee_x;
                   });
  return ranked;
}

}  // namespace sfpca
