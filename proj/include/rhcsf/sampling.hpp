#pragma once

#include "rhcsf/core.hpp"

namespace rhcsf {

/// Largest dimension covered by the built-in direction-number table.
inline constexpr int kSobolMaxDim = 32;

/// First `n` points of the unscrambled Sobol sequence in [0,1)^dim.
///
/// Joe-Kuo direction numbers; points are returned in natural index order
/// (point i is the XOR of the direction numbers selected by the bits of i),
/// starting at the origin.
[[nodiscard]] Matrix sobol(int dim, Eigen::Index n);

/// Target points the design criterion pulls the regressors towards.
struct SupportingSet {
  Matrix points;  // N_psi x p, inside the region of interest

  [[nodiscard]] Eigen::Index size() const noexcept { return points.rows(); }
  [[nodiscard]] int dim() const noexcept { return static_cast<int>(points.cols()); }
};

/// Sobol points affinely mapped into `region_of_interest`.
[[nodiscard]] SupportingSet supporting_set(const Region& region_of_interest, Eigen::Index n_psi);

/// Five supporting points per designed sample.
[[nodiscard]] constexpr Eigen::Index default_supporting_count(Eigen::Index signal_length) { return 5 * signal_length; }

/// Map unit-cube points into `region`.
[[nodiscard]] Matrix rescale_unit_points(const Matrix& unit_points, const Region& region);

}  // namespace rhcsf
