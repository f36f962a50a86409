#pragma once

#include "rhcsf/core.hpp"

#include <vector>

namespace rhcsf {

/// Probe points for the empty-ball radius; Sobol points inside the region of interest.
struct EvaluationSet {
  Matrix points;  // N_E x p
};

inline constexpr Eigen::Index kDefaultEvaluationPoints = 10000;
inline constexpr int kDefaultBinsPerAxis = 10;

[[nodiscard]] EvaluationSet evaluation_set(const Region& region_of_interest,
                                           Eigen::Index n_points = kDefaultEvaluationPoints);

/// Radius of the largest empty ball: max over probes of the distance to the nearest design point.
[[nodiscard]] double largest_ball_radius(const Matrix& design, const EvaluationSet& eval_set);

/// R(k) for k = 1..N over the first k design rows, in one incremental pass.
[[nodiscard]] std::vector<double> radius_progress(const Matrix& design, const EvaluationSet& eval_set);

/// Histogram of the design over a regular grid on the region next to the uniform reference.
struct HistogramPair {
  int bins_per_axis = 0;
  Vector data_mass;
  Vector uniform_mass;
};

/// Points outside the region are clipped into the boundary cells.
[[nodiscard]] HistogramPair histogram_pair(const Matrix& design, const Region& region, int bins_per_axis);

/// Base-2 Jensen-Shannon divergence of two discrete distributions; in [0, 1].
[[nodiscard]] double jensen_shannon(const Vector& p, const Vector& q);

/// JSD between the binned design and the uniform distribution over the region.
[[nodiscard]] double jsd_to_uniform(const Matrix& design, const Region& region, int bins_per_axis = kDefaultBinsPerAxis);

/// JSD of the first k rows for k = 1..N.
[[nodiscard]] std::vector<double> jsd_progress(const Matrix& design, const Region& region,
                                               int bins_per_axis = kDefaultBinsPerAxis);

}  // namespace rhcsf
