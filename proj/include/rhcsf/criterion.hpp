#pragma once

#include "rhcsf/core.hpp"

#include <vector>

namespace rhcsf {

/// Nearest-neighbor distance of every supporting point to the committed
/// regressor rows. Distances start at +inf and only decrease.
class NnCache {
 public:
  NnCache() = default;
  explicit NnCache(Eigen::Index n_psi);

  [[nodiscard]] const Vector& distances() const noexcept { return distances_; }
  [[nodiscard]] Eigen::Index committed_count() const noexcept { return count_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return distances_.size(); }

  /// Criterion over the committed rows alone (+inf before the first commit).
  [[nodiscard]] double total() const;

  /// Fold one committed row into the cache.
  void commit(const Vector& row, const Matrix& psi);

 private:
  Vector distances_;
  Eigen::Index count_ = 0;
};

/// Functional form of NnCache::commit.
[[nodiscard]] NnCache cache_commit(NnCache cache, const Vector& row, const Matrix& psi);

/// Sum over supporting points of the distance to the nearest regressor row,
/// by direct double loop over all rows.
[[nodiscard]] double criterion_value(const Matrix& regressors, const Matrix& psi);

/// Same criterion where the committed rows are summarized by `cache` and
/// `horizon_rows` holds only the rows still being optimized.
[[nodiscard]] double criterion_value(const Matrix& horizon_rows, const Matrix& psi, const NnCache& cache);

/// Criterion value with the derivative with respect to each horizon row.
struct CriterionTerms {
  double value = 0.0;
  Matrix row_gradient;                // L x p
  std::vector<Eigen::Index> nearest;  // per supporting point; -1 means a committed row
};

/// Ties go to the lowest row index, so committed rows win ties against the
/// horizon. Supporting points sitting exactly on their nearest row contribute
/// zero gradient.
[[nodiscard]] CriterionTerms criterion_terms(const Matrix& horizon_rows, const Matrix& psi, const NnCache& cache,
                                             bool with_gradient);

/// Chain the per-row gradient through the row Jacobians (p x V each) to get dJ/d(candidate), length V.
[[nodiscard]] Vector chain_row_gradient(const Matrix& row_gradient, const std::vector<Matrix>& row_jacobians);

}  // namespace rhcsf
