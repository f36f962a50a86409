#include "rhcsf/criterion.hpp"

#include <cmath>
#include <limits>

namespace rhcsf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double squared_distance(const double* a, const double* b, Eigen::Index p) {
  double s = 0.0;
  for (Eigen::Index d = 0; d < p; ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

}  // namespace

NnCache::NnCache(Eigen::Index n_psi) : distances_(Vector::Constant(n_psi, kInf)) {
  require(n_psi >= 1, "cache needs at least one supporting point");
}

double NnCache::total() const { return count_ == 0 ? kInf : distances_.sum(); }

void NnCache::commit(const Vector& row, const Matrix& psi) {
  require(psi.rows() == distances_.size(), "cache size does not match the supporting set");
  require(row.size() == psi.cols(), "row dimension does not match the supporting set");
  const Eigen::Index p = psi.cols();
  for (Eigen::Index j = 0; j < psi.rows(); ++j) {
    const double d = std::sqrt(squared_distance(row.data(), psi.row(j).data(), p));
    if (d < distances_[j]) distances_[j] = d;
  }
  ++count_;
}

NnCache cache_commit(NnCache cache, const Vector& row, const Matrix& psi) {
  cache.commit(row, psi);
  return cache;
}

double criterion_value(const Matrix& regressors, const Matrix& psi) {
  require(regressors.rows() >= 1, "criterion needs at least one regressor row");
  require(psi.rows() >= 1, "criterion needs at least one supporting point");
  require(regressors.cols() == psi.cols(), "regressor and supporting set dimensions differ");
  double total = 0.0;
  for (Eigen::Index j = 0; j < psi.rows(); ++j) {
    double best = kInf;
    for (Eigen::Index i = 0; i < regressors.rows(); ++i)
      best = std::min(best, (regressors.row(i) - psi.row(j)).norm());
    total += best;
  }
  return total;
}

double criterion_value(const Matrix& horizon_rows, const Matrix& psi, const NnCache& cache) {
  return criterion_terms(horizon_rows, psi, cache, false).value;
}

CriterionTerms criterion_terms(const Matrix& horizon_rows, const Matrix& psi, const NnCache& cache,
                               bool with_gradient) {
  const Eigen::Index rows = horizon_rows.rows();
  const Eigen::Index p = psi.cols();
  require(psi.rows() >= 1, "criterion needs at least one supporting point");
  require(cache.size() == psi.rows(), "cache size does not match the supporting set");
  require(rows >= 1 || cache.committed_count() > 0, "criterion needs at least one regressor row");
  require(rows == 0 || horizon_rows.cols() == p, "regressor and supporting set dimensions differ");

  CriterionTerms terms;
  terms.nearest.assign(static_cast<std::size_t>(psi.rows()), -1);
  if (with_gradient) terms.row_gradient = Matrix::Zero(rows, p);

  const Vector& committed = cache.distances();
  double total = 0.0;
  for (Eigen::Index j = 0; j < psi.rows(); ++j) {
    const double* target = psi.row(j).data();
    const double cached = committed[j];
    double best_sq = cached == kInf ? kInf : cached * cached;
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double d = squared_distance(horizon_rows.row(i).data(), target, p);
      if (d < best_sq) {
        best_sq = d;
        best = i;
      }
    }
    // committed winners keep the cached value so the sum matches the brute-force loop exactly
    const double dist = best < 0 ? cached : std::sqrt(best_sq);
    total += dist;
    terms.nearest[static_cast<std::size_t>(j)] = best;
    if (with_gradient && best >= 0 && dist > 0.0)
      terms.row_gradient.row(best) += (horizon_rows.row(best) - psi.row(j)) / dist;
  }
  terms.value = total;
  return terms;
}

Vector chain_row_gradient(const Matrix& row_gradient, const std::vector<Matrix>& row_jacobians) {
  require(static_cast<std::size_t>(row_gradient.rows()) == row_jacobians.size(), "one Jacobian per row expected");
  require(!row_jacobians.empty(), "no rows to chain");
  Vector grad = Vector::Zero(row_jacobians.front().cols());
  for (Eigen::Index i = 0; i < row_gradient.rows(); ++i)
    grad.noalias() += row_jacobians[static_cast<std::size_t>(i)].transpose() * row_gradient.row(i).transpose();
  return grad;
}

}  // namespace rhcsf
