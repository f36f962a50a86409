#pragma once

#include "rhcsf/core.hpp"

#include <random>

namespace testutil {

inline rhcsf::Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double lo = 0.0,
                                   double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  rhcsf::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)}); }

// worst relative error of two vectors, scaled by the larger norm
inline double rel_err(const rhcsf::Vector& a, const rhcsf::Vector& b) {
  const double scale = std::max({1e-8, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace testutil
