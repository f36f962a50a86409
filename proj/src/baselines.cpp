#include "rhcsf/baselines.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace rhcsf {

Matrix aprbs(const AprbsConfig& config, double sample_time) {
  require(config.length >= 1, "APRBS length must be >= 1");
  require(sample_time > 0.0, "sample time must be positive");
  require(config.min_hold_time >= sample_time, "minimum holding time must be at least one sample");
  const int channels = config.region.dim();
  require(channels >= 1, "APRBS needs an input region");

  // guard against ratios like 3.0000000000000004 rounding up to an extra sample
  const auto hold = static_cast<Eigen::Index>(std::ceil(config.min_hold_time / sample_time - 1e-9));
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<Eigen::Index> segment(hold, 3 * hold);

  Matrix u(config.length, channels);
  Eigen::Index t = 0;
  while (t < config.length) {
    const Eigen::Index len = segment(rng);
    for (int c = 0; c < channels; ++c) {
      const double level =
          std::uniform_real_distribution<double>(config.region.lower()[c], config.region.upper()[c])(rng);
      for (Eigen::Index i = t; i < std::min(t + len, config.length); ++i) u(i, c) = level;
    }
    t += len;
  }
  return u;
}

Matrix multisine(Eigen::Index length, int n_harmonics, const Region& region, std::uint64_t seed) {
  require(length >= 2, "multisine length must be >= 2");
  require(n_harmonics >= 1 && 2 * static_cast<Eigen::Index>(n_harmonics) <= length,
          "multisine needs 1 <= n_harmonics <= N/2");
  const int channels = region.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  Matrix u(length, channels);
  for (int c = 0; c < channels; ++c) {
    Vector s = Vector::Zero(length);
    for (int h = 1; h <= n_harmonics; ++h) {
      const double phi = phase(rng);
      for (Eigen::Index t = 0; t < length; ++t)
        s[t] += std::cos(2.0 * std::numbers::pi * h * static_cast<double>(t) / static_cast<double>(length) + phi);
    }
    const double lo = s.minCoeff();
    const double hi = s.maxCoeff();
    const double a = region.lower()[c];
    const double b = region.upper()[c];
    for (Eigen::Index t = 0; t < length; ++t) u(t, c) = a + (s[t] - lo) / (hi - lo) * (b - a);
    // exact endpoints despite rounding in the affine map
    Eigen::Index imin = 0;
    Eigen::Index imax = 0;
    s.minCoeff(&imin);
    s.maxCoeff(&imax);
    u(imin, c) = a;
    u(imax, c) = b;
  }
  return u;
}

}  // namespace rhcsf
