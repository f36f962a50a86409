#pragma once

#include "rhcsf/core.hpp"

#include <cstdint>

namespace rhcsf {

struct AprbsConfig {
  Eigen::Index length = 300;
  double min_hold_time = 1.0;  // seconds
  Region region;               // input box
  std::uint64_t seed = 0;
};

/// Amplitude-modulated pseudo-random binary signal.
///
/// Levels are i.i.d. uniform over the input box; each level is held for a
/// number of samples drawn uniformly from {h, ..., 3h}, h = ceil(T_H / T_s).
/// The final segment is truncated at the signal length.
[[nodiscard]] Matrix aprbs(const AprbsConfig& config, double sample_time);

/// Flat-amplitude random-phase multisine over harmonics 1..n_harmonics of the
/// N-sample period, affinely rescaled per channel to span the input box exactly.
[[nodiscard]] Matrix multisine(Eigen::Index length, int n_harmonics, const Region& region, std::uint64_t seed);

}  // namespace rhcsf
