#include "rhcsf/sampling.hpp"

#include <array>
#include <cstdint>

namespace rhcsf {
namespace {

constexpr int kBits = 32;

struct DirectionNumbers {
  int degree;
  std::uint32_t coefficients;
  std::array<std::uint32_t, 8> initial;
};

// new-joe-kuo-6.21201, dimensions 2..32
constexpr std::array<DirectionNumbers, kSobolMaxDim - 1> kTable{{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
    {7, 7, {1, 1, 3, 13, 7, 35, 63}},
    {7, 8, {1, 3, 5, 9, 1, 25, 53}},
    {7, 14, {1, 3, 1, 13, 9, 35, 107}},
    {7, 19, {1, 3, 1, 5, 27, 61, 31}},
    {7, 21, {1, 1, 5, 11, 19, 41, 61}},
    {7, 28, {1, 3, 5, 3, 3, 13, 69}},
    {7, 31, {1, 1, 7, 13, 1, 19, 1}},
    {7, 32, {1, 3, 7, 5, 13, 19, 59}},
    {7, 37, {1, 1, 3, 9, 25, 29, 41}},
    {7, 41, {1, 3, 5, 13, 23, 1, 55}},
    {7, 42, {1, 3, 7, 3, 13, 59, 17}},
}};

std::array<std::uint32_t, kBits> direction_vector(int axis) {
  std::array<std::uint32_t, kBits> v{};
  if (axis == 0) {
    for (int i = 0; i < kBits; ++i) v[i] = std::uint32_t{1} << (kBits - 1 - i);
    return v;
  }
  const auto& row = kTable[axis - 1];
  const int s = row.degree;
  for (int i = 0; i < s && i < kBits; ++i) v[i] = row.initial[i] << (kBits - 1 - i);
  for (int i = s; i < kBits; ++i) {
    v[i] = v[i - s] ^ (v[i - s] >> s);
    for (int k = 1; k < s; ++k)
      if ((row.coefficients >> (s - 1 - k)) & 1u) v[i] ^= v[i - k];
  }
  return v;
}

}  // namespace

Matrix sobol(int dim, Eigen::Index n) {
  require(dim >= 1 && dim <= kSobolMaxDim,
          "sobol dimension must be in [1, " + std::to_string(kSobolMaxDim) + "]");
  require(n >= 1, "sobol point count must be >= 1");
  require(static_cast<unsigned long long>(n) <= (1ull << kBits), "sobol point count exceeds 2^32");

  constexpr double kScale = 1.0 / 4294967296.0;  // 2^-32
  Matrix points(n, dim);
  for (int axis = 0; axis < dim; ++axis) {
    const auto v = direction_vector(axis);
    for (Eigen::Index i = 0; i < n; ++i) {
      std::uint32_t x = 0;
      auto bits = static_cast<std::uint64_t>(i);
      for (int b = 0; bits != 0; ++b, bits >>= 1)
        if (bits & 1u) x ^= v[b];
      points(i, axis) = static_cast<double>(x) * kScale;
    }
  }
  return points;
}

Matrix rescale_unit_points(const Matrix& unit_points, const Region& region) {
  require(unit_points.cols() == region.dim(), "point dimension does not match region");
  Matrix out(unit_points.rows(), unit_points.cols());
  const Vector extent = region.extent();
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index d = 0; d < out.cols(); ++d)
      out(i, d) = region.lower()[d] + unit_points(i, d) * extent[d];
  return out;
}

SupportingSet supporting_set(const Region& region_of_interest, Eigen::Index n_psi) {
  require(n_psi >= 1, "supporting set needs at least one point");
  return {rescale_unit_points(sobol(region_of_interest.dim(), n_psi), region_of_interest)};
}

}  // namespace rhcsf
