#include "rhcsf/sampling.hpp"

#include <doctest.h>

using namespace rhcsf;

namespace {

// scipy.stats.qmc.Sobol(d=5, scramble=False).random(16); scipy emits the
// points in Gray-code order, so its point i is natural-order point i ^ (i >> 1).
const double kScipyD5[16][5] = {
    {0.0, 0.0, 0.0, 0.0, 0.0},
    {0.5, 0.5, 0.5, 0.5, 0.5},
    {0.75, 0.25, 0.25, 0.25, 0.75},
    {0.25, 0.75, 0.75, 0.75, 0.25},
    {0.375, 0.375, 0.625, 0.875, 0.375},
    {0.875, 0.875, 0.125, 0.375, 0.875},
    {0.625, 0.125, 0.875, 0.625, 0.625},
    {0.125, 0.625, 0.375, 0.125, 0.125},
    {0.1875, 0.3125, 0.9375, 0.4375, 0.5625},
    {0.6875, 0.8125, 0.4375, 0.9375, 0.0625},
    {0.9375, 0.0625, 0.6875, 0.1875, 0.3125},
    {0.4375, 0.5625, 0.1875, 0.6875, 0.8125},
    {0.3125, 0.1875, 0.3125, 0.5625, 0.9375},
    {0.8125, 0.6875, 0.8125, 0.0625, 0.4375},
    {0.5625, 0.4375, 0.0625, 0.8125, 0.1875},
    {0.0625, 0.9375, 0.5625, 0.3125, 0.6875},
};

// same generator, d=32, scipy points 37 and 63
const double kScipyD32_37[32] = {0.921875, 0.640625, 0.578125, 0.921875, 0.765625, 0.296875, 0.171875, 0.796875,
                                 0.609375, 0.171875, 0.015625, 0.078125, 0.578125, 0.859375, 0.109375, 0.484375,
                                 0.796875, 0.421875, 0.046875, 0.140625, 0.953125, 0.078125, 0.546875, 0.640625,
                                 0.296875, 0.359375, 0.796875, 0.390625, 0.515625, 0.109375, 0.359375, 0.140625};
const double kScipyD32_63[32] = {0.015625, 0.796875, 0.359375, 0.453125, 0.859375, 0.140625, 0.578125, 0.140625,
                                 0.828125, 0.578125, 0.421875, 0.671875, 0.546875, 0.765625, 0.328125, 0.765625,
                                 0.078125, 0.390625, 0.953125, 0.234375, 0.234375, 0.546875, 0.390625, 0.546875,
                                 0.953125, 0.640625, 0.203125, 0.296875, 0.296875, 0.453125, 0.015625, 0.921875};

Eigen::Index gray(Eigen::Index i) { return i ^ (i >> 1); }

}  // namespace

TEST_CASE("sobol: first points in natural order") {
  const Matrix s = sobol(2, 4);
  const double expected[4][2] = {{0.0, 0.0}, {0.5, 0.5}, {0.25, 0.75}, {0.75, 0.25}};
  for (int i = 0; i < 4; ++i)
    for (int d = 0; d < 2; ++d) CHECK(s(i, d) == expected[i][d]);
}

TEST_CASE("sobol: agrees with the Gray-code ordered reference") {
  const Matrix s = sobol(5, 16);
  for (Eigen::Index i = 0; i < 16; ++i)
    for (int d = 0; d < 5; ++d) CHECK(s(gray(i), d) == kScipyD5[i][d]);

  const Matrix s32 = sobol(32, 64);
  for (int d = 0; d < 32; ++d) {
    CHECK(s32(gray(37), d) == kScipyD32_37[d]);
    CHECK(s32(gray(63), d) == kScipyD32_63[d]);
  }
}

TEST_CASE("sobol: each dyadic block is a permutation of the grid") {
  // first 2^k points of every one-dimensional projection are exactly {0, 1/2^k, ...}
  const Matrix s = sobol(8, 256);
  for (int d = 0; d < 8; ++d) {
    std::vector<double> col(s.col(d).data(), s.col(d).data() + 256);
    std::vector<double> copy(256);
    for (Eigen::Index i = 0; i < 256; ++i) copy[static_cast<std::size_t>(i)] = s(i, d);
    std::sort(copy.begin(), copy.end());
    for (int i = 0; i < 256; ++i) CHECK(copy[static_cast<std::size_t>(i)] == i / 256.0);
  }
}

TEST_CASE("sobol: limits") {
  CHECK_THROWS_AS((void)sobol(0, 4), ConfigError);
  CHECK_THROWS_AS((void)sobol(kSobolMaxDim + 1, 4), ConfigError);
  CHECK_THROWS_AS((void)sobol(3, 0), ConfigError);
}

TEST_CASE("supporting set lies inside the region of interest") {
  const Region c((Vector(2) << 0.2, -1.0).finished(), (Vector(2) << 0.4, 3.0).finished());
  const SupportingSet psi = supporting_set(c, 100);
  CHECK(psi.size() == 100);
  CHECK(psi.dim() == 2);
  for (Eigen::Index i = 0; i < psi.size(); ++i) CHECK(c.contains(psi.points.row(i)));
  // affine image of the unit-cube sequence
  const Matrix u = sobol(2, 100);
  CHECK(psi.points(7, 1) == doctest::Approx(-1.0 + 4.0 * u(7, 1)).epsilon(1e-15));
  CHECK_THROWS_AS((void)supporting_set(c, 0), ConfigError);
}

TEST_CASE("default supporting count is five per signal sample") {
  static_assert(default_supporting_count(300) == 1500);
  CHECK(default_supporting_count(1) == 5);
}
