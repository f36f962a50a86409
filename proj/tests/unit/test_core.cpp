#include "rhcsf/core.hpp"

#include <doctest.h>

using namespace rhcsf;

TEST_CASE("narx config dimension and validation") {
  CHECK(NarxConfig{1, 1, 1, 1.0}.regressor_dim() == 2);
  CHECK(NarxConfig{2, 1, 3, 0.5}.regressor_dim() == 9);
  CHECK_THROWS_AS(NarxConfig({0, 1, 1, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(NarxConfig({1, 1, 0, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(NarxConfig({1, 1, 1, 0.0}).validate(), ConfigError);
}

TEST_CASE("region") {
  const Region r(Vector::Constant(2, -1.0), Vector::Constant(2, 2.0));
  CHECK(r.contains(Vector::Constant(2, -1.0)));
  CHECK(r.contains(Vector::Constant(2, 2.0)));
  CHECK(r.contains((Vector(2) << -1.0, 2.0).finished()));
  CHECK_FALSE(r.contains((Vector(2) << 2.0 + 1e-12, 0.0).finished()));
  CHECK_FALSE(r.contains(Vector::Zero(3)));
  CHECK_THROWS_AS(Region(Vector::Constant(1, 1.0), Vector::Constant(1, 1.0)), ConfigError);

  Vector v(2);
  v << -5.0, 0.5;
  r.project(v);
  CHECK(v[0] == -1.0);
  CHECK(v[1] == 0.5);

  const Region c = Region::unit(1).concat(r);
  CHECK(c.dim() == 3);
  CHECK(c.upper()[0] == 1.0);
  CHECK(c.lower()[2] == -1.0);
}

TEST_CASE("unit scaling maps box corners onto the unit cube") {
  const Region r((Vector(2) << -1.0, 10.0).finished(), (Vector(2) << 3.0, 20.0).finished());
  const UnitScaling s(r);
  CHECK(s.apply(r.lower()).isApprox(Vector::Zero(2)));
  CHECK(s.apply(r.upper()).isApprox(Vector::Ones(2)));
  CHECK(s.apply(r.center()).isApprox(Vector::Constant(2, 0.5)));
  Matrix pts(2, 2);
  pts << -1.0, 20.0, 1.0, 15.0;
  const Matrix u = s.apply(pts);
  CHECK(u(0, 0) == 0.0);
  CHECK(u(0, 1) == 1.0);
  CHECK(u(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("build_regressors: first row is the initial state") {
  const NarxConfig cfg{1, 1, 1, 1.0};
  Dataset d;
  d.inputs = Matrix::Constant(1, 1, 0.4);
  d.outputs = Matrix::Constant(1, 1, 0.5);
  InitialState init{(Vector(2) << 0.0, 0.5).finished()};
  const Matrix x = build_regressors(cfg, d, init);
  REQUIRE(x.rows() == 1);
  CHECK(x(0, 0) == 0.0);
  CHECK(x(0, 1) == 0.5);

  d.inputs(0, 0) = 0.123;
  d.outputs(0, 0) = 0.456;
  init.x0 << 0.7, 0.9;
  const Matrix x2 = build_regressors(cfg, d, init);
  CHECK(x2(0, 0) == 0.7);
  CHECK(x2(0, 1) == 0.9);
}

TEST_CASE("build_regressors: second-order lag pattern") {
  const NarxConfig cfg{1, 1, 2, 1.0};
  Dataset d;
  d.inputs.resize(3, 1);
  d.inputs << 0.1, 0.2, 0.3;
  d.outputs.resize(3, 1);
  d.outputs << 0.4, 0.5, 0.6;
  // x0 = [u(0), u(-1), y(0), y(-1)]
  const InitialState init{(Vector(4) << 0.01, 0.02, 0.03, 0.04).finished()};
  const Matrix x = build_regressors(cfg, d, init);
  REQUIRE(x.rows() == 3);
  CHECK(x.row(0) == init.x0.transpose());
  CHECK(x.row(1) == (Vector(4) << 0.1, 0.01, 0.4, 0.03).finished().transpose());
  CHECK(x.row(2) == (Vector(4) << 0.2, 0.1, 0.5, 0.4).finished().transpose());
}

TEST_CASE("build_regressors: channel-major then lag-major ordering") {
  const NarxConfig cfg{2, 1, 2, 1.0};
  Dataset d;
  d.inputs.resize(3, 2);
  d.inputs << 1, 10, 2, 20, 3, 30;
  d.outputs.resize(3, 1);
  d.outputs << 100, 200, 300;
  const InitialState init = InitialState::constant(cfg, -1.0);
  const Matrix x = build_regressors(cfg, d, init);
  // row 3: [u1(2) u1(1) | u2(2) u2(1) | y(2) y(1)]
  CHECK(x.row(2) == (Vector(6) << 2, 1, 20, 10, 200, 100).finished().transpose());
  CHECK(x.row(1) == (Vector(6) << 1, -1, 10, -1, 100, -1).finished().transpose());
}

TEST_CASE("regressor_space pairs each input with its own output") {
  const NarxConfig cfg{1, 1, 1, 1.0};
  Dataset d;
  d.inputs.resize(3, 1);
  d.inputs << 0.1, 0.2, 0.3;
  d.outputs.resize(3, 1);
  d.outputs << 0.4, 0.5, 0.6;
  const Matrix x = regressor_space(cfg, d, InitialState::constant(cfg, 0.0));
  REQUIRE(x.rows() == 3);
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(x(j, 0) == d.inputs(j, 0));
    CHECK(x(j, 1) == d.outputs(j, 0));
  }
}

TEST_CASE("appending a sample appends exactly one regressor row") {
  const NarxConfig cfg{1, 2, 2, 1.0};
  Dataset d;
  d.inputs = Matrix::Zero(0, 1);
  d.outputs = Matrix::Zero(0, 2);
  const InitialState init = InitialState::constant(cfg, 0.3);
  Matrix previous;
  for (int k = 0; k < 6; ++k) {
    d.append(Vector::Constant(1, 0.1 * k), (Vector(2) << k, -k).finished());
    const Matrix x = build_regressors(cfg, d, init);
    CHECK(x.rows() == k + 1);
    if (k > 0) CHECK(x.topRows(k) == previous);
    previous = x;
  }
}

TEST_CASE("dimension mismatches are configuration errors") {
  const NarxConfig cfg{1, 1, 1, 1.0};
  Dataset d;
  d.inputs = Matrix::Zero(2, 1);
  d.outputs = Matrix::Zero(3, 1);
  CHECK_THROWS_AS((void)build_regressors(cfg, d, InitialState::constant(cfg, 0.0)), ConfigError);
  d.outputs = Matrix::Zero(2, 2);
  CHECK_THROWS_AS((void)build_regressors(cfg, d, InitialState::constant(cfg, 0.0)), ConfigError);
  d.outputs = Matrix::Zero(2, 1);
  CHECK_THROWS_AS((void)build_regressors(cfg, d, InitialState{Vector::Zero(3)}), ConfigError);
  d.inputs = Matrix::Zero(0, 1);
  d.outputs = Matrix::Zero(0, 1);
  CHECK_THROWS_AS((void)build_regressors(cfg, d, InitialState::constant(cfg, 0.0)), ConfigError);
}

TEST_CASE("vstack") {
  Matrix a(1, 2), b(2, 2);
  a << 1, 2;
  b << 3, 4, 5, 6;
  const Matrix s = vstack(a, b);
  CHECK(s.rows() == 3);
  CHECK(s(2, 1) == 6);
  CHECK(vstack(Matrix(0, 2), b) == b);
}
