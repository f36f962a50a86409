#include <Eigen/Dense>
#include "rhcsf/process.hpp"
#include "rhcsf/surrogate.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace rhcsf;
using testutil::random_matrix;
using testutil::rel_err;

namespace {

const NarxConfig kSiso{1, 1, 1, 1.0};

LtiSurrogate benchmark_lti(double gain = 1.0) { return LtiSurrogate(lti_from_time_constant(5.0, gain, 1.0), kSiso); }

// Hammerstein regressors x = (u, y) on a grid with the true next output.
void hammerstein_grid(int n, Matrix& x, Matrix& y) {
  x.resize(n * n, 2);
  y.resize(n * n, 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Eigen::Index r = i * n + j;
      x(r, 0) = (i + 0.5) / n;
      x(r, 1) = (j + 0.5) / n;
      y(r, 0) = hammerstein_step(x(r, 0), x(r, 1));
    }
}

Matrix fd_jacobian(const Surrogate& s, const Vector& x, double h) {
  Matrix j(s.config().n_y, x.size());
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    Vector a = x, b = x;
    a[d] += h;
    b[d] -= h;
    j.col(d) = (s.predict(a) - s.predict(b)) / (2.0 * h);
  }
  return j;
}

Matrix flat_rows(const Matrix& rows) { return Eigen::Map<const Vector>(rows.data(), rows.size()); }

}  // namespace

TEST_CASE("forward-Euler discretization") {
  const LtiFirstOrder a = lti_from_time_constant(5.0, 1.0, 1.0);
  CHECK(a.a == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(a.b == doctest::Approx(0.2).epsilon(1e-15));
  const LtiFirstOrder b = lti_from_time_constant(5.0, 2.0, 1.0);
  CHECK(b.a == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(b.b == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(b.b / (1.0 - b.a) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS((void)lti_from_time_constant(1.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS((void)lti_from_time_constant(0.5, 1.0, 1.0), ConfigError);
}

TEST_CASE("LTI step response from rest matches K(1 - a^k)") {
  for (double gain : {1.0, 2.5}) {
    const LtiSurrogate s = benchmark_lti(gain);
    const Matrix y = predict_outputs(s, Matrix::Ones(50, 1), InitialState{(Vector(2) << 1.0, 0.0).finished()});
    for (Eigen::Index k = 0; k < 50; ++k)
      CHECK(std::abs(y(k, 0) - gain * (1.0 - std::pow(0.8, static_cast<double>(k + 1)))) <= 1e-12);
  }
}

TEST_CASE("LTI surrogate matches the plant's linear part") {
  const LtiSurrogate s = benchmark_lti();
  const Vector x = (Vector(2) << 0.3, 0.6).finished();
  CHECK(s.predict(x)[0] == doctest::Approx(0.2 * 0.3 + 0.8 * 0.6).epsilon(1e-15));
  const Matrix j = s.jacobian(x);
  CHECK(j(0, 0) == doctest::Approx(0.2));
  CHECK(j(0, 1) == doctest::Approx(0.8));
  CHECK_FALSE(s.trainable());
  CHECK(s.to_json()["a"].get<double>() == doctest::Approx(0.8));
}

TEST_CASE("rollout: two-step linear recursion") {
  const LtiSurrogate s = benchmark_lti();
  const InitialState rest{Vector::Zero(2)};
  const Matrix rows = rollout(s, Matrix(0, 1), Matrix::Ones(2, 1), rest);
  REQUIRE(rows.rows() == 2);
  CHECK(rows(0, 0) == 1.0);
  CHECK(rows(0, 1) == 0.0);
  CHECK(rows(1, 0) == 1.0);
  CHECK(rows(1, 1) == doctest::Approx(0.2).epsilon(1e-15));
  const HorizonRollout h = rollout_jacobian(s, Matrix(0, 1), Matrix::Ones(2, 1), rest);
  CHECK(h.outputs(2, 0) == doctest::Approx(0.36).epsilon(1e-15));
}

TEST_CASE("rollout: shapes and equilibrium") {
  const LtiSurrogate s = benchmark_lti();
  const InitialState mid = InitialState::constant(kSiso, 0.5);
  const Matrix committed = Matrix::Constant(4, 1, 0.5);
  const Matrix rows = rollout(s, committed, Matrix::Constant(3, 1, 0.5), mid);
  CHECK(rows.rows() == 4 + 3);
  CHECK((rows.array() - 0.5).abs().maxCoeff() < 1e-15);
  CHECK(rollout(s, committed, Matrix::Constant(1, 1, 0.2), mid).rows() == 5);
  CHECK_THROWS_AS((void)rollout(s, committed, Matrix(0, 1), mid), ConfigError);
  CHECK_THROWS_AS((void)rollout(s, committed, Matrix::Zero(2, 2), mid), ConfigError);
}

TEST_CASE("rollout: committed rows reuse the free-run predictions") {
  std::mt19937_64 rng(3);
  const LtiSurrogate s = benchmark_lti();
  const InitialState init = InitialState::constant(kSiso, 0.5);
  const Matrix u = random_matrix(rng, 9, 1);
  const Matrix all = rollout(s, u.topRows(6), u.bottomRows(3), init);
  // same signal replayed as one predicted dataset
  Dataset d{u, predict_outputs(s, u, init).topRows(9), Origin::predicted};
  CHECK((all - regressor_space(kSiso, d, init)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("LTI rollout Jacobian closed form") {
  const LtiSurrogate s = benchmark_lti();
  const InitialState init = InitialState::constant(kSiso, 0.1);
  const Matrix cand = (Matrix(3, 1) << 0.2, 0.9, 0.4).finished();
  const HorizonRollout h = rollout_jacobian(s, Matrix::Constant(2, 1, 0.3), cand, init);
  REQUIRE(h.output_jacobians.size() == 3);
  CHECK(h.output_jacobians[0](0, 0) == doctest::Approx(0.2));
  CHECK(h.output_jacobians[1](0, 0) == doctest::Approx(0.16));
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      // yhat(k+1+j) depends on u(k+i) through b a^(j-i)
      const double expected = i <= j ? 0.2 * std::pow(0.8, j - i) : 0.0;
      CHECK(h.output_jacobians[static_cast<std::size_t>(j)](0, i) == doctest::Approx(expected).epsilon(1e-14));
    }
  // row x(k+1+i) = (u(k+i), y(k+i)): input column is a unit selector
  CHECK(h.row_jacobians[1](0, 1) == 1.0);
  CHECK(h.row_jacobians[1](0, 0) == 0.0);
  CHECK(h.row_jacobians[0](1, 0) == 0.0);  // y(k) is already fixed
  CHECK(h.row_jacobians[1](1, 0) == doctest::Approx(0.2));
}

TEST_CASE("LOLIMOT with one model equals ordinary least squares") {
  std::mt19937_64 rng(11);
  const Matrix x = random_matrix(rng, 40, 2);
  SUBCASE("noise-free y = 2u + 1") {
    Matrix y(40, 1);
    for (Eigen::Index i = 0; i < 40; ++i) y(i, 0) = 2.0 * x(i, 0) + 1.0;
    const Lolimot m = lolimot_fit(x, y, kSiso, Region::unit(2), {1, 1.0 / 3.0, 1e-8, true});
    REQUIRE(m.size() == 1);
    const Matrix& th = m.models()[0].params;
    CHECK(std::abs(th(0, 0) - 1.0) < 1e-9);
    CHECK(std::abs(th(1, 0) - 2.0) < 1e-9);
    CHECK(std::abs(th(2, 0)) < 1e-9);
  }
  SUBCASE("noisy targets against the normal equations") {
    Matrix y = random_matrix(rng, 40, 1);
    const Lolimot m = lolimot_fit(x, y, kSiso, Region::unit(2), {1, 1.0 / 3.0, 1e-8, true});
    Matrix a(40, 3);
    a.col(0).setOnes();
    a.rightCols(2) = x;
    const Matrix ata = a.transpose() * a;
    const Vector ols = ata.llt().solve(a.transpose() * y);
    CHECK(rel_err(Vector(m.models()[0].params.col(0)), ols) < 1e-9);
    // globally affine prediction
    const Vector p0 = m.predict(Vector::Zero(2));
    const Vector p1 = m.predict((Vector(2) << 0.5, 0.0).finished());
    const Vector p2 = m.predict((Vector(2) << 1.0, 0.0).finished());
    CHECK(std::abs((p2 - p1)[0] - (p1 - p0)[0]) < 1e-12);
  }
}

TEST_CASE("LOLIMOT validity functions are normalized") {
  Matrix x, y;
  hammerstein_grid(12, x, y);
  const Lolimot m = lolimot_fit(x, y, kSiso, Region::unit(2), {8, 1.0 / 3.0, 1e-8, true});
  CHECK(m.size() > 1);
  std::mt19937_64 rng(5);
  const Matrix probes = random_matrix(rng, 200, 2, -0.5, 1.5);
  for (Eigen::Index i = 0; i < probes.rows(); ++i) {
    const Vector phi = m.validity(probes.row(i).transpose());
    CHECK(std::abs(phi.sum() - 1.0) < 1e-12);
    CHECK(phi.minCoeff() >= 0.0);
  }
}

TEST_CASE("LOLIMOT training error does not increase with splits") {
  Matrix x, y;
  hammerstein_grid(15, x, y);
  const Lolimot m = lolimot_fit(x, y, kSiso, Region::unit(2), {8, 1.0 / 3.0, 1e-8, true});
  REQUIRE(m.rmse_history.size() == m.size());
  for (std::size_t i = 1; i < m.rmse_history.size(); ++i) CHECK(m.rmse_history[i] <= m.rmse_history[i - 1]);
  CHECK(m.rmse_history.back() < m.rmse_history.front());
  // the partitions tile the domain
  double volume = 0.0;
  for (const auto& lm : m.models()) volume += (lm.upper - lm.lower).prod();
  CHECK(volume == doctest::Approx(1.0));
}

TEST_CASE("LOLIMOT Jacobian matches central differences") {
  Matrix x, y;
  hammerstein_grid(12, x, y);
  std::mt19937_64 rng(8);
  for (bool exact : {true, false}) {
    const Lolimot m = lolimot_fit(x, y, kSiso, Region::unit(2), {6, 1.0 / 3.0, 1e-8, exact});
    int checked = 0;
    for (int probe = 0; probe < 100; ++probe) {
      const Vector p = random_matrix(rng, 2, 1).col(0);
      const Matrix fd = fd_jacobian(m, p, 1e-6);
      const Matrix an = m.jacobian(p);
      if (exact) {
        CHECK(rel_err(Vector(Eigen::Map<const Vector>(an.data(), an.size())),
                      Vector(Eigen::Map<const Vector>(fd.data(), fd.size()))) <= 1e-5);
        ++checked;
      } else {
        // frozen weights: exact only where one validity function dominates
        const Vector phi = m.validity(p);
        if (phi.maxCoeff() > 1.0 - 1e-12) {
          CHECK(rel_err(Vector(Eigen::Map<const Vector>(an.data(), an.size())),
                        Vector(Eigen::Map<const Vector>(fd.data(), fd.size()))) <= 1e-5);
        }
      }
    }
    if (exact) CHECK(checked == 100);
  }
}

TEST_CASE("rollout Jacobian matches central differences") {
  Matrix gx, gy;
  hammerstein_grid(12, gx, gy);
  const Lolimot lolimot = lolimot_fit(gx, gy, kSiso, Region::unit(2), {6, 1.0 / 3.0, 1e-8, true});
  const LtiSurrogate lti = benchmark_lti();
  std::mt19937_64 rng(21);
  const InitialState init = InitialState::constant(kSiso, 0.5);
  for (const Surrogate* s : {static_cast<const Surrogate*>(&lti), static_cast<const Surrogate*>(&lolimot)}) {
    for (int probe = 0; probe < 50; ++probe) {
      const Matrix committed = random_matrix(rng, probe % 5, 1);
      const Matrix cand = random_matrix(rng, 1 + probe % 6, 1, 0.05, 0.95);
      const HorizonRollout h = rollout_jacobian(*s, committed, cand, init);
      const Eigen::Index nc = committed.rows();
      const double step = 1e-6;
      for (Eigen::Index v = 0; v < cand.rows(); ++v) {
        Matrix a = cand, b = cand;
        a(v, 0) += step;
        b(v, 0) -= step;
        const Matrix ra = rollout(*s, committed, a, init).bottomRows(cand.rows());
        const Matrix rb = rollout(*s, committed, b, init).bottomRows(cand.rows());
        const Matrix fd = (ra - rb) / (2.0 * step);
        Matrix an(cand.rows(), 2);
        for (Eigen::Index i = 0; i < cand.rows(); ++i) an.row(i) = h.row_jacobians[static_cast<std::size_t>(i)].col(v).transpose();
        CHECK(rel_err(Vector(flat_rows(an)), Vector(flat_rows(fd))) <= 1e-5);
      }
      (void)nc;
    }
  }
}

TEST_CASE("lolimot_update: deterministic refit and local improvement") {
  const Plant plant = hammerstein_plant(1.0);
  const InitialState init = InitialState::constant(kSiso, 0.5);
  // data confined to low inputs
  std::mt19937_64 rng(4);
  const Matrix u_low = random_matrix(rng, 60, 1, 0.0, 0.4);
  const Dataset low = simulate(plant, u_low, init);
  const Lolimot first = lolimot_fit(low, kSiso, init, Region::unit(2), {6, 1.0 / 3.0, 1e-8, true});
  const Lolimot same = lolimot_update(first, low, init);
  REQUIRE(same.size() == first.size());
  for (std::size_t i = 0; i < same.size(); ++i) CHECK(same.models()[i].params == first.models()[i].params);

  Matrix u_all(120, 1);
  u_all << u_low, random_matrix(rng, 60, 1, 0.6, 1.0);
  const Dataset more = simulate(plant, u_all, init);
  const Lolimot second = lolimot_update(first, more, init);

  // held-out grid in the newly explored corner of the input range
  double err_first = 0.0, err_second = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const Vector x = (Vector(2) << 0.6 + 0.04 * i + 0.02, 0.1 + 0.08 * j).finished();
      const double truth = hammerstein_step(x[0], x[1]);
      err_first += std::pow(first.predict(x)[0] - truth, 2);
      err_second += std::pow(second.predict(x)[0] - truth, 2);
    }
  CHECK(err_second < err_first);
  CHECK_THROWS_AS((void)lolimot_update(first, Dataset{Matrix(0, 1), Matrix(0, 1), Origin::measured}, init), ConfigError);
}

TEST_CASE("LOLIMOT rejects too few samples") {
  CHECK_THROWS_AS((void)lolimot_fit(Matrix::Zero(2, 2), Matrix::Zero(2, 1), kSiso, Region::unit(2)), ConfigError);
}
