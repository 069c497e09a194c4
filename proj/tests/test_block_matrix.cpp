#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "longsync/block_matrix.hpp"
#include "longsync/rng.hpp"
#include "longsync/rotation.hpp"

using namespace longsync;

namespace {

BlockMatrix random_observation(int n, int d, std::uint64_t seed) {
  auto rng = make_rng(seed);
  BlockMatrix r(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Rotation rot = haar_sample(rng, d);
      r.block(i, j) = rot.matrix();
      r.block(j, i) = rot.matrix().transpose();
    }
  return r;
}

WeightMatrix ones_offdiag(int n) {
  WeightMatrix w = WeightMatrix::Ones(n, n);
  w.diagonal().setZero();
  return w;
}

}  // namespace

TEST_CASE("lift hadamard scales blocks") {
  const int n = 4, d = 3;
  BlockMatrix r = random_observation(n, d, 1);
  for (int i = 0; i < n; ++i) r.block(i, i) = Eigen::MatrixXd::Identity(d, d);

  BlockMatrix lifted = lift_hadamard(ones_offdiag(n), r);
  for (int i = 0; i < n; ++i) {
    CHECK(lifted.block(i, i).norm() == 0.0);
    for (int j = 0; j < n; ++j)
      if (i != j) CHECK((lifted.block(i, j) - r.block(i, j)).norm() == 0.0);
  }

  CHECK(lift_hadamard(WeightMatrix::Zero(n, n), r).dense().norm() == 0.0);

  WeightMatrix w = WeightMatrix::Zero(n, n);
  w(1, 2) = 0.5;
  BlockMatrix scaled = lift_hadamard(w, r);
  CHECK((scaled.block(1, 2) - 0.5 * r.block(1, 2)).norm() == 0.0);
  CHECK_THROWS_AS(lift_hadamard(WeightMatrix::Zero(3, 3), r), std::invalid_argument);
}

TEST_CASE("block inner product") {
  const int n = 3, d = 3;
  BlockMatrix x(n, d), y(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      x.block(i, j) = Eigen::MatrixXd::Identity(d, d);
      y.block(i, j) = Eigen::MatrixXd::Identity(d, d);
    }
  CHECK((block_inner(x, y).array() == 3.0).all());

  // a rotation by pi has trace -1, so its inner product with identity is -1
  y.block(0, 1) = Rotation::axis_angle(Eigen::Vector3d::UnitZ(), M_PI).matrix();
  CHECK(block_inner(x, y)(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));

  y.block(0, 2).setZero();
  CHECK(block_inner(x, y)(0, 2) == 0.0);

  BlockMatrix z = random_observation(n, d, 3);
  const WeightMatrix self = block_inner(z, z);
  CHECK((self.array() >= 0.0).all());
  BlockMatrix z2 = BlockMatrix::wrap(n, d, (2.0 * z.dense()).eval());
  CHECK((block_inner(z2, z) - 2.0 * self).norm() < 1e-12);
}

TEST_CASE("block power on a triangle expands as expected") {
  const int n = 3, d = 3;
  auto rng = make_rng(5);
  WeightMatrix w = WeightMatrix::Zero(n, n);
  w(0, 1) = w(1, 0) = 0.3;
  w(0, 2) = w(2, 0) = 0.7;
  w(1, 2) = w(2, 1) = 0.5;
  BlockMatrix r = random_observation(n, d, 6);
  BlockMatrix p = lift_hadamard(w, r);

  CHECK((block_power(p, 1).dense() - p.dense()).norm() == 0.0);
  BlockMatrix p2 = block_power(p, 2);
  // only walk 0 -> 2 -> 1 contributes to block (0,1)
  Eigen::MatrixXd expect = (w(0, 2) * w(2, 1)) * (r.block(0, 2) * r.block(2, 1));
  CHECK((p2.block(0, 1) - expect).norm() < 1e-12);
  // diagonal block (i,i) collects all back-and-forth walks
  Eigen::MatrixXd diag0 = (w(0, 1) * w(1, 0)) * (r.block(0, 1) * r.block(1, 0)) +
                          (w(0, 2) * w(2, 0)) * (r.block(0, 2) * r.block(2, 0));
  CHECK((p2.block(0, 0) - diag0).norm() < 1e-12);
  CHECK_THROWS_AS(block_power(p, 0), std::invalid_argument);
  (void)rng;
}

TEST_CASE("block power equals the walk enumeration oracle") {
  const int n = 5, d = 2;
  auto rng = make_rng(8);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  WeightMatrix w = WeightMatrix::Zero(n, n);
  BlockMatrix r(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (unif(rng) < 0.3) continue;
      w(i, j) = w(j, i) = unif(rng);
      const Rotation rot = haar_sample(rng, d);
      r.block(i, j) = rot.matrix();
      r.block(j, i) = rot.matrix().transpose();
    }
  const BlockMatrix p = lift_hadamard(w, r);
  for (int k = 2; k <= 4; ++k) {
    const BlockMatrix pk = block_power(p, k);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        // direct sum over all length-k walks (repeats allowed)
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
        std::vector<int> walk(static_cast<size_t>(k) + 1);
        walk[0] = i;
        auto rec = [&](auto&& self, int pos) -> void {
          if (pos == k) {
            if (walk[static_cast<size_t>(k)] != j) return;
            double wt = 1.0;
            Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(d, d);
            for (int s = 0; s < k; ++s) {
              wt *= w(walk[s], walk[s + 1]);
              if (wt == 0.0) return;
              prod = prod * r.block(walk[s], walk[s + 1]);
            }
            acc += wt * prod;
            return;
          }
          for (int v = 0; v < n; ++v) {
            walk[static_cast<size_t>(pos) + 1] = v;
            self(self, pos + 1);
          }
        };
        rec(rec, 0);
        CHECK((pk.block(i, j) - acc).norm() < 1e-10);
      }
    }
  }
}

TEST_CASE("diagonal extraction") {
  WeightMatrix j4 = ones_offdiag(4);
  const WeightMatrix sq = j4 * j4;  // (J - I)^2 has diagonal n - 1 = 3
  const WeightMatrix d = diag_extract(sq);
  for (int i = 0; i < 4; ++i) CHECK(d(i, i) == doctest::Approx(3.0));
  CHECK(d.sum() == doctest::Approx(12.0));
  CHECK(diag_extract(WeightMatrix::Zero(3, 3)).norm() == 0.0);
  WeightMatrix diag = Eigen::Vector3d(1, 2, 3).asDiagonal();
  CHECK((diag_extract(diag) - diag).norm() == 0.0);
}

TEST_CASE("block diagonal extraction") {
  const int n = 3, d = 3;
  BlockMatrix x = random_observation(n, d, 9);
  for (int i = 0; i < n; ++i) x.block(i, i) = Eigen::MatrixXd::Identity(d, d);
  const BlockMatrix dx = block_diag_extract(x);
  for (int i = 0; i < n; ++i) {
    CHECK((dx.block(i, i) - x.block(i, i)).norm() == 0.0);
    for (int j = 0; j < n; ++j)
      if (i != j) CHECK(dx.block(i, j).norm() == 0.0);
  }

  // diagonal block of P^2 on a triangle, checked by hand expansion
  WeightMatrix w = ones_offdiag(3) * 0.5;
  const BlockMatrix p = lift_hadamard(w, x);
  const BlockMatrix p2d = block_diag_extract(block_power(p, 2));
  Eigen::MatrixXd expect = 0.25 * (x.block(1, 0) * x.block(0, 1)) +
                           0.25 * (x.block(1, 2) * x.block(2, 1));
  CHECK((p2d.block(1, 1) - expect).norm() < 1e-12);
}

TEST_CASE("hadamard family") {
  WeightMatrix a = WeightMatrix::Random(4, 4).cwiseAbs();
  CHECK((hadamard_mul(a, WeightMatrix::Ones(4, 4)) - a).norm() == 0.0);
  WeightMatrix twos = 2.0 * WeightMatrix::Ones(4, 4);
  CHECK((hadamard_div(twos, twos) - WeightMatrix::Ones(4, 4)).norm() == 0.0);
  WeightMatrix indicator = (a.array() > 0.5).cast<double>().matrix();
  CHECK((hadamard_pow(indicator, 3.0) - indicator).norm() == 0.0);

  // 0/0 yields zero and is recorded; x/0 with x != 0 is an error
  WeightMatrix num = WeightMatrix::Zero(2, 2), den = WeightMatrix::Zero(2, 2);
  num(0, 0) = 1.0;
  den(0, 0) = 2.0;
  std::vector<std::pair<int, int>> mask;
  const WeightMatrix q = hadamard_div(num, den, &mask);
  CHECK(q(0, 0) == doctest::Approx(0.5));
  CHECK(q(1, 1) == 0.0);
  CHECK(mask.size() == 3);
  num(0, 1) = 1.0;
  CHECK_THROWS_AS(hadamard_div(num, den), std::domain_error);

  BlockMatrix b(2, 2);
  b.block(0, 1) << 1.0, 2.0, 3.0, 4.0;
  const BlockMatrix b3 = hadamard_pow(b, 3.0);
  CHECK(b3.block(0, 1)(1, 1) == doctest::Approx(64.0));
  const BlockMatrix bb = hadamard_mul(b, b);
  CHECK(bb.block(0, 1)(1, 0) == doctest::Approx(9.0));
}
