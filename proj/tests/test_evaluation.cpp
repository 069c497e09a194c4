#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "longsync/evaluation.hpp"
#include "longsync/rng.hpp"

using namespace longsync;

namespace {
std::vector<Rotation> random_truth(int n, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::vector<Rotation> t;
  for (int i = 0; i < n; ++i) t.push_back(haar_sample(rng));
  return t;
}
}  // namespace

TEST_CASE("a common offset is recovered exactly") {
  const auto truth = random_truth(15, 1);
  auto rng = make_rng(2);
  const Rotation q = haar_sample(rng);
  std::vector<Rotation> est;
  for (const auto& t : truth)
    est.push_back(Rotation::unchecked(t.matrix() * q.matrix()));
  const Rotation r_align = align(est, truth);
  const ErrorSummary summary = error_summary(est, truth, r_align);
  CHECK(summary.mean_deg < 1e-5);
  CHECK(summary.median_deg < 1e-5);
  CHECK(summary.n_evaluated == 15);
}

TEST_CASE("single node aligns exactly") {
  const auto truth = random_truth(1, 3);
  auto rng = make_rng(4);
  const Rotation q = haar_sample(rng);
  std::vector<Rotation> est{Rotation::unchecked(truth[0].matrix() * q.matrix())};
  const ErrorSummary summary = error_summary(est, truth, align(est, truth));
  CHECK(summary.mean_deg < 1e-5);
}

TEST_CASE("alignment is robust to a single outlier") {
  const auto truth = random_truth(21, 5);
  auto rng = make_rng(6);
  const Rotation q = haar_sample(rng);
  std::vector<Rotation> est;
  for (int i = 0; i < 20; ++i)
    est.push_back(Rotation::unchecked(truth[i].matrix() * q.matrix()));
  est.push_back(haar_sample(rng));  // outlier
  const Rotation r_align = align(est, truth);
  CHECK(geodesic_angle(r_align, q.inverse()) < 1e-6);
}

TEST_CASE("two offset populations produce a well-defined median") {
  const auto truth = random_truth(20, 7);
  const Rotation offset = Rotation::axis_angle(Eigen::Vector3d::UnitZ(), M_PI / 2);
  std::vector<Rotation> est;
  for (int i = 0; i < 20; ++i) {
    est.push_back(i < 10 ? truth[i]
                         : Rotation::unchecked(truth[i].matrix() * offset.matrix()));
  }
  const Rotation r_align = align(est, truth);
  const ErrorSummary summary = error_summary(est, truth, r_align);
  CHECK(summary.n_evaluated == 20);
  CHECK(std::isfinite(summary.median_deg));
  CHECK(summary.mean_deg > 0.0);
  // every node errs by either the residual offset or its complement
  for (double deg : summary.per_node_deg) CHECK(deg <= 90.0 + 1e-6);
}

TEST_CASE("an antipodal node reports 180 degrees") {
  const auto truth = random_truth(9, 8);
  std::vector<Rotation> est = truth;
  est[4] = Rotation::unchecked(
      truth[4].matrix() * Rotation::axis_angle(Eigen::Vector3d::UnitX(), M_PI).matrix());
  const Rotation r_align = align(est, truth);
  const ErrorSummary summary = error_summary(est, truth, r_align);
  double worst = 0.0;
  for (double deg : summary.per_node_deg) worst = std::max(worst, deg);
  CHECK(worst == doctest::Approx(180.0).epsilon(1e-4));
}

TEST_CASE("error summary is gauge invariant") {
  const auto truth = random_truth(12, 9);
  auto rng = make_rng(10);
  std::vector<Rotation> est;
  for (const auto& t : truth) {
    const Rotation wiggle =
        Rotation::axis_angle(Eigen::Vector3d::Random(), 0.05);
    est.push_back(Rotation::unchecked(wiggle.matrix() * t.matrix()));
  }
  const ErrorSummary base = error_summary(est, truth, align(est, truth));
  const Rotation q = haar_sample(rng);
  std::vector<Rotation> rotated;
  for (const auto& e : est)
    rotated.push_back(Rotation::unchecked(e.matrix() * q.matrix()));
  const ErrorSummary moved = error_summary(rotated, truth, align(rotated, truth));
  CHECK(std::abs(base.mean_deg - moved.mean_deg) < 1e-8);
  CHECK(std::abs(base.median_deg - moved.median_deg) < 1e-8);
}

TEST_CASE("degrees conversion") {
  const auto truth = random_truth(1, 11);
  const double theta = 0.731;
  std::vector<Rotation> est{Rotation::unchecked(
      truth[0].matrix() * Rotation::axis_angle(Eigen::Vector3d::UnitY(), theta).matrix())};
  const ErrorSummary summary = error_summary(est, truth, Rotation::identity(3));
  CHECK(summary.per_node_deg[0] == doctest::Approx(theta * 180.0 / M_PI).epsilon(1e-10));
}

TEST_CASE("masks select the evaluated nodes") {
  const auto truth = random_truth(6, 12);
  std::vector<Rotation> est = truth;
  auto rng = make_rng(15);
  est[5] = haar_sample(rng);
  std::vector<bool> mask(6, true);
  mask[5] = false;
  const ErrorSummary summary = error_summary(est, truth, align(est, truth, mask), mask);
  CHECK(summary.n_evaluated == 5);
  CHECK(summary.mean_deg < 1e-5);
  CHECK_THROWS_AS(align(est, truth, std::vector<bool>(6, false)), std::invalid_argument);
}

TEST_CASE("alignment objective is non-increasing") {
  const auto truth = random_truth(10, 13);
  auto rng = make_rng(14);
  std::vector<Rotation> est;
  for (const auto& t : truth) {
    est.push_back(Rotation::unchecked(
        haar_sample(rng).matrix() * t.matrix()));
  }
  const Rotation q = align(est, truth);
  // the refined alignment cannot be worse than the plain polar solution
  auto objective = [&](const Rotation& r) {
    double s = 0.0;
    for (size_t i = 0; i < est.size(); ++i)
      s += (est[i].matrix() * r.matrix() - truth[i].matrix()).norm();
    return s;
  };
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  for (size_t i = 0; i < est.size(); ++i)
    m += est[i].matrix().transpose() * truth[i].matrix();
  CHECK(objective(q) <= objective(project_to_rotation(m)) + 1e-9);
}
