#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "longsync/cycle_forms.hpp"
#include "longsync/rng.hpp"
#include "longsync/rotation.hpp"

using namespace longsync;

namespace {

WeightMatrix complete_weights(int n) {
  WeightMatrix w = WeightMatrix::Ones(n, n);
  w.diagonal().setZero();
  return w;
}

BlockMatrix observation(const WeightMatrix& w, std::uint64_t seed, bool identity = false) {
  const int n = static_cast<int>(w.rows());
  auto rng = make_rng(seed);
  BlockMatrix r(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (w(i, j) == 0.0) continue;
      const Eigen::MatrixXd m =
          identity ? Eigen::MatrixXd::Identity(3, 3) : haar_sample(rng).matrix();
      r.block(i, j) = m;
      r.block(j, i) = m.transpose();
    }
  return r;
}

}  // namespace

TEST_CASE("complete-graph counts for c = 3, 4, 5") {
  for (auto [n, c, count] : {std::tuple{3, 3, 1.0}, {4, 4, 2.0}, {5, 5, 6.0}}) {
    const WeightMatrix w = complete_weights(n);
    const BlockMatrix r = observation(w, 17);
    const CycleFormResult closed = f_g_closed_form(w, r, c);
    const CycleFormResult brute = f_g_bruteforce(w, r, c, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        CHECK(closed.f(i, j) == doctest::Approx(count).epsilon(1e-10));
        CHECK(brute.f(i, j) == doctest::Approx(count).epsilon(1e-12));
      }
  }
}

TEST_CASE("identity rotations give g = f * I") {
  const WeightMatrix w = complete_weights(6);
  const BlockMatrix r = observation(w, 0, /*identity=*/true);
  for (int c : {3, 4, 5, 6}) {
    const CycleFormResult res = f_g_closed_form(w, r, c);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        if (i == j) continue;
        CHECK((res.g.block(i, j) - res.f(i, j) * Eigen::MatrixXd::Identity(3, 3)).norm() <
              1e-9);
      }
  }
}

TEST_CASE("bipartite graphs have no odd cycles and K22 has one 4-cycle per edge") {
  // parts {0,1} and {2,3}
  WeightMatrix w = WeightMatrix::Zero(4, 4);
  for (int i : {0, 1})
    for (int j : {2, 3}) w(i, j) = w(j, i) = 1.0;
  const BlockMatrix r = observation(w, 23);
  for (int c : {3, 5}) {
    const CycleFormResult res = f_g_closed_form(w, r, c);
    for (int i : {0, 1})
      for (int j : {2, 3}) CHECK(std::abs(res.f(i, j)) < 1e-12);
  }
  const CycleFormResult res4 = f_g_closed_form(w, r, 4);
  const CycleFormResult brute4 = f_g_bruteforce(w, r, 4, 4);
  for (int i : {0, 1})
    for (int j : {2, 3}) {
      CHECK(res4.f(i, j) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(brute4.f(i, j) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("path graphs carry no cycles") {
  WeightMatrix w = WeightMatrix::Zero(6, 6);
  for (int i = 0; i + 1 < 6; ++i) w(i, i + 1) = w(i + 1, i) = 1.0;
  const BlockMatrix r = observation(w, 29);
  for (int c : {3, 4, 5, 6}) {
    const CycleFormResult res = f_g_closed_form(w, r, c);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        if (w(i, j) > 0) CHECK(std::abs(res.f(i, j)) < 1e-12);
  }
}

TEST_CASE("closed forms match the enumeration oracle on random graphs") {
  const VerifyFormsReport report = verify_forms(2024, 12, 6, 10, {3, 4, 5, 6}, 1e-9);
  for (const auto& entry : report.per_c) {
    INFO("c = ", entry.c);
    CHECK(entry.max_f_error < 1e-9);
    CHECK(entry.max_g_error < 1e-9);
  }
  CHECK(report.all_pass);
}

TEST_CASE("symmetry and norm bound of the results") {
  auto rng = make_rng(31);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = 8;
  WeightMatrix w = WeightMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (unif(rng) < 0.8) w(i, j) = w(j, i) = unif(rng);
  const BlockMatrix r = observation(w, 37);
  for (int c : {3, 4, 5, 6}) {
    const CycleFormResult res = f_g_closed_form(w, r, c);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        CHECK(std::abs(res.f(i, j) - res.f(j, i)) < 1e-10);
        CHECK((res.g.block(j, i) - res.g.block(i, j).transpose()).norm() < 1e-10);
        CHECK(res.f(i, j) >= -1e-10);
        CHECK(res.g.block(i, j).norm() <= std::sqrt(3.0) * res.f(i, j) + 1e-9);
      }
  }
}

TEST_CASE("all-zero weights give identically zero results") {
  const WeightMatrix w = WeightMatrix::Zero(6, 6);
  const BlockMatrix r = observation(complete_weights(6), 41);
  for (int c : {3, 4, 5, 6}) {
    const CycleFormResult res = f_g_closed_form(w, r, c);
    CHECK(res.f.norm() == 0.0);
    CHECK(res.g.dense().norm() == 0.0);
  }
}

TEST_CASE("plain matrix powers count walks, not simple paths, for c >= 4") {
  // negative control: the walk-based variant differs once repeated nodes exist
  const int n = 5;
  const WeightMatrix w = complete_weights(n);
  const BlockMatrix r = observation(w, 43);
  const BlockMatrix p = lift_hadamard(w, r);
  const WeightMatrix walks = w * w * w;
  const CycleFormResult simple = f_g_closed_form(w, r, 4);
  double max_gap_f = 0.0, max_gap_g = 0.0;
  const BlockMatrix p3 = block_power(p, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      max_gap_f = std::max(max_gap_f, std::abs(walks(i, j) - simple.f(i, j)));
      max_gap_g = std::max(max_gap_g, (p3.block(i, j) - simple.g.block(i, j)).norm());
    }
  CHECK(max_gap_f > 0.5);
  CHECK(max_gap_g > 0.5);
}

TEST_CASE("unsupported lengths and oversized instances are rejected") {
  const WeightMatrix w = complete_weights(5);
  const BlockMatrix r = observation(w, 47);
  CHECK_THROWS_AS(f_g_closed_form(w, r, 7), std::invalid_argument);
  CHECK_THROWS_AS(f_g_closed_form(w, r, 2), std::invalid_argument);
  CHECK_THROWS_AS(f_g_bruteforce(w, r, 3, 4), std::invalid_argument);
  CHECK_THROWS_AS(f_g_bruteforce(w, r, 6, 5), std::invalid_argument);
  WeightMatrix asym = w;
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(f_g_closed_form(asym, r, 3), std::invalid_argument);
}

TEST_CASE("operation accounting") {
  CHECK(cycle_form_stats(3).summands_f == 1);
  CHECK(cycle_form_stats(4).summands_f == 4);
  CHECK(cycle_form_stats(5).summands_f == 9);
  CHECK(cycle_form_stats(6).summands_f == 28);
  CHECK(cycle_form_stats(5).summands_g == 10);
  CHECK(cycle_form_stats(6).summands_g == 34);
  CHECK(cycle_form_stats(3).dense_multiplies == 1);
  CHECK(cycle_form_stats(4).dense_multiplies == 2);
  CHECK(cycle_form_stats(6).cubic_kernels == 1);
  CHECK_THROWS_AS(cycle_form_stats(7), std::invalid_argument);
}
