#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "optbench/metrics.hpp"

using namespace optbench;

TEST_CASE("recorder folds best-so-far") {
  TrajectoryRecorder up(MetricDirection::higher_better);
  up.record(1, 0.3);
  up.record(2, 0.5);
  up.record(3, 0.2);
  CHECK(up.trajectory().values == std::vector<double>{0.3, 0.5, 0.5});

  TrajectoryRecorder down(MetricDirection::lower_better);
  down.record(1, 2.0);
  down.record(2, 3.0);
  down.record(3, 1.5);
  CHECK(down.trajectory().values == std::vector<double>{2.0, 2.0, 1.5});

  TrajectoryRecorder gap(MetricDirection::higher_better);
  gap.record(1, 0.1);
  CHECK_THROWS(gap.record(3, 0.2));  // skipped epoch 2
  CHECK_THROWS(gap.record(1, 0.2));  // replayed epoch
}

TEST_CASE("cpe weights") {
  auto w3 = cpe_weights(3);
  REQUIRE(w3.size() == 3);
  CHECK(w3[0] == doctest::Approx(3.0 / 6.0));
  CHECK(w3[1] == doctest::Approx(2.0 / 6.0));
  CHECK(w3[2] == doctest::Approx(1.0 / 6.0));
  for (int T : {1, 2, 5, 100}) {
    auto w = cpe_weights(T);
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] < w[i - 1]);
  }
  CHECK_THROWS(cpe_weights(0));
}

TEST_CASE("cpe examples") {
  Trajectory t;
  t.values = {1.0, 2.0, 3.0};
  CHECK(cpe(t) == doctest::Approx(10.0 / 6.0).epsilon(1e-12));

  Trajectory c;
  c.values = {0.7, 0.7, 0.7, 0.7};
  CHECK(cpe(c) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(peak(c) == 0.7);

  Trajectory one;
  one.values = {0.42};
  CHECK(cpe(one) == doctest::Approx(0.42));
  CHECK(peak(one) == 0.42);

  CHECK(peak(t) == 3.0);
  Trajectory empty;
  CHECK_THROWS(cpe(empty));
  CHECK_THROWS(peak(empty));
}

TEST_CASE("cpe is bounded by the peak on nondecreasing trajectories") {
  Trajectory t;
  t.direction = MetricDirection::higher_better;
  t.values = {0.1, 0.4, 0.4, 0.6, 0.9};
  CHECK(cpe(t) <= peak(t));
}

TEST_CASE("performance ratios") {
  SUBCASE("reference fixture: two optimizers, one task") {
    ProfileTable table;
    table.optimizers = {"lars", "adam"};
    table.tasks = {"cifar100"};
    table.task_direction = {MetricDirection::higher_better};
    table.cpe = {{67.48, 65.88}};
    auto r = perf_ratios(table);
    REQUIRE(r.size() == 1);
    CHECK(r[0][0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r[0][1] - 1.0243) < 1e-4);
  }

  SUBCASE("lower-better task") {
    ProfileTable table;
    table.optimizers = {"a", "b"};
    table.tasks = {"quad"};
    table.task_direction = {MetricDirection::lower_better};
    table.cpe = {{0.1, 0.2}};
    auto r = perf_ratios(table);
    CHECK(r[0][0] == doctest::Approx(1.0));
    CHECK(r[0][1] == doctest::Approx(2.0));
  }

  SUBCASE("scale invariance") {
    ProfileTable table;
    table.optimizers = {"a", "b", "c"};
    table.tasks = {"t"};
    table.task_direction = {MetricDirection::higher_better};
    table.cpe = {{2.0, 4.0, 8.0}};
    auto r1 = perf_ratios(table);
    for (auto& x : table.cpe[0]) x *= 1000.0;
    auto r2 = perf_ratios(table);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(r1[0][i] == doctest::Approx(r2[0][i]).epsilon(1e-12));
  }

  SUBCASE("nonpositive cpe on a higher-better task is rejected") {
    ProfileTable table;
    table.optimizers = {"a"};
    table.tasks = {"t"};
    table.task_direction = {MetricDirection::higher_better};
    table.cpe = {{0.0}};
    CHECK_THROWS(perf_ratios(table));
  }
}

TEST_CASE("performance profile") {
  // Ratios for one optimizer over two tasks: 1.0 and 1.1.
  std::vector<std::vector<double>> ratios = {{1.0}, {1.1}};
  auto grid = default_tau_grid();
  REQUIRE(grid.size() == 31);
  CHECK(grid.front() == doctest::Approx(1.0));
  CHECK(grid.back() == doctest::Approx(1.3));

  auto rho = perf_profile(ratios, grid);
  REQUIRE(rho.size() == 1);
  REQUIRE(rho[0].size() == grid.size());
  // tau = 1.05 covers half the tasks; beyond the max ratio, everything.
  CHECK(rho[0][5] == doctest::Approx(0.5));
  CHECK(rho[0].back() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < rho[0].size(); ++i)
    CHECK(rho[0][i] >= rho[0][i - 1]);
}

TEST_CASE("mean and stddev") {
  std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  CHECK(mean(v) == doctest::Approx(2.5));
  CHECK(stddev(v) == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-12));
  CHECK(stddev({7.0}) == 0.0);
  CHECK(mean({}) == 0.0);
}

TEST_CASE("kendall tau") {
  CHECK(kendall_tau({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(kendall_tau({1, 2, 3, 4}, {40, 30, 20, 10}) == doctest::Approx(-1.0));
  // One discordant pair out of six: tau = (5 - 1) / 6.
  CHECK(kendall_tau({1, 2, 3, 4}, {1, 2, 4, 3}) ==
        doctest::Approx(4.0 / 6.0));
  CHECK_THROWS(kendall_tau({1, 2}, {1}));
}
