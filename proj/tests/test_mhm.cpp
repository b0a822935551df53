#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "podeval/mhm.hpp"
#include "podeval/rng.hpp"

using namespace podeval;

namespace {

probability_trace on_grid_trace(const time_grid& g, const auto& f, const char* id = "e") {
  probability_trace tr;
  tr.event_id = id;
  for (int j = 0; j < g.size(); ++j) tr.samples.push_back({g.at(j), f(g.at(j))});
  return tr;
}

double sigmoid(double b0, double b1, double t) { return 1.0 / (1.0 + std::exp(-(b0 + b1 * t))); }

grid_spec grid_of(const averaged_trace& avg, int count = 256) {
  return {avg.samples.front().t, avg.samples.back().t, count};
}

}  // namespace

TEST_CASE("trace validation") {
  probability_trace bad_p{"e", {{-1.0, 1.2}}};
  CHECK_THROWS_AS(bad_p.validate(), bad_domain);
  probability_trace not_increasing{"e", {{-1.0, 0.5}, {-1.0, 0.5}}};
  CHECK_THROWS_AS(not_increasing.validate(), bad_domain);
  probability_trace ok{"e", {{-1.0, 0.5}, {-0.5, 0.7}}};
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("default grid matches the recording protocol") {
  time_grid g;
  CHECK(g.size() == 141);
  CHECK(g.at(0) == doctest::Approx(-7.0));
  CHECK(g.at(140) == doctest::Approx(0.0));
}

TEST_CASE("averaging a single on-grid trace is the identity") {
  time_grid g;
  const auto tr = on_grid_trace(g, [](double t) { return sigmoid(3.0, 1.0, t); });
  const auto avg = average_traces({tr}, g);
  CHECK(avg.n_events == 1);
  REQUIRE(avg.samples.size() == static_cast<std::size_t>(g.size()));
  for (int j = 0; j < g.size(); ++j)
    CHECK(avg.samples[j].p == doctest::Approx(tr.samples[j].p).epsilon(1e-15));
}

TEST_CASE("two flat traces average to the midpoint") {
  time_grid g;
  const auto lo = on_grid_trace(g, [](double) { return 0.2; }, "lo");
  const auto hi = on_grid_trace(g, [](double) { return 0.8; }, "hi");
  const auto avg = average_traces({lo, hi}, g);
  CHECK(avg.n_events == 2);
  for (const auto& s : avg.samples) CHECK(s.p == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("averaging matches an independent re-summation") {
  time_grid g;
  std::vector<probability_trace> traces;
  for (int k = 0; k < 3; ++k)
    traces.push_back(
        on_grid_trace(g, [k](double t) { return sigmoid(2.0 + k, 0.8 + 0.2 * k, t); }));
  const auto avg = average_traces(traces, g);
  for (int j = 0; j < g.size(); ++j) {
    double s = 0.0;
    for (const auto& tr : traces) s += tr.samples[j].p;
    CHECK(avg.samples[j].p == doctest::Approx(s / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("short traces are skipped and reported") {
  time_grid g;
  probability_trace part{"short", {}};
  for (double t = -2.0; t <= 0.0; t += 0.05) part.samples.push_back({t, 0.5});
  const auto full = on_grid_trace(g, [](double) { return 0.4; }, "full");

  std::vector<std::string> skipped;
  const auto avg = average_traces({part, full}, g, &skipped);
  CHECK(avg.n_events == 1);
  REQUIRE(skipped.size() == 1);
  CHECK(skipped[0] == "short");
  for (const auto& s : avg.samples) CHECK(s.p == doctest::Approx(0.4));

  CHECK_THROWS_AS(average_traces({part}, g), empty_input);
  CHECK_THROWS_AS(average_traces({}, g), empty_input);
}

TEST_CASE("nearest-sample alignment picks the closest sample") {
  time_grid g{-1.0, 0.0, 0.5};  // grid times -1.0, -0.5, 0.0
  probability_trace tr{"e", {{-0.9, 0.1}, {-0.4, 0.6}, {-0.05, 0.9}}};
  const auto avg = average_traces({tr}, g);
  CHECK(avg.samples[0].p == doctest::Approx(0.1));   // -1.0 -> sample at -0.9
  CHECK(avg.samples[1].p == doctest::Approx(0.6));   // -0.5 -> sample at -0.4
  CHECK(avg.samples[2].p == doctest::Approx(0.9));   // 0.0 -> sample at -0.05
}

TEST_CASE("pseudo-experiment expansion column sums follow the rounding rule") {
  averaged_trace avg;
  avg.n_events = 1;
  avg.samples = {{-3.0, 0.73}, {-2.0, 0.0}, {-1.0, 1.0}, {-0.5, 0.05}};
  const auto m = expand(avg);
  REQUIRE(m.experiments() == 10);
  auto column_sum = [&](std::size_t j) {
    int s = 0;
    for (const auto& row : m.rows) s += row[j];
    return s;
  };
  CHECK(column_sum(0) == 7);
  CHECK(column_sum(1) == 0);
  CHECK(column_sum(2) == 10);
  CHECK(column_sum(3) == 1);  // round-half-away-from-zero

  // deterministic stacking: hits occupy the leading rows
  for (int r = 0; r < 7; ++r) CHECK(m.rows[r][0] == 1);
  for (int r = 7; r < 10; ++r) CHECK(m.rows[r][0] == 0);
}

TEST_CASE("rounding rule option") {
  CHECK(pseudo_hits(0.05, 10, rounding_rule::half_away_from_zero) == 1);
  CHECK(pseudo_hits(0.25, 10, rounding_rule::half_away_from_zero) == 3);
  CHECK(pseudo_hits(0.25, 10, rounding_rule::half_even) == 2);
  CHECK(pseudo_hits(0.35, 10, rounding_rule::half_even) == 4);
  CHECK(pseudo_hits(0.0, 10, rounding_rule::half_even) == 0);
  CHECK(pseudo_hits(1.0, 10, rounding_rule::half_even) == 10);
}

TEST_CASE("experiment count is a parameter") {
  averaged_trace avg;
  avg.n_events = 1;
  avg.samples = {{-2.0, 0.5}, {-1.0, 0.24}, {-0.5, 0.76}};
  const auto m = expand(avg, 5);
  REQUIRE(m.experiments() == 5);
  auto column_sum = [&](std::size_t j) {
    int s = 0;
    for (const auto& row : m.rows) s += row[j];
    return s;
  };
  CHECK(column_sum(0) == 3);  // 2.5 rounds away from zero
  CHECK(column_sum(1) == 1);
  CHECK(column_sum(2) == 4);
  CHECK_THROWS_AS(expand(avg, 0), bad_domain);
}

TEST_CASE("column sums are exact for random probabilities") {
  splitmix64 rng(331);
  averaged_trace avg;
  avg.n_events = 1;
  for (int j = 0; j < 1000; ++j) avg.samples.push_back({-7.0 + 0.007 * j, rng.uniform01()});
  const auto m = expand(avg);
  for (std::size_t j = 0; j < avg.samples.size(); ++j) {
    int s = 0;
    for (const auto& row : m.rows) s += row[j];
    CHECK(s == static_cast<int>(std::llround(10.0 * avg.samples[j].p)));
  }
}

TEST_CASE("complement probabilities mirror the expansion") {
  splitmix64 rng(337);
  averaged_trace avg, comp;
  avg.n_events = comp.n_events = 1;
  for (int j = 0; j < 200; ++j) {
    double p = rng.uniform01();
    if (std::fabs(10.0 * p - std::floor(10.0 * p) - 0.5) < 1e-9) p += 0.01;  // avoid ties
    avg.samples.push_back({-7.0 + 0.035 * j, p});
    comp.samples.push_back({-7.0 + 0.035 * j, 1.0 - p});
  }
  const auto m = expand(avg);
  const auto mc = expand(comp);
  for (std::size_t j = 0; j < avg.samples.size(); ++j) {
    for (int r = 0; r < 10; ++r) {
      CHECK(mc.rows[r][j] == 1 - m.rows[9 - r][j]);
    }
  }
}

TEST_CASE("row permutation does not change the modified hit/miss outcome") {
  splitmix64 rng(347);
  time_grid g;
  const auto tr = on_grid_trace(g, [&](double t) {
    return std::clamp(sigmoid(2.0, 0.9, t) + 0.04 * rng.symmetric(), 0.0, 1.0);
  });
  const auto avg = average_traces({tr}, g);
  auto m = expand(avg);
  const auto grid = grid_of(avg);
  const auto base = analyze_experiments(m, grid);

  // whole-row shuffle: the multiset of experiments is unchanged
  std::vector<std::vector<std::uint8_t>> perm = m.rows;
  std::rotate(perm.begin(), perm.begin() + 3, perm.end());
  std::swap(perm[0], perm[5]);
  experiment_matrix shuffled{m.times, perm};
  const auto again = analyze_experiments(shuffled, grid);
  CHECK(again.a90_95_mean == doctest::Approx(base.a90_95_mean).epsilon(1e-9));
  CHECK(again.excluded.size() == base.excluded.size());
}

TEST_CASE("binary-valued traces reduce to the standard analysis") {
  // noisy 0/1 profile with overlap so the fit is well posed
  splitmix64 rng(353);
  time_grid g;
  const auto tr = on_grid_trace(g, [&](double t) {
    const double p = sigmoid(4.0, 1.3, t);
    return rng.uniform01() < p ? 1.0 : 0.0;
  });
  const auto avg = average_traces({tr}, g);
  const auto grid = grid_of(avg);

  const auto shm = standard_hit_miss(avg, grid);
  const auto mhm = modified_hit_miss(avg, grid);
  REQUIRE(shm.a90_95.has_value());
  // all ten rows carry the identical binary sequence
  CHECK(mhm.excluded.empty());
  CHECK(mhm.a90_95_mean == doctest::Approx(*shm.a90_95).epsilon(1e-9));
}

TEST_CASE("step profiles degenerate under both pipelines") {
  time_grid g;
  const auto tr = on_grid_trace(g, [](double t) { return t < -3.0 ? 0.0 : 1.0; });
  const auto avg = average_traces({tr}, g);
  const auto grid = grid_of(avg);
  CHECK_THROWS_AS(standard_hit_miss(avg, grid), degenerate_data);
  CHECK_THROWS_AS(modified_hit_miss(avg, grid), all_experiments_degenerate);
}

TEST_CASE("flat half probability is all misses for the standard analysis") {
  time_grid g;
  const auto tr = on_grid_trace(g, [](double) { return 0.5; });
  const auto avg = average_traces({tr}, g);
  CHECK_THROWS_AS(standard_hit_miss(avg, grid_of(avg)), degenerate_data);
}

TEST_CASE("soft step keeps values off the threshold boundary") {
  time_grid g;
  const auto tr = on_grid_trace(g, [](double t) { return t < -3.0 ? 0.2 : 0.8; });
  const auto avg = average_traces({tr}, g);
  // 0.2 / 0.8 never exceeds threshold below -3 and always above: separation
  CHECK_THROWS_AS(standard_hit_miss(avg, grid_of(avg)), degenerate_data);
}

TEST_CASE("jittered sigmoid produces differing experiments with bounded spread") {
  splitmix64 rng(359);
  time_grid g;
  const auto tr = on_grid_trace(g, [&](double t) {
    const double base = 0.05 + 0.90 * sigmoid(3.2, 1.1, t);
    return std::clamp(base + 0.05 * rng.symmetric(), 0.0, 1.0);
  });
  const auto avg = average_traces({tr}, g);
  const auto grid = grid_of(avg);
  const auto res = modified_hit_miss(avg, grid);

  std::vector<double> values;
  for (const auto& s : res.per_experiment)
    if (s && s->a90_95) values.push_back(*s->a90_95);
  REQUIRE(values.size() >= 2);
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  CHECK(*mn < *mx);  // rows differ
  CHECK(res.a90_95_mean >= *mn);
  CHECK(res.a90_95_mean <= *mx);

  // rows are thresholded versions of one profile, so they are not identical
  bool any_diff = false;
  const auto m = expand(avg);
  for (std::size_t j = 0; j < m.times.size() && !any_diff; ++j)
    if (m.rows[0][j] != m.rows[9][j]) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("standard and modified results differ on a noisy sigmoid") {
  splitmix64 rng(367);
  time_grid g;
  const auto tr = on_grid_trace(g, [&](double t) {
    return std::clamp(sigmoid(2.6, 0.8, t) + 0.05 * rng.symmetric(), 0.0, 1.0);
  });
  const auto avg = average_traces({tr}, g);
  const auto grid = grid_of(avg);
  const auto shm = standard_hit_miss(avg, grid);
  const auto mhm = modified_hit_miss(avg, grid);
  REQUIRE(shm.a90_95.has_value());
  CHECK(mhm.a90_95_mean != *shm.a90_95);
}
