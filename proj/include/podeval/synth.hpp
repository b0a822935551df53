#pragma once

// Synthetic ground truth for validation: binomial hit/miss draws and
// classifier-style probability traces from a known POD model. Everything is
// reproducible from (truth, seed) through the project's own generator.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "podeval/mhm.hpp"
#include "podeval/pod.hpp"
#include "podeval/rng.hpp"

namespace podeval {

struct ground_truth {
  link_function link = link_function::logit;
  axis_transform axis = axis_transform::cartesian;
  double b0 = 0.0;
  double b1 = 1.0;
};

inline double true_pod(const ground_truth& gt, double a) {
  return pod_mean(gt.link, gt.axis, gt.b0, gt.b1, a);
}

// Seeded binomial draws with success probability POD(a) at each grid value.
inline trial_set draw_trials(const ground_truth& gt, const std::vector<double>& a_grid,
                             int trials_per_point, std::uint64_t seed) {
  if (trials_per_point < 1) throw bad_domain("draw_trials: trials_per_point must be >= 1");
  splitmix64 rng(seed);
  trial_set ts;
  ts.points.reserve(a_grid.size());
  for (double a : a_grid) {
    const double p = true_pod(gt, a);
    int h = 0;
    for (int k = 0; k < trials_per_point; ++k)
      if (rng.uniform01() < p) ++h;
    ts.points.push_back({a, h, trials_per_point});
  }
  return ts;
}

// Probability trace sampled on the window grid: POD(t) plus clamped uniform
// jitter of the given amplitude.
inline probability_trace synth_trace(const ground_truth& gt, const time_grid& window,
                                     double jitter, std::uint64_t seed,
                                     const std::string& event_id = "synth") {
  if (!(jitter >= 0.0)) throw bad_domain("synth_trace: jitter must be >= 0");
  splitmix64 rng(seed);
  probability_trace tr;
  tr.event_id = event_id;
  const int n = window.size();
  tr.samples.reserve(n);
  for (int j = 0; j < n; ++j) {
    const double t = window.at(j);
    double p = true_pod(gt, t);
    if (jitter > 0.0) p += jitter * rng.symmetric();
    tr.samples.push_back({t, std::clamp(p, 0.0, 1.0)});
  }
  return tr;
}

}  // namespace podeval
