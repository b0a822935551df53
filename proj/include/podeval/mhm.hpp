#pragma once

// Modified hit/miss pipeline: per-time-step detection probabilities are
// averaged over events, expanded into pseudo-experiments (n of N rows carry
// a hit where n = round(N * p)), and each row is analyzed as an independent
// hit/miss trial set. The standard hit/miss baseline thresholds the averaged
// probability at 0.5 instead.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "podeval/errors.hpp"
#include "podeval/pod.hpp"

namespace podeval {

struct trace_sample {
  double t = 0.0;  // signed seconds relative to the event, <= 0 before it
  double p = 0.0;
};

// Time-indexed detection probabilities for one event and one classifier.
struct probability_trace {
  std::string event_id;
  std::vector<trace_sample> samples;

  void validate() const {
    if (samples.empty()) throw empty_input("probability_trace: no samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (!std::isfinite(samples[i].t))
        throw bad_domain("probability_trace: timestamps must be finite");
      if (!(samples[i].p >= 0.0 && samples[i].p <= 1.0))
        throw bad_domain("probability_trace: probability outside [0,1]");
      if (i > 0 && !(samples[i].t > samples[i - 1].t))
        throw bad_domain("probability_trace: timestamps must be strictly increasing");
    }
  }
};

// Common resampling grid; defaults follow the evaluation protocol
// (7 s window before the event, 0.05 s recording step).
struct time_grid {
  double t_start = -7.0;
  double t_end = 0.0;
  double step = 0.05;

  int size() const {
    return static_cast<int>(std::llround((t_end - t_start) / step)) + 1;
  }
  // clamped so accumulated rounding never pushes the last point past the window
  double at(int j) const { return std::min(t_start + j * step, t_end); }
};

struct averaged_trace {
  std::vector<trace_sample> samples;  // p holds the event-mean probability
  int n_events = 0;
};

enum class rounding_rule { half_away_from_zero, half_even };

// Pointwise arithmetic mean of the traces resampled onto the grid by
// nearest-sample alignment. Traces covering less than half the window are
// skipped and reported through `skipped`.
inline averaged_trace average_traces(const std::vector<probability_trace>& traces,
                                     const time_grid& grid,
                                     std::vector<std::string>* skipped = nullptr) {
  if (traces.empty()) throw empty_input("average_traces: no traces");
  const int n = grid.size();
  std::vector<double> sum(n, 0.0);
  int used = 0;
  for (const auto& trace : traces) {
    trace.validate();
    const double lo = std::max(trace.samples.front().t, grid.t_start);
    const double hi = std::min(trace.samples.back().t, grid.t_end);
    if (hi - lo < 0.5 * (grid.t_end - grid.t_start)) {
      if (skipped) skipped->push_back(trace.event_id);
      continue;
    }
    for (int j = 0; j < n; ++j) {
      const double t = grid.at(j);
      auto it = std::lower_bound(trace.samples.begin(), trace.samples.end(), t,
                                 [](const trace_sample& s, double v) { return s.t < v; });
      if (it == trace.samples.end()) {
        --it;
      } else if (it != trace.samples.begin()) {
        const auto prev = std::prev(it);
        if (t - prev->t <= it->t - t) it = prev;
      }
      sum[j] += it->p;
    }
    ++used;
  }
  if (used == 0) throw empty_input("average_traces: every trace was skipped");

  averaged_trace out;
  out.n_events = used;
  out.samples.reserve(n);
  for (int j = 0; j < n; ++j) out.samples.push_back({grid.at(j), sum[j] / used});
  return out;
}

inline int pseudo_hits(double p_mean, int experiments, rounding_rule rule) {
  const double v = experiments * p_mean;
  const double f = std::floor(v);
  const double frac = v - f;
  int n;
  if (frac > 0.5) {
    n = static_cast<int>(f) + 1;
  } else if (frac < 0.5) {
    n = static_cast<int>(f);
  } else if (rule == rounding_rule::half_away_from_zero) {
    n = static_cast<int>(f) + 1;
  } else {
    n = static_cast<int>(f) % 2 == 0 ? static_cast<int>(f) : static_cast<int>(f) + 1;
  }
  return std::clamp(n, 0, experiments);
}

// Pseudo-experiment matrix: rows are experiments, columns are time steps.
// Column sums equal round(experiments * p_mean) exactly; the hits stack
// deterministically into rows 0..n-1.
struct experiment_matrix {
  std::vector<double> times;
  std::vector<std::vector<std::uint8_t>> rows;

  int experiments() const { return static_cast<int>(rows.size()); }
};

inline experiment_matrix expand(const averaged_trace& avg, int experiments = 10,
                                rounding_rule rule = rounding_rule::half_away_from_zero) {
  if (experiments < 1) throw bad_domain("expand: experiments must be >= 1");
  experiment_matrix m;
  m.times.reserve(avg.samples.size());
  m.rows.assign(experiments, std::vector<std::uint8_t>(avg.samples.size(), 0));
  for (std::size_t j = 0; j < avg.samples.size(); ++j) {
    m.times.push_back(avg.samples[j].t);
    const int n = pseudo_hits(avg.samples[j].p, experiments, rule);
    for (int r = 0; r < n; ++r) m.rows[r][j] = 1;
  }
  return m;
}

struct mhm_result {
  double a90_95_mean = 0.0;
  // one entry per experiment row; empty optional marks a row whose analysis
  // produced no a90_95 (separation or non-crossing)
  std::vector<std::optional<pod_summary>> per_experiment;
  std::vector<int> excluded;  // row indices contributing no a90_95
};

// Per-row standard hit/miss analyses of an expanded matrix; rows whose
// analysis yields no a90_95 are excluded from the mean and reported.
inline mhm_result analyze_experiments(const experiment_matrix& m, const grid_spec& grid,
                                      double contour_level = default_contour_level) {
  mhm_result out;
  out.per_experiment.resize(m.rows.size());
  double sum = 0.0;
  int counted = 0;
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    trial_set ts;
    ts.points.reserve(m.times.size());
    for (std::size_t j = 0; j < m.times.size(); ++j)
      ts.points.push_back({m.times[j], m.rows[r][j] ? 1 : 0, 1});
    try {
      pod_summary s = summarize(ts, grid, contour_level);
      const bool crossed = s.a90_95.has_value();
      if (crossed) {
        sum += *s.a90_95;
        ++counted;
      } else {
        out.excluded.push_back(static_cast<int>(r));
      }
      out.per_experiment[r] = std::move(s);
    } catch (const pod_error&) {
      out.excluded.push_back(static_cast<int>(r));
    }
  }
  if (counted == 0)
    throw all_experiments_degenerate(
        "modified hit/miss: no experiment produced an a90_95");
  out.a90_95_mean = sum / counted;
  return out;
}

struct mhm_options {
  int experiments = 10;
  rounding_rule rounding = rounding_rule::half_away_from_zero;
  double contour_level = default_contour_level;
};

inline mhm_result modified_hit_miss(const averaged_trace& avg, const grid_spec& grid,
                                    const mhm_options& opt = {}) {
  return analyze_experiments(expand(avg, opt.experiments, opt.rounding), grid,
                             opt.contour_level);
}

// Standard hit/miss baseline: a hit is an average probability strictly
// greater than the threshold (0.5 by default; the boundary counts as miss).
inline pod_summary standard_hit_miss(const averaged_trace& avg, const grid_spec& grid,
                                     double threshold = 0.5,
                                     double contour_level = default_contour_level) {
  trial_set ts;
  ts.points.reserve(avg.samples.size());
  int hits = 0;
  for (const auto& s : avg.samples) {
    const int h = s.p > threshold ? 1 : 0;
    hits += h;
    ts.points.push_back({s.t, h, 1});
  }
  const int n = static_cast<int>(ts.points.size());
  if (hits == 0) throw degenerate_data("standard hit/miss: all misses");
  if (hits == n) throw degenerate_data("standard hit/miss: all hits");
  // samples are time-ordered; a single 0->1 (or 1->0) transition means the
  // threshold separates hits from misses perfectly
  bool up = true, down = true;
  for (int j = 1; j < n; ++j) {
    if (ts.points[j].hits < ts.points[j - 1].hits) up = false;
    if (ts.points[j].hits > ts.points[j - 1].hits) down = false;
  }
  if (up || down)
    throw degenerate_data("standard hit/miss: complete separation at the threshold");
  return summarize(ts, grid, contour_level);
}

}  // namespace podeval
