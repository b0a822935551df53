#pragma once

// False-alarm probability at 50% confidence:
//   FAP = { 1 + (n - x) / ((x + 1) F(0.5; 2x+2, 2n-2x)) }^-1
// where n counts the opportunities for a false alarm and x the false alarms.
// The x = n case is exactly 1 (the F term has zero denominator degrees of
// freedom and its factor vanishes), handled without a special-function call.

#include <vector>

#include "podeval/errors.hpp"
#include "podeval/mhm.hpp"
#include "podeval/specfun.hpp"

namespace podeval {

struct fap_result {
  int n = 0;
  int x = 0;
  double fap = 0.0;
};

inline fap_result fap_50(int n, int x) {
  if (n < 1) throw bad_domain("fap_50: requires n >= 1");
  if (x < 0 || x > n) throw bad_domain("fap_50: requires 0 <= x <= n");
  if (x == n) return {n, x, 1.0};
  const double f = specfun::f_quantile(0.5, 2 * x + 2, 2 * (n - x));
  const double fap = 1.0 / (1.0 + (n - x) / ((x + 1) * f));
  return {n, x, fap};
}

enum class fap_counting {
  per_window,  // one opportunity per negative-class event window
  per_sample,  // one opportunity per time sample
};

// Counts false-alarm opportunities and false alarms over negative-class
// traces. In per_window mode a window alarms when any sample exceeds the
// threshold.
inline std::pair<int, int> count_false_alarms(const std::vector<probability_trace>& negatives,
                                              double threshold = 0.5,
                                              fap_counting mode = fap_counting::per_window) {
  if (negatives.empty()) throw empty_input("count_false_alarms: no negative traces");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw bad_domain("count_false_alarms: threshold must lie in (0,1)");
  int n = 0, x = 0;
  for (const auto& trace : negatives) {
    trace.validate();
    if (mode == fap_counting::per_window) {
      ++n;
      for (const auto& s : trace.samples) {
        if (s.p > threshold) {
          ++x;
          break;
        }
      }
    } else {
      for (const auto& s : trace.samples) {
        ++n;
        if (s.p > threshold) ++x;
      }
    }
  }
  return {n, x};
}

}  // namespace podeval
