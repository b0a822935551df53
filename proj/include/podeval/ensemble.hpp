#pragma once

// Winner-take-all aggregation across classifiers of one type and feature
// layers, plus the cross-method comparison table. Values here are reported
// as seconds before the event (positive magnitudes); larger
// means an earlier reliable prediction and therefore a better candidate.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "podeval/errors.hpp"

namespace podeval {

enum class pod_method { standard_hm, modified_hm, external_a_vs_a };

inline const char* to_string(pod_method m) {
  switch (m) {
    case pod_method::standard_hm: return "shm";
    case pod_method::modified_hm: return "mhm";
    default: return "a_vs_a";
  }
}

struct candidate_result {
  std::string classifier_id;
  std::string layer_id;
  std::string driver_id;
  pod_method method = pod_method::standard_hm;
  std::optional<double> a90_95;  // seconds before the event; absent = degenerate
  std::optional<double> fap;
};

namespace detail {

// layer ids sort numerically when they parse as integers
inline bool layer_less(const std::string& a, const std::string& b) {
  char* ea = nullptr;
  char* eb = nullptr;
  const long la = std::strtol(a.c_str(), &ea, 10);
  const long lb = std::strtol(b.c_str(), &eb, 10);
  if (ea && *ea == '\0' && eb && *eb == '\0') return la < lb;
  return a < b;
}

}  // namespace detail

// Returns the candidate with the best a90_95 (largest seconds before the
// event). Absent values lose to any present value; if every candidate is
// absent the result is absent with layer id "All". Ties within tie_tol are
// reported jointly ("1&2") with the lowest layer as representative.
inline candidate_result winner_take_all(const std::vector<candidate_result>& candidates,
                                        pod_method method, double tie_tol = 1e-3) {
  if (candidates.empty()) throw empty_input("winner_take_all: no candidates");
  for (const auto& c : candidates)
    if (c.method != method)
      throw bad_domain("winner_take_all: candidates must all share the method");

  std::vector<const candidate_result*> present;
  for (const auto& c : candidates)
    if (c.a90_95) present.push_back(&c);

  if (present.empty()) {
    candidate_result out = candidates.front();
    out.a90_95.reset();
    out.layer_id = "All";
    std::optional<double> shared_fap = candidates.front().fap;
    for (const auto& c : candidates)
      if (!c.fap || !shared_fap || std::fabs(*c.fap - *shared_fap) > 1e-12) shared_fap.reset();
    out.fap = shared_fap;
    return out;
  }

  const double best =
      (*std::max_element(present.begin(), present.end(),
                         [](const candidate_result* a, const candidate_result* b) {
                           return *a->a90_95 < *b->a90_95;
                         }))
          ->a90_95.value();

  std::vector<const candidate_result*> tied;
  for (const auto* c : present)
    if (*c->a90_95 >= best - tie_tol) tied.push_back(c);
  std::sort(tied.begin(), tied.end(), [](const candidate_result* a, const candidate_result* b) {
    return detail::layer_less(a->layer_id, b->layer_id);
  });

  candidate_result out = *tied.front();
  if (tied.size() > 1) {
    std::string joint = tied.front()->layer_id;
    for (std::size_t i = 1; i < tied.size(); ++i) joint += "&" + tied[i]->layer_id;
    out.layer_id = joint;
  }
  return out;
}

struct comparison_row {
  std::string classifier_id;
  std::string layer_id;
  std::string driver_id;
  std::optional<double> a_vs_a, shm, mhm;  // seconds before the event
  std::optional<double> diff_shm, diff_mhm;
  bool flagged = false;  // the modified result is farther from a-vs-a than the standard one
};

// Joins per-method results on (classifier, layer, driver) keys. Every key
// must carry every method that appears anywhere in the input; degenerate
// (absent) values enter the difference columns as 0, the same convention the
// report tables use.
inline std::vector<comparison_row> comparison_table(
    const std::vector<candidate_result>& candidates) {
  if (candidates.empty()) throw empty_input("comparison_table: no results");

  using key = std::tuple<std::string, std::string, std::string>;
  std::map<key, comparison_row> rows;
  bool has_avsa = false, has_shm = false, has_mhm = false;
  for (const auto& c : candidates) {
    auto& row = rows[{c.classifier_id, c.layer_id, c.driver_id}];
    row.classifier_id = c.classifier_id;
    row.layer_id = c.layer_id;
    row.driver_id = c.driver_id;
    const double value = c.a90_95.value_or(0.0);
    switch (c.method) {
      case pod_method::external_a_vs_a:
        row.a_vs_a = value;
        has_avsa = true;
        break;
      case pod_method::standard_hm:
        row.shm = value;
        has_shm = true;
        break;
      case pod_method::modified_hm:
        row.mhm = value;
        has_mhm = true;
        break;
    }
  }

  std::string missing;
  for (const auto& [k, row] : rows) {
    auto complain = [&](const char* method) {
      missing += (missing.empty() ? "" : "; ");
      missing += row.classifier_id + "/" + row.layer_id + "/" + row.driver_id + " lacks " +
                 method;
    };
    if (has_avsa && !row.a_vs_a) complain("a_vs_a");
    if (has_shm && !row.shm) complain("shm");
    if (has_mhm && !row.mhm) complain("mhm");
  }
  if (!missing.empty()) throw key_mismatch("comparison_table: " + missing);

  std::vector<comparison_row> out;
  out.reserve(rows.size());
  for (auto& [k, row] : rows) {
    if (row.a_vs_a && row.shm) row.diff_shm = std::fabs(*row.a_vs_a - *row.shm);
    if (row.a_vs_a && row.mhm) row.diff_mhm = std::fabs(*row.a_vs_a - *row.mhm);
    if (row.diff_shm && row.diff_mhm) row.flagged = *row.diff_mhm > *row.diff_shm;
    out.push_back(row);
  }
  std::sort(out.begin(), out.end(), [](const comparison_row& a, const comparison_row& b) {
    if (a.classifier_id != b.classifier_id) return a.classifier_id < b.classifier_id;
    if (a.layer_id != b.layer_id) return detail::layer_less(a.layer_id, b.layer_id);
    return a.driver_id < b.driver_id;
  });
  return out;
}

}  // namespace podeval
