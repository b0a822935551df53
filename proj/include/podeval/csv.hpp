#pragma once

// CSV schemas used by the tool. Plain comma-separated values without
// quoting; identifiers therefore must not contain commas. Parse failures
// name the file and 1-based line number.
//
//   trials:   a,hits,trials
//   traces:   event_id,t_seconds,probability
//   curve:    a,pod_mean,pod_lower95          (9 significant digits)
//   manifest: classifier,layer,driver,method,a90_95,fap
//             method in {a_vs_a, shm, mhm}; a90_95 in seconds before the
//             event, empty or 0 marking a degenerate (absent) result

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "podeval/ensemble.hpp"
#include "podeval/errors.hpp"
#include "podeval/glm.hpp"
#include "podeval/mhm.hpp"
#include "podeval/pod.hpp"

namespace podeval::io {

// forces a value through the curve file's 9-significant-digit format so
// exports and replots are bit-identical
inline double round9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_number(const std::string& file, long line, const std::string& field,
                           const std::string& what) {
  const char* s = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw parse_error(file, line, "expected a number for " + what + ", got '" + field + "'");
  return v;
}

inline long parse_integer(const std::string& file, long line, const std::string& field,
                          const std::string& what) {
  const char* s = field.c_str();
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0')
    throw parse_error(file, line, "expected an integer for " + what + ", got '" + field + "'");
  return v;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw empty_input("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

inline void expect_header(const std::string& path, const std::vector<std::string>& lines,
                          const std::string& header) {
  if (lines.empty()) throw empty_input("empty file: " + path);
  std::string first = lines.front();
  if (!first.empty() && first.back() == '\r') first.pop_back();
  if (first != header)
    throw parse_error(path, 1, "expected header '" + header + "', got '" + first + "'");
}

}  // namespace detail

inline trial_set read_trials_csv(const std::string& path) {
  const auto lines = detail::read_lines(path);
  detail::expect_header(path, lines, "a,hits,trials");
  trial_set ts;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i] == "\r") continue;
    const auto f = detail::split_fields(lines[i]);
    const long line = static_cast<long>(i + 1);
    if (f.size() != 3) throw parse_error(path, line, "expected 3 fields");
    trial_point p;
    p.a = detail::parse_number(path, line, f[0], "a");
    p.hits = static_cast<int>(detail::parse_integer(path, line, f[1], "hits"));
    p.trials = static_cast<int>(detail::parse_integer(path, line, f[2], "trials"));
    if (p.trials < 1) throw parse_error(path, line, "trials must be >= 1");
    if (p.hits < 0 || p.hits > p.trials)
      throw parse_error(path, line, "hits must lie in [0, trials]");
    ts.points.push_back(p);
  }
  if (ts.points.empty()) throw empty_input("no data rows in " + path);
  return ts;
}

inline std::vector<probability_trace> read_traces_csv(const std::string& path) {
  const auto lines = detail::read_lines(path);
  detail::expect_header(path, lines, "event_id,t_seconds,probability");
  std::vector<probability_trace> traces;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i] == "\r") continue;
    const auto f = detail::split_fields(lines[i]);
    const long line = static_cast<long>(i + 1);
    if (f.size() != 3) throw parse_error(path, line, "expected 3 fields");
    if (f[0].empty()) throw parse_error(path, line, "empty event_id");
    const double t = detail::parse_number(path, line, f[1], "t_seconds");
    if (t > 0.0)
      throw parse_error(path, line,
                        "t_seconds is signed time relative to the event and must be <= 0");
    const double p = detail::parse_number(path, line, f[2], "probability");
    if (!(p >= 0.0 && p <= 1.0))
      throw parse_error(path, line, "probability must lie in [0,1]");
    auto it = std::find_if(traces.begin(), traces.end(),
                           [&](const probability_trace& tr) { return tr.event_id == f[0]; });
    if (it == traces.end()) {
      traces.push_back({f[0], {}});
      it = std::prev(traces.end());
    }
    if (!it->samples.empty() && !(t > it->samples.back().t))
      throw parse_error(path, line,
                        "timestamps must be strictly increasing within event '" + f[0] + "'");
    it->samples.push_back({t, p});
  }
  if (traces.empty()) throw empty_input("no data rows in " + path);
  return traces;
}

inline void write_traces_csv(const std::string& path,
                             const std::vector<probability_trace>& traces) {
  std::ofstream out(path);
  if (!out) throw empty_input("cannot write file: " + path);
  out << "event_id,t_seconds,probability\n";
  char buf[96];
  for (const auto& tr : traces) {
    for (const auto& s : tr.samples) {
      std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g\n", tr.event_id.c_str(), s.t, s.p);
      out << buf;
    }
  }
}

inline void write_curve_csv(const std::string& path, const std::vector<curve_point>& curve) {
  std::ofstream out(path);
  if (!out) throw empty_input("cannot write file: " + path);
  out << "a,pod_mean,pod_lower95\n";
  char buf[120];
  for (const auto& cp : curve) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", cp.a, cp.pod_mean, cp.pod_lower95);
    out << buf;
  }
}

inline std::vector<curve_point> read_curve_csv(const std::string& path) {
  const auto lines = detail::read_lines(path);
  detail::expect_header(path, lines, "a,pod_mean,pod_lower95");
  std::vector<curve_point> curve;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i] == "\r") continue;
    const auto f = detail::split_fields(lines[i]);
    const long line = static_cast<long>(i + 1);
    if (f.size() != 3) throw parse_error(path, line, "expected 3 fields");
    curve.push_back({detail::parse_number(path, line, f[0], "a"),
                     detail::parse_number(path, line, f[1], "pod_mean"),
                     detail::parse_number(path, line, f[2], "pod_lower95")});
  }
  return curve;
}

inline pod_method parse_method(const std::string& file, long line, const std::string& token) {
  if (token == "a_vs_a" || token == "external_a_vs_a") return pod_method::external_a_vs_a;
  if (token == "shm" || token == "standard_hm") return pod_method::standard_hm;
  if (token == "mhm" || token == "modified_hm") return pod_method::modified_hm;
  throw parse_error(file, line, "unknown method '" + token + "' (use a_vs_a, shm, or mhm)");
}

inline std::vector<candidate_result> read_manifest_csv(const std::string& path) {
  const auto lines = detail::read_lines(path);
  detail::expect_header(path, lines, "classifier,layer,driver,method,a90_95,fap");
  std::vector<candidate_result> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i] == "\r") continue;
    const auto f = detail::split_fields(lines[i]);
    const long line = static_cast<long>(i + 1);
    if (f.size() != 6) throw parse_error(path, line, "expected 6 fields");
    candidate_result c;
    c.classifier_id = f[0];
    c.layer_id = f[1];
    c.driver_id = f[2];
    c.method = parse_method(path, line, f[3]);
    if (!f[4].empty()) {
      const double v = detail::parse_number(path, line, f[4], "a90_95");
      if (v < 0.0)
        throw parse_error(path, line, "a90_95 is seconds before the event and must be >= 0");
      // report tables mark degenerate results with 0
      if (v > 0.0) c.a90_95 = v;
    }
    if (!f[5].empty()) c.fap = detail::parse_number(path, line, f[5], "fap");
    out.push_back(c);
  }
  if (out.empty()) throw empty_input("no data rows in " + path);
  return out;
}

}  // namespace podeval::io
