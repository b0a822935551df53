#pragma once

// Plain-text key=value analysis configuration. Unknown keys are rejected so
// typos fail loudly; '#' starts a comment.

#include <fstream>
#include <sstream>
#include <string>

#include "podeval/errors.hpp"
#include "podeval/fap.hpp"
#include "podeval/mhm.hpp"
#include "podeval/pod.hpp"

namespace podeval {

struct analysis_config {
  double window_start = -7.0;  // seconds relative to the event
  double window_end = 0.0;
  double grid_step = 0.05;   // trace recording step
  int experiments = 10;      // pseudo-experiment count
  rounding_rule rounding = rounding_rule::half_away_from_zero;
  double lr_contour_level = default_contour_level;
  double shm_threshold = 0.5;
  fap_counting fap_mode = fap_counting::per_window;
  int pod_grid_count = 512;  // curve evaluation grid
  double tie_tolerance = 1e-3;
  std::string out_dir = ".";

  time_grid window() const { return {window_start, window_end, grid_step}; }

  mhm_options mhm() const { return {experiments, rounding, lr_contour_level}; }
};

inline analysis_config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw empty_input("cannot open config: " + path);
  analysis_config cfg;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
      line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw parse_error(path, lineno, "expected key=value");
    std::string key = line.substr(start, eq - start);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::string value = line.substr(eq + 1);
    const auto vstart = value.find_first_not_of(" \t");
    value = vstart == std::string::npos ? "" : value.substr(vstart);

    auto number = [&]() {
      char* end = nullptr;
      const double v = std::strtod(value.c_str(), &end);
      if (end == value.c_str() || *end != '\0')
        throw parse_error(path, lineno, "expected a number for " + key);
      return v;
    };
    if (key == "window_start") cfg.window_start = number();
    else if (key == "window_end") cfg.window_end = number();
    else if (key == "grid_step") cfg.grid_step = number();
    else if (key == "experiments") cfg.experiments = static_cast<int>(number());
    else if (key == "rounding") {
      if (value == "half_away_from_zero") cfg.rounding = rounding_rule::half_away_from_zero;
      else if (value == "half_even") cfg.rounding = rounding_rule::half_even;
      else throw parse_error(path, lineno, "rounding must be half_away_from_zero or half_even");
    } else if (key == "lr_contour_level") cfg.lr_contour_level = number();
    else if (key == "shm_threshold") cfg.shm_threshold = number();
    else if (key == "fap_mode") {
      if (value == "per_window") cfg.fap_mode = fap_counting::per_window;
      else if (value == "per_sample") cfg.fap_mode = fap_counting::per_sample;
      else throw parse_error(path, lineno, "fap_mode must be per_window or per_sample");
    } else if (key == "pod_grid_count") cfg.pod_grid_count = static_cast<int>(number());
    else if (key == "tie_tolerance") cfg.tie_tolerance = number();
    else if (key == "out_dir") cfg.out_dir = value;
    else throw parse_error(path, lineno, "unknown key '" + key + "'");
  }
  if (!(cfg.window_end > cfg.window_start))
    throw parse_error(path, 0, "window_end must exceed window_start");
  if (!(cfg.grid_step > 0.0)) throw parse_error(path, 0, "grid_step must be positive");
  if (cfg.experiments < 1) throw parse_error(path, 0, "experiments must be >= 1");
  if (!(cfg.lr_contour_level >= 0.0))
    throw parse_error(path, 0, "lr_contour_level must be >= 0");
  if (cfg.pod_grid_count < 2) throw parse_error(path, 0, "pod_grid_count must be >= 2");
  return cfg;
}

inline void save_config(const std::string& path, const analysis_config& cfg) {
  std::ofstream out(path);
  if (!out) throw empty_input("cannot write config: " + path);
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "window_start=" << num(cfg.window_start) << "\n"
      << "window_end=" << num(cfg.window_end) << "\n"
      << "grid_step=" << num(cfg.grid_step) << "\n"
      << "experiments=" << cfg.experiments << "\n"
      << "rounding="
      << (cfg.rounding == rounding_rule::half_away_from_zero ? "half_away_from_zero"
                                                             : "half_even")
      << "\n"
      << "lr_contour_level=" << num(cfg.lr_contour_level) << "\n"
      << "shm_threshold=" << num(cfg.shm_threshold) << "\n"
      << "fap_mode="
      << (cfg.fap_mode == fap_counting::per_window ? "per_window" : "per_sample") << "\n"
      << "pod_grid_count=" << cfg.pod_grid_count << "\n"
      << "tie_tolerance=" << num(cfg.tie_tolerance) << "\n"
      << "out_dir=" << cfg.out_dir << "\n";
}

}  // namespace podeval
