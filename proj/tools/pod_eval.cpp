// pod-eval: POD analysis for classifier reliability evaluation.
//
//   fit       fit POD models to grouped hit/miss data and plot the curve
//   evaluate  run the standard or modified hit/miss pipeline on traces
//   compare   build cross-method comparison and winner-take-all tables
//   synth     generate synthetic probability traces from a known model
//
// Exit codes: 0 ok, 2 parse/input error, 3 degenerate fit, 4 no valid model.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "podeval/config.hpp"
#include "podeval/csv.hpp"
#include "podeval/ensemble.hpp"
#include "podeval/fap.hpp"
#include "podeval/mhm.hpp"
#include "podeval/pod.hpp"
#include "podeval/svg.hpp"
#include "podeval/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace podeval;

namespace {

double sig4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return std::strtod(buf, nullptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw empty_input("cannot write file: " + path.string());
  out << text;
}

json model_json(const fitted_glm& m) {
  return {{"link", to_string(m.link)},
          {"axis", to_string(m.axis)},
          {"b0", m.b0},
          {"b1", m.b1},
          {"log_likelihood", m.log_likelihood},
          {"deviance", m.deviance},
          {"converged", m.converged},
          {"separation", m.separation_flag},
          {"iterations", m.iterations}};
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

// rounds the curve through the 9-significant-digit export format so the
// written CSV and the plot agree bit for bit with any later re-plot
void round_curve(pod_summary& s) {
  for (auto& cp : s.curve) {
    cp.a = io::round9(cp.a);
    cp.pod_mean = io::round9(cp.pod_mean);
    cp.pod_lower95 = io::round9(cp.pod_lower95);
  }
}

json summary_json(const pod_summary& s) {
  return {{"model", model_json(s.model)},
          {"a90", optional_json(s.a90)},
          {"a90_95", optional_json(s.a90_95)},
          {"grid", {{"a_min", s.grid.a_min}, {"a_max", s.grid.a_max}, {"count", s.grid.count}}}};
}

void write_summary_files(const fs::path& dir, const std::string& stem, pod_summary& s,
                         const std::vector<io::scatter_point>& scatter,
                         const std::string& x_label) {
  round_curve(s);
  io::write_curve_csv((dir / (stem + ".curve.csv")).string(), s.curve);
  write_text(dir / (stem + ".svg"),
             io::render_pod_svg(s.curve, scatter, s.a90, s.a90_95, x_label));
  std::ofstream out(dir / (stem + ".summary.json"));
  out << summary_json(s).dump(2) << "\n";
}

int run_fit(const std::string& input, const std::string& config_path,
            const std::string& out_dir) {
  const analysis_config cfg =
      config_path.empty() ? analysis_config{} : load_config(config_path);
  const trial_set data = io::read_trials_csv(input);
  fs::create_directories(out_dir);

  pod_summary s = summarize(data, grid_for(data, cfg.pod_grid_count), cfg.lr_contour_level);
  std::vector<io::scatter_point> scatter;
  for (const auto& p : data.points)
    scatter.push_back({p.a, double(p.hits) / double(p.trials)});

  fs::path dir(out_dir);
  round_curve(s);
  io::write_curve_csv((dir / "curve.csv").string(), s.curve);
  write_text(dir / "pod_curve.svg", io::render_pod_svg(s.curve, scatter, s.a90, s.a90_95));
  std::ofstream out(dir / "summary.json");
  out << summary_json(s).dump(2) << "\n";

  std::printf("fit: %s + %s axis, deviance %.6g, a90 %s, a90_95 %s\n",
              to_string(s.model.link), to_string(s.model.axis), s.model.deviance,
              s.a90 ? std::to_string(*s.a90).c_str() : "absent",
              s.a90_95 ? std::to_string(*s.a90_95).c_str() : "absent");
  return 0;
}

int run_evaluate(const std::string& traces_path, const std::string& negatives_path,
                 const std::string& mode, const std::string& config_path,
                 const std::string& out_dir) {
  const analysis_config cfg =
      config_path.empty() ? analysis_config{} : load_config(config_path);
  const auto traces = io::read_traces_csv(traces_path);
  const time_grid window = cfg.window();
  std::vector<std::string> skipped;
  const averaged_trace avg = average_traces(traces, window, &skipped);
  const grid_spec grid{cfg.window_start, cfg.window_end, cfg.pod_grid_count};

  fs::create_directories(out_dir);
  fs::path dir(out_dir);

  json report;
  report["mode"] = mode;
  report["n_events"] = avg.n_events;
  report["skipped_traces"] = skipped;
  report["window"] = {{"start", cfg.window_start},
                      {"end", cfg.window_end},
                      {"step", cfg.grid_step}};

  if (!negatives_path.empty()) {
    const auto negatives = io::read_traces_csv(negatives_path);
    const auto [n, x] = count_false_alarms(negatives, cfg.shm_threshold, cfg.fap_mode);
    const auto fap = fap_50(n, x);
    report["fap"] = {{"n", fap.n}, {"x", fap.x}, {"fap", sig4(fap.fap)}};
  }

  if (mode == "shm") {
    pod_summary s = standard_hit_miss(avg, grid, cfg.shm_threshold, cfg.lr_contour_level);
    std::vector<io::scatter_point> scatter;
    for (const auto& smp : avg.samples)
      scatter.push_back({smp.t, smp.p > cfg.shm_threshold ? 1.0 : 0.0});
    write_summary_files(dir, "shm", s, scatter, "t (s, relative to event)");
    report["a90"] = optional_json(s.a90);
    report["a90_95"] = optional_json(s.a90_95);
    if (s.a90_95) report["seconds_before_event"] = -*s.a90_95;
  } else {
    const mhm_result res = modified_hit_miss(avg, grid, cfg.mhm());
    json per = json::array();
    for (std::size_t r = 0; r < res.per_experiment.size(); ++r) {
      json entry;
      entry["experiment"] = r;
      if (res.per_experiment[r]) {
        pod_summary s = *res.per_experiment[r];
        char stem[32];
        std::snprintf(stem, sizeof stem, "experiment_%02zu", r);
        write_summary_files(dir, stem, s, {}, "t (s, relative to event)");
        entry["a90"] = optional_json(s.a90);
        entry["a90_95"] = optional_json(s.a90_95);
        entry["model"] = model_json(s.model);
      } else {
        entry["degenerate"] = true;
      }
      per.push_back(entry);
    }
    report["per_experiment"] = per;
    report["excluded_experiments"] = res.excluded;
    report["a90_95_mean"] = res.a90_95_mean;
    report["seconds_before_event"] = -res.a90_95_mean;
  }

  std::ofstream out(dir / "report.json");
  out << report.dump(2) << "\n";
  std::printf("evaluate(%s): report written to %s\n", mode.c_str(),
              (dir / "report.json").string().c_str());
  return 0;
}

std::string fmt_value(const std::optional<double>& v) {
  if (!v) return "0";  // degenerate results render as 0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", *v);
  return buf;
}

std::string fmt_cell(const std::optional<double>& v, int decimals = 3) {
  if (!v) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, *v);
  std::string s(buf);
  while (s.find('.') != std::string::npos && (s.back() == '0')) s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string aligned_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], row[c].size());
    }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += row[c];
      if (c + 1 < row.size()) out.append(width[c] - row[c].size() + 2, ' ');
    }
    out += "\n";
  }
  return out;
}

int run_compare(const std::string& manifest_path, const std::string& config_path,
                const std::string& out_dir) {
  const analysis_config cfg =
      config_path.empty() ? analysis_config{} : load_config(config_path);
  const auto candidates = io::read_manifest_csv(manifest_path);
  fs::create_directories(out_dir);
  fs::path dir(out_dir);

  bool has[3] = {false, false, false};
  for (const auto& c : candidates) has[static_cast<int>(c.method)] = true;
  const bool has_shm = has[static_cast<int>(pod_method::standard_hm)];
  const bool has_mhm = has[static_cast<int>(pod_method::modified_hm)];
  const bool has_avsa = has[static_cast<int>(pod_method::external_a_vs_a)];

  // per-row cross-method comparison
  const auto rows = comparison_table(candidates);
  {
    std::string csv = "classifier,layer,driver";
    if (has_avsa) csv += ",a_vs_a";
    if (has_shm) csv += ",shm";
    if (has_mhm) csv += ",mhm";
    if (has_avsa && has_shm) csv += ",diff_a_vs_a_shm";
    if (has_avsa && has_mhm) csv += ",diff_a_vs_a_mhm";
    if (has_avsa && has_shm && has_mhm) csv += ",flag";
    csv += "\n";
    std::vector<std::vector<std::string>> txt;
    std::vector<std::string> head{"classifier", "layer", "driver"};
    if (has_avsa) head.push_back("a_vs_a");
    if (has_shm) head.push_back("shm");
    if (has_mhm) head.push_back("mhm");
    if (has_avsa && has_shm) head.push_back("d(a_vs_a,shm)");
    if (has_avsa && has_mhm) head.push_back("d(a_vs_a,mhm)");
    if (has_avsa && has_shm && has_mhm) head.push_back("flag");
    txt.push_back(head);
    for (const auto& row : rows) {
      std::string line = row.classifier_id + "," + row.layer_id + "," + row.driver_id;
      std::vector<std::string> cells{row.classifier_id, row.layer_id, row.driver_id};
      auto add = [&](const std::optional<double>& v) {
        line += "," + fmt_value(v);
        cells.push_back(fmt_cell(v));
      };
      if (has_avsa) add(row.a_vs_a);
      if (has_shm) add(row.shm);
      if (has_mhm) add(row.mhm);
      if (has_avsa && has_shm) add(row.diff_shm);
      if (has_avsa && has_mhm) add(row.diff_mhm);
      if (has_avsa && has_shm && has_mhm) {
        line += row.flagged ? ",1" : ",0";
        cells.push_back(row.flagged ? "*" : "");
      }
      csv += line + "\n";
      txt.push_back(cells);
    }
    write_text(dir / "comparison.csv", csv);
    write_text(dir / "comparison.txt", aligned_table(txt));
  }

  // winner-take-all per (classifier, driver) and method (Tables 3-4 layout)
  {
    std::map<std::pair<std::string, std::string>, std::map<pod_method, candidate_result>>
        winners;
    std::map<std::pair<std::string, std::string>, std::vector<candidate_result>> groups[3];
    for (const auto& c : candidates)
      groups[static_cast<int>(c.method)][{c.classifier_id, c.driver_id}].push_back(c);
    for (int m = 0; m < 3; ++m)
      for (const auto& [key, group] : groups[m])
        winners[key].emplace(static_cast<pod_method>(m),
                             winner_take_all(group, static_cast<pod_method>(m),
                                             cfg.tie_tolerance));

    std::string csv = "classifier,driver";
    std::vector<std::string> head{"classifier", "driver"};
    auto add_method_cols = [&](const char* name) {
      csv += std::string(",") + name + ",layer_" + name;
      head.push_back(name);
      head.push_back(std::string("layer(") + name + ")");
    };
    if (has_avsa) add_method_cols("a_vs_a");
    if (has_shm) add_method_cols("shm");
    if (has_mhm) add_method_cols("mhm");
    csv += ",fap\n";
    head.push_back("fap");
    std::vector<std::vector<std::string>> txt{head};

    for (const auto& [key, per_method] : winners) {
      std::string line = key.first + "," + key.second;
      std::vector<std::string> cells{key.first, key.second};
      std::optional<double> fap;
      auto add = [&](pod_method m) {
        auto it = per_method.find(m);
        if (it == per_method.end()) {
          line += ",,";
          cells.push_back("-");
          cells.push_back("-");
          return;
        }
        line += "," + fmt_value(it->second.a90_95) + "," + it->second.layer_id;
        cells.push_back(fmt_cell(it->second.a90_95));
        cells.push_back(it->second.layer_id);
        if (m == pod_method::modified_hm && it->second.fap) fap = it->second.fap;
      };
      if (has_avsa) add(pod_method::external_a_vs_a);
      if (has_shm) add(pod_method::standard_hm);
      if (has_mhm) add(pod_method::modified_hm);
      if (fap) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.4g", *fap);
        line += std::string(",") + buf;
        cells.push_back(buf);
      } else {
        line += ",";
        cells.push_back("-");
      }
      csv += line + "\n";
      txt.push_back(cells);
    }
    write_text(dir / "winners.csv", csv);
    write_text(dir / "winners.txt", aligned_table(txt));
  }

  std::printf("compare: %zu rows -> %s\n", rows.size(), out_dir.c_str());
  return 0;
}

int run_synth(const std::string& model, const std::string& axis, double b0, double b1,
              std::uint64_t seed, double jitter, int events, double window_start,
              double window_end, double step, const std::string& out_path) {
  ground_truth gt;
  gt.link = model == "probit" ? link_function::probit : link_function::logit;
  gt.axis = axis == "log" ? axis_transform::logarithmic : axis_transform::cartesian;
  gt.b0 = b0;
  gt.b1 = b1;
  const time_grid window{window_start, window_end, step};
  std::vector<probability_trace> traces;
  for (int k = 0; k < events; ++k) {
    char id[32];
    std::snprintf(id, sizeof id, "synth_%03d", k);
    traces.push_back(synth_trace(gt, window, jitter, seed + static_cast<std::uint64_t>(k), id));
  }
  io::write_traces_csv(out_path, traces);
  std::printf("synth: %d event(s) -> %s\n", events, out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"POD analysis for machine-learning classifiers"};
  app.require_subcommand(1);

  std::string input, config_path, out_dir, traces_path, negatives_path, mode = "shm";
  std::string manifest_path, model = "logit", axis = "cart", out_path = "traces.csv";
  double b0 = 0.0, b1 = 1.0, jitter = 0.0;
  double window_start = -7.0, window_end = 0.0, step = 0.05;
  std::uint64_t seed = 1;
  int events = 1;

  auto* fit_cmd = app.add_subcommand("fit", "fit POD models to a,hits,trials data");
  fit_cmd->add_option("--input", input, "trials CSV (a,hits,trials)")->required();
  fit_cmd->add_option("--config", config_path, "analysis config file");
  fit_cmd->add_option("--out", out_dir, "output directory")->required();

  auto* eval_cmd = app.add_subcommand("evaluate", "run a hit/miss pipeline on traces");
  eval_cmd->add_option("--traces", traces_path, "trace CSV (event_id,t_seconds,probability)")
      ->required();
  eval_cmd->add_option("--negatives", negatives_path, "negative-class trace CSV for FAP");
  eval_cmd->add_option("--mode", mode, "shm or mhm")
      ->check(CLI::IsMember({"shm", "mhm"}))
      ->required();
  eval_cmd->add_option("--config", config_path, "analysis config file");
  eval_cmd->add_option("--out", out_dir, "output directory")->required();

  auto* cmp_cmd = app.add_subcommand("compare", "comparison and winner-take-all tables");
  cmp_cmd->add_option("--manifest", manifest_path,
                      "results CSV (classifier,layer,driver,method,a90_95,fap)")
      ->required();
  cmp_cmd->add_option("--config", config_path, "analysis config file");
  cmp_cmd->add_option("--out", out_dir, "output directory")->required();

  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic probability traces");
  synth_cmd->add_option("--model", model, "logit or probit")
      ->check(CLI::IsMember({"logit", "probit"}));
  synth_cmd->add_option("--axis", axis, "cart or log")->check(CLI::IsMember({"cart", "log"}));
  synth_cmd->add_option("--b0", b0, "intercept")->required();
  synth_cmd->add_option("--b1", b1, "slope")->required();
  synth_cmd->add_option("--seed", seed, "random seed")->required();
  synth_cmd->add_option("--jitter", jitter, "uniform jitter amplitude");
  synth_cmd->add_option("--events", events, "number of traces");
  synth_cmd->add_option("--window-start", window_start, "window start (s)");
  synth_cmd->add_option("--window-end", window_end, "window end (s)");
  synth_cmd->add_option("--step", step, "sample step (s)");
  synth_cmd->add_option("--out", out_path, "output trace CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_cmd->parsed()) return run_fit(input, config_path, out_dir);
    if (eval_cmd->parsed())
      return run_evaluate(traces_path, negatives_path, mode, config_path, out_dir);
    if (cmp_cmd->parsed()) return run_compare(manifest_path, config_path, out_dir);
    if (synth_cmd->parsed())
      return run_synth(model, axis, b0, b1, seed, jitter, events, window_start, window_end,
                       step, out_path);
  } catch (const pod_error& e) {
    json err{{"error", e.what()}, {"code", static_cast<int>(e.code())}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    json err{{"error", e.what()}, {"code", 1}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
  return 0;
}
