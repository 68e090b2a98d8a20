// Copyright 2026 The lindground Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// lindground command-line driver.
//
//   lindground run CONFIG [--output-dir DIR] [--no-plots]
//   lindground verify [--level fast|full] [--inject-fault quadrature-sign] [--report FILE]
//   lindground plot CSV... --kind KIND -o OUT.svg [--label L]... [--title T]
//   lindground filter-table (--config FILE | --norm X --gap Y) [--domain frequency|time]
//   lindground jump-report CONFIG
//
// Exit status: 0 on success, 1 on a runtime or verification failure, 2 on a
// usage, configuration or input-file error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "checks.hpp"
#include "lindground/circuit.hpp"
#include "lindground/studies.hpp"
#include "run_config.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using namespace lindground;
using namespace lindground::cli;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const SimulationRecord& rec) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rec.rows) {
    out += std::to_string(r.step) + ',' + format_double(r.time) + ',' + format_double(r.h_time) + ',' +
           std::to_string(r.a_gates) + ',' + format_double(r.energy_mean) + ',' + format_double(r.energy_se) + ',' +
           format_double(r.overlap_mean) + ',' + format_double(r.overlap_se) + '\n';
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
  }
  fs::rename(tmp, path);
}

fs::path resolve_output(const std::string& dir, const std::string& file) {
  const fs::path p(file);
  if (p.is_absolute() || dir.empty()) return p;
  return fs::path(dir) / p;
}

std::string config_location(const std::string& file, const ConfigError& e) {
  return e.line() > 0 ? file + ":" + std::to_string(e.line()) + ": " + e.what() : file + ": " + e.what();
}

struct LoadedRun {
  RunConfig config;
  ResolvedProblem problem;
  FilterParams params;
};

/// Parses the config and resolves the instance. Any problem with the config
/// itself is reported as a UsageError so the caller can exit before writing.
LoadedRun load_run(const std::string& file) {
  LoadedRun run;
  try {
    run.config = load_config(file);
  } catch (const ConfigError& e) {
    throw UsageError(config_location(file, e));
  }
  run.problem = resolve_problem(run.config.model);
  try {
    run.params = resolve_filter(run.config.filter, run.problem.spec);
  } catch (const ContractViolation& e) {
    throw UsageError(file + ": filter: " + e.what());
  }
  run.problem.params = run.params;
  return run;
}

json hamiltonian_json(const SimulationRecord& rec) {
  json j;
  j["dimension"] = 1LL << rec.model.qubit_count();
  j["norm"] = rec.norm_H;
  j["ground_energy"] = rec.ground_energy;
  j["max_energy"] = rec.max_energy;
  j["gap"] = rec.gap;
  j["ground_multiplicity"] = rec.ground_multiplicity;
  return j;
}

json row_json(const RecordRow& r) {
  json j;
  j["step"] = r.step;
  j["time"] = r.time;
  j["h_time"] = r.h_time;
  j["a_gates"] = r.a_gates;
  j["energy_mean"] = r.energy_mean;
  j["energy_se"] = r.energy_se;
  j["overlap_mean"] = r.overlap_mean;
  j["overlap_se"] = r.overlap_se;
  return j;
}

std::vector<std::string> write_plots(const fs::path& csv, const std::string& dir, const RunConfig& cfg) {
  const CsvTable table = read_csv(csv.string());
  std::vector<std::string> written;
  for (const char* kind : {"energy-time", "overlap-time", "overlap-htime"}) {
    const PlotKind& k = plot_kinds().at(kind);
    const Series s = series_from_csv(table, k, cfg.name);
    std::string name = cfg.output.plot_prefix + "_" + kind + ".svg";
    const fs::path out = resolve_output(dir, name);
    write_file(out, render_svg({s}, k, cfg.name + ": " + k.y_label));
    written.push_back(out.string());
  }
  return written;
}

int cmd_run(const std::string& file, const std::string& dir, bool no_plots) {
  const LoadedRun run = load_run(file);
  const RunConfig& cfg = run.config;
  const SimulationRecord rec = run_simulation(cfg.model, cfg.channel, run.params, run.problem);

  const fs::path csv = resolve_output(dir, cfg.output.csv);
  write_file(csv, csv_text(rec));
  std::vector<std::string> plots;
  if (cfg.output.plots && !no_plots) plots = write_plots(csv, dir, cfg);

  const CostLedger per_step = step_cost(run.params, cfg.channel);
  json m;
  m["name"] = cfg.name;
  m["description"] = cfg.description;
  m["config_file"] = file;
  m["model"] = model_json(cfg.model);
  m["hamiltonian"] = hamiltonian_json(rec);
  json f = filter_json(run.params);
  f["source"] = {{"norm", cfg.filter.norm ? "config" : "instance"},
                 {"gap", cfg.filter.gap ? "config" : "instance"},
                 {"a", cfg.filter.a ? "config" : "default 2.5 norm"},
                 {"delta_a", cfg.filter.delta_a ? "config" : "default 0.5 norm"},
                 {"b", cfg.filter.b ? "config" : "default gap"},
                 {"delta_b", cfg.filter.delta_b ? "config" : "default gap"},
                 {"S_s", cfg.filter.S_s ? "config" : "default 5 / gap"},
                 {"tau_s", cfg.filter.tau_s ? "config" : "default pi / (2 a)"}};
  f["quadrature_l1"] = quadrature_l1(run.params);
  m["filter"] = f;
  m["channel"] = channel_json(cfg.channel);
  m["cost_per_step"] = {{"hamiltonian_time", per_step.hamiltonian_time},
                        {"controlled_A", per_step.controlled_A_count},
                        {"coherent_time_included", cfg.channel.include_coherent}};
  json result;
  result["final"] = row_json(rec.final_row());
  result["initial_overlap"] = rec.initial_overlap;
  result["energy_error"] = rec.final_row().energy_mean - rec.ground_energy;
  for (double thr : {0.5, 0.9, 0.99}) {
    const RecordRow* r = first_reaching(rec, thr);
    result["first_reaching"][format_double(thr)] = r ? row_json(*r) : json(nullptr);
  }
  m["result"] = result;
  m["diagnostics"] = {{"max_trace_error", rec.max_trace_error}, {"flagged_steps", rec.flagged_steps},
                      {"warnings", rec.warnings}};
  m["outputs"] = {{"csv", csv.string()}, {"plots", plots}};
  const fs::path manifest = resolve_output(dir, cfg.output.manifest);
  write_file(manifest, m.dump(2) + "\n");

  const RecordRow& last = rec.final_row();
  std::printf("%s: %ld steps, overlap %.4f +- %.4f, energy %.6f +- %.6f (E0 %.6f), h_time %.6g\n",
              cfg.name.c_str(), last.step, last.overlap_mean, last.overlap_se, last.energy_mean, last.energy_se,
              rec.ground_energy, last.h_time);
  for (const auto& w : rec.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("wrote %s and %s\n", csv.string().c_str(), manifest.string().c_str());
  return kOk;
}

/// Checks whose bounds the current implementation is known not to meet,
/// with the measured reason.
const std::map<std::string, std::string>& known_deviations() {
  static const std::map<std::string, std::string> known = {
      {"jump.quadrature_saturation",
       "with S_s = 5/gap the truncated filter tail still moves K_s by about 2e-5 when the radius doubles"},
  };
  return known;
}

int cmd_verify(const std::string& level, const std::string& fault_name, const std::string& report) {
  checks::Fault fault;
  if (fault_name == "quadrature-sign") {
    fault.quadrature_sign = true;
  } else if (!fault_name.empty()) {
    throw UsageError("unknown fault \"" + fault_name + "\"; available: quadrature-sign");
  }
  const auto list = level == "full" ? checks::full_checks() : checks::fast_checks();
  json out;
  out["level"] = level;
  out["fault"] = fault_name.empty() ? json(nullptr) : json(fault_name);
  out["checks"] = json::array();
  int unexpected = 0;
  for (const auto& c : list) {
    const auto r = checks::run_check(c, fault);
    const auto known = known_deviations().find(c.id);
    const bool expected_fail = known != known_deviations().end();
    std::string status;
    if (r.passed) {
      status = expected_fail ? "XPASS" : "PASS";
    } else {
      status = expected_fail ? "XFAIL" : "FAIL";
      if (!expected_fail) ++unexpected;
    }
    std::printf("%-5s %-34s %s (bound %s) [%.1fs]\n", status.c_str(), c.id.c_str(), r.measured.c_str(),
                r.bound.c_str(), r.seconds);
    std::fflush(stdout);
    json j;
    j["id"] = c.id;
    j["title"] = c.title;
    j["status"] = status;
    j["passed"] = r.passed;
    j["measured"] = r.measured;
    j["bound"] = r.bound;
    j["seconds"] = r.seconds;
    if (expected_fail) j["known_deviation"] = known->second;
    out["checks"].push_back(j);
  }
  out["unexpected_failures"] = unexpected;
  if (!report.empty()) write_file(report, out.dump(2) + "\n");
  std::printf("%d check(s), %d unexpected failure(s)\n", static_cast<int>(list.size()), unexpected);
  return unexpected == 0 ? kOk : kFailure;
}

int cmd_plot(const std::vector<std::string>& files, const std::string& kind_name, const std::string& out,
             std::vector<std::string> labels, const std::string& title) {
  const auto it = plot_kinds().find(kind_name);
  if (it == plot_kinds().end()) throw UsageError("unknown plot kind \"" + kind_name + "\"");
  if (!labels.empty() && labels.size() != files.size()) {
    throw UsageError("--label must be given once per CSV file");
  }
  std::vector<Series> series;
  for (std::size_t k = 0; k < files.size(); ++k) {
    const std::string label = labels.empty() ? fs::path(files[k]).stem().string() : labels[k];
    try {
      series.push_back(series_from_csv(read_csv(files[k]), it->second, label));
    } catch (const CsvError& e) {
      const std::string msg = e.what();
      throw UsageError(msg.rfind(files[k], 0) == 0 ? msg : files[k] + ": " + msg);
    }
  }
  write_file(out, render_svg(series, it->second, title.empty() ? it->second.y_label : title));
  return kOk;
}

int cmd_filter_table(const std::string& config, std::optional<double> norm, std::optional<double> gap,
                     bool clamp, const std::string& domain, int points) {
  FilterParams p;
  if (!config.empty()) {
    p = load_run(config).params;
  } else {
    if (!norm || !gap) throw UsageError("filter-table needs --config or both --norm and --gap");
    try {
      p = default_params(*norm, *gap).with_clamp(clamp);
    } catch (const ContractViolation& e) {
      throw UsageError(e.what());
    }
  }
  if (clamp) p = p.with_clamp(true);
  std::fprintf(stderr, "a=%s delta_a=%s b=%s delta_b=%s S_s=%s tau_s=%s M_s=%d clamp=%d\n",
               format_double(p.a).c_str(), format_double(p.delta_a).c_str(), format_double(p.b).c_str(),
               format_double(p.delta_b).c_str(), format_double(p.S_s).c_str(), format_double(p.tau_s).c_str(),
               p.M_s, p.clamp_nonnegative ? 1 : 0);
  if (domain == "frequency") {
    if (points < 2) throw UsageError("--points must be at least 2");
    const double lo = -p.a - 4.0 * p.delta_a, hi = std::max(4.0 * p.delta_b, -p.b + 4.0 * p.delta_b);
    std::printf("omega,f_hat\n");
    for (int k = 0; k < points; ++k) {
      const double w = lo + (hi - lo) * k / (points - 1);
      std::printf("%s,%s\n", format_double(w).c_str(), format_double(f_hat(w, p)).c_str());
    }
  } else if (domain == "time") {
    const QuadratureGrid g = quadrature_grid(p);
    std::printf("l,s,weight,f_re,f_im\n");
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Complex f = f_time(g.nodes[k], p);
      std::printf("%d,%s,%s,%s,%s\n", static_cast<int>(k) - p.M_s, format_double(g.nodes[k]).c_str(),
                  format_double(g.weights[k]).c_str(), format_double(f.real()).c_str(),
                  format_double(f.imag()).c_str());
    }
  } else {
    throw UsageError("unknown domain \"" + domain + "\"; use frequency or time");
  }
  return kOk;
}

int cmd_jump_report(const std::string& file) {
  const LoadedRun run = load_run(file);
  const auto& prob = run.problem;
  const FilterParams open = run.params.with_clamp(false);
  const JumpOperator k = exact_jump(prob.spec, prob.A, open);
  const JumpOperator kc = exact_jump(prob.spec, prob.A, open.with_clamp(true));
  const JumpOperator ks = quadrature_jump(prob.spec, prob.A, open);
  const QuadratureStudy q = quadrature_study(prob, open);
  const auto& ch = run.config.channel;

  json j;
  j["name"] = run.config.name;
  j["model"] = model_json(run.config.model);
  j["hamiltonian"] = {{"dimension", prob.spec.dim()},
                      {"norm", prob.spec.norm()},
                      {"ground_energy", prob.spec.ground_energy()},
                      {"gap", prob.spec.gap},
                      {"ground_multiplicity", prob.spec.ground_multiplicity()}};
  j["filter"] = filter_json(run.params);
  j["filter"]["quadrature_l1"] = quadrature_l1(open);
  j["filter"]["f_hat_at_zero"] = f_hat(0.0, open);
  j["filter"]["f_hat_at_gap"] = f_hat(prob.spec.gap, open);
  j["coupling_norm"] = prob.A.norm();
  j["jump"] = {{"exact_norm", operator_norm(k.matrix)},
               {"quadrature_norm", operator_norm(ks.matrix)},
               {"exact_vs_quadrature", q.exact_vs_quadrature},
               {"relative_error", q.exact_vs_quadrature / q.coupling_norm},
               {"doubling_change", q.doubling_change}};
  j["ground_residual"] = {{"exact", ground_residual(k, prob.spec)},
                          {"exact_clamped", ground_residual(kc, prob.spec)},
                          {"quadrature", ground_residual(ks, prob.spec)},
                          {"circuit_frame", ground_residual(circuit_frame_jump(ks, prob.spec), prob.spec)}};
  j["circuit"] = {{"tau_eff", ch.tau_eff()},
                  {"cancellation_defect", cancellation_defect(prob, run.params, ch.tau_eff())},
                  {"hamiltonian_time_per_step", step_cost(run.params, ch).hamiltonian_time},
                  {"controlled_A_per_step", step_cost(run.params, ch).controlled_A_count}};
  std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lindground: ground-state preparation with Lindblad dynamics"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "simulate a configured instance and write CSV, manifest and plots");
  std::string run_config, output_dir;
  bool no_plots = false;
  run->add_option("config", run_config, "JSON run configuration")->required();
  run->add_option("--output-dir", output_dir, "directory for relative output paths");
  run->add_flag("--no-plots", no_plots, "skip SVG output");

  auto* verify = app.add_subcommand("verify", "run the built-in numerical checks");
  std::string level = "fast", fault, report;
  verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--inject-fault", fault, "deliberately break one component (quadrature-sign)");
  verify->add_option("--report", report, "write a JSON report to this file");

  auto* plot = app.add_subcommand("plot", "render one or more run CSV files as an SVG plot");
  std::vector<std::string> csvs, labels;
  std::string kind = "overlap-time", plot_out, title;
  plot->add_option("csv", csvs, "CSV files written by `run`")->required();
  plot->add_option("--kind", kind, "energy-time, overlap-time, energy-htime or overlap-htime");
  plot->add_option("-o,--output", plot_out, "SVG output file")->required();
  plot->add_option("--label", labels, "legend label, once per CSV");
  plot->add_option("--title", title, "plot title");

  auto* table = app.add_subcommand("filter-table", "tabulate the filter in frequency or time");
  std::string table_config, domain = "frequency";
  std::optional<double> norm, gap;
  bool clamp = false;
  int points = 201;
  table->add_option("--config", table_config, "take the filter from a run configuration");
  table->add_option("--norm", norm, "Hamiltonian norm for the default rule");
  table->add_option("--gap", gap, "spectral gap for the default rule");
  table->add_flag("--clamp", clamp, "zero the filter on non-negative frequencies");
  table->add_option("--domain", domain, "frequency or time");
  table->add_option("--points", points, "number of frequency samples");

  auto* jump = app.add_subcommand("jump-report", "print jump-operator diagnostics for a configuration as JSON");
  std::string jump_config;
  jump->add_option("config", jump_config, "JSON run configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(run_config, output_dir, no_plots);
    if (*verify) return cmd_verify(level, fault, report);
    if (*plot) return cmd_plot(csvs, kind, plot_out, labels, title);
    if (*table) return cmd_filter_table(table_config, norm, gap, clamp, domain, points);
    if (*jump) return cmd_jump_report(jump_config);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kUsage;
}
