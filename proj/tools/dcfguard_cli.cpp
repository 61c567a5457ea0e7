// dcfguard: run scenarios, presets, sweeps and analytic tables, writing CSV.
//
// Exit codes: 0 ok, 1 usage, 2 configuration error, 3 runtime error,
// 4 internal consistency check failed.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dcfguard/dcfguard.hpp"

namespace fs = std::filesystem;
using namespace dcfguard;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kRuntime = 3, kAssertion = 4 };

struct AssertionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> measurement_mode;
  bool no_policing = false;

  void apply(ScenarioConfig& cfg) const {
    if (seed) cfg.seed = *seed;
    if (measurement_mode) {
      try {
        cfg.measurement_mode = parse_measurement_mode(*measurement_mode);
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
    }
    if (no_policing) cfg.policing = false;
  }
};

fs::path default_out_dir() {
  if (const char* env = std::getenv("DCFGUARD_OUT_DIR"); env && *env) return env;
  return ".";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  std::cout << path.string() << '\n';
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

// "1,2,5" or "1..10"
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  try {
    if (const auto dots = text.find(".."); dots != std::string::npos) {
      const auto lo = std::stoull(text.substr(0, dots));
      const auto hi = std::stoull(text.substr(dots + 2));
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      for (const auto& s : split(text, ',')) out.push_back(std::stoull(s));
    }
  } catch (const std::logic_error&) {
    throw ConfigError("bad seed list '" + text + "'");
  }
  return out;
}

SimTrace checked_run(const ScenarioConfig& cfg) {
  SimTrace trace = run(cfg);
  const auto again = summarise(trace.rows, cfg.controller.update_period_s, cfg.phy());
  if (again.size() != trace.summary.size())
    throw AssertionFailure("summary does not match trace rows for run '" + cfg.name + "'");
  for (std::size_t i = 0; i < again.size(); ++i)
    if (again[i].station_id != trace.summary[i].station_id || again[i].windows != trace.summary[i].windows ||
        csv::number(again[i].goodput_bps) != csv::number(trace.summary[i].goodput_bps) ||
        csv::number(again[i].mean_attempt_rate) != csv::number(trace.summary[i].mean_attempt_rate))
      throw AssertionFailure("summary does not match trace rows for run '" + cfg.name + "'");
  return trace;
}

std::string trace_csv(const SimTrace& t) {
  std::ostringstream s;
  write_trace_csv(s, t);
  return s.str();
}

void run_and_write(const std::vector<PresetRun>& runs, const fs::path& out_dir, const std::string& summary_name) {
  std::vector<std::pair<std::string, SimTrace>> done;
  for (const auto& r : runs) {
    SimTrace t = checked_run(r.config);
    write_file(out_dir / (r.name + ".trace.csv"), trace_csv(t));
    done.emplace_back(r.name, std::move(t));
  }
  std::ostringstream s;
  write_summary_csv(s, done);
  write_file(out_dir / (summary_name + ".summary.csv"), s.str());
}

void write_sweep(const ScenarioConfig& base, const SweepSpec& spec, const fs::path& out_dir, const std::string& stem) {
  const SweepResult r = run_sweep(base, spec);
  write_file(out_dir / (stem + ".rows.csv"), sweep_rows_table(spec.axis, r).str());
  write_file(out_dir / (stem + ".summary.csv"), sweep_aggregate_table(spec.axis, r).str());
}

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ACK-suppression policing for 802.11 DCF: simulator and analytics"};
  app.require_subcommand(1);

  std::string out_dir_arg;
  Overrides ov;
  std::uint64_t seed_value = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out-dir", out_dir_arg, "Output directory (default $DCFGUARD_OUT_DIR or .)");
    sub->add_option("--seed", seed_value, "Random seed")->each([&](const std::string&) { ov.seed = seed_value; });
    sub->add_option_function<std::string>(
           "--measurement-mode", [&](const std::string& m) { ov.measurement_mode = m; }, "oracle or realistic")
        ->check(CLI::IsMember({"oracle", "realistic"}));
    sub->add_flag("--no-policing", ov.no_policing, "Disable the controller");
  };

  std::string scenario_file;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario file");
  run_cmd->add_option("scenario", scenario_file, "Scenario YAML file")->required();
  add_common(run_cmd);

  std::string preset_name;
  unsigned workers = default_workers();
  auto* preset_cmd = app.add_subcommand("preset", "Run a named experiment preset");
  preset_cmd->add_option("name", preset_name, "Preset name")->required();
  preset_cmd->add_option("--workers", workers, "Concurrent sweep points");
  add_common(preset_cmd);
  auto* list_cmd = app.add_subcommand("list-presets", "Print preset names");

  std::string axis;
  std::string values;
  std::string seeds = "1";
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter of a scenario file");
  sweep_cmd->add_option("scenario", scenario_file, "Scenario YAML file")->required();
  sweep_cmd->add_option("--axis", axis, "Parameter path")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
  sweep_cmd->add_option("--seeds", seeds, "Comma-separated seeds or lo..hi");
  sweep_cmd->add_option("--workers", workers, "Concurrent sweep points");
  add_common(sweep_cmd);

  std::string curve;
  auto* analytics_cmd = app.add_subcommand("analytics", "Emit an analytic table");
  analytics_cmd->add_option("curve", curve, "fig3, fig6, fig7 or robustness")
      ->required()
      ->check(CLI::IsMember({"fig3", "fig6", "fig7", "robustness"}));
  analytics_cmd->add_option("--out-dir", out_dir_arg, "Output directory (default $DCFGUARD_OUT_DIR or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  const fs::path out_dir = out_dir_arg.empty() ? default_out_dir() : fs::path(out_dir_arg);
  try {
    if (*list_cmd) {
      for (const auto& n : preset_names()) std::cout << n << '\n';
    } else if (*run_cmd) {
      ScenarioConfig cfg = parse_scenario(read_file(scenario_file));
      ov.apply(cfg);
      run_and_write({{cfg.name, cfg}}, out_dir, cfg.name);
    } else if (*preset_cmd) {
      PresetPlan plan = make_preset(preset_name, ov.seed.value_or(1), workers);
      for (auto& r : plan.runs) ov.apply(r.config);
      if (!plan.runs.empty()) run_and_write(plan.runs, out_dir, plan.name);
      if (plan.sweep) {
        Overrides sweep_ov = ov;
        sweep_ov.seed.reset();  // seeds come from the sweep's own list
        sweep_ov.apply(plan.sweep->base);
        write_sweep(plan.sweep->base, plan.sweep->spec, out_dir, plan.name);
      }
      if (plan.table) write_file(out_dir / (plan.name + ".csv"), plan.table->str());
    } else if (*sweep_cmd) {
      ScenarioConfig cfg = parse_scenario(read_file(scenario_file));
      ov.apply(cfg);
      SweepSpec spec{axis, split(values, ','), parse_seeds(seeds), workers};
      write_sweep(cfg, spec, out_dir, cfg.name + "-" + axis);
    } else if (*analytics_cmd) {
      const PresetPlan plan = make_preset(curve, 1);
      write_file(out_dir / (curve + ".csv"), plan.table->str());
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const AssertionFailure& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return kAssertion;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
