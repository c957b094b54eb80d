#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fdcancel/config.hpp"
#include "fdcancel/errors.hpp"
#include "fdcancel/experiments.hpp"
#include "fdcancel/version.hpp"

namespace fs = std::filesystem;
using namespace fdcancel;

namespace {

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

struct RunFlags {
  std::string preset;
  std::string config;
  std::string out_dir = ".";
  std::string seeds;
  int symbols = 0;
  double mu = 0.0;
  int jobs = 0;
};

experiments::ScenarioPreset load_preset(const RunFlags& f, const CLI::App* cmd) {
  // not every subcommand carries every flag
  auto given = [cmd](const std::string& name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  experiments::ScenarioPreset p;
  if (given("--preset") && given("--config"))
    throw ConfigError("give either --preset or --config, not both");
  if (given("--preset"))
    p = experiments::preset_by_name(f.preset);
  else if (given("--config"))
    p = config::load_file(f.config);
  else
    throw ConfigError("needs --preset <name> or --config <file>");

  if (given("--seeds")) {
    p.seeds.clear();
    std::istringstream in(f.seeds);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (item.empty()) continue;
      try {
        size_t pos = 0;
        p.seeds.push_back(std::stoull(item, &pos));
        if (pos != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError("bad seed: " + item);
      }
    }
    if (p.seeds.empty()) throw ConfigError("--seeds list is empty");
  }
  if (given("--symbols")) {
    if (f.symbols <= 0) throw ConfigError("--symbols must be > 0");
    p.ofdm.num_symbols = f.symbols;
  }
  if (given("--mu")) {
    if (!(f.mu > 0.0 && f.mu < 2.0)) throw ConfigError("--mu must be in (0, 2)");
    p.step_size = f.mu;
  }
  if (given("--jobs")) {
    if (f.jobs < 0) throw ConfigError("--jobs must be >= 0");
    p.jobs = f.jobs;
  }
  experiments::validate(p);
  return p;
}

int do_run(const RunFlags& f, const CLI::App* cmd) {
  const experiments::ScenarioPreset p = load_preset(f, cmd);
  const experiments::SweepResult res = experiments::run_scenario(p);

  fs::create_directories(f.out_dir);
  const fs::path csv_path = fs::path(f.out_dir) / (p.name + ".csv");
  const fs::path man_path = fs::path(f.out_dir) / (p.name + ".manifest.json");
  std::ostringstream csv;
  experiments::write_csv(res, csv);
  write_file_atomic(csv_path, csv.str());
  write_file_atomic(man_path, config::manifest_text(res, csv_path.filename().string()));

  size_t live_rows = 0;
  for (const experiments::SweepRow& row : res.rows)
    if (std::isfinite(row.residual_dbm_mean)) ++live_rows;
  std::cout << "wrote " << csv_path.string() << " and " << man_path.string()
            << " (" << res.rows.size() << " rows, " << res.preset.seeds.size()
            << " seeds, " << res.wall_seconds << " s)\n";
  if (live_rows == 0) {
    std::cerr << "error: the adaptive filter diverged at every sweep point\n";
    return 3;
  }
  if (live_rows < res.rows.size())
    std::cerr << "warning: " << (res.rows.size() - live_rows)
              << " rows diverged and carry no residual\n";
  return 0;
}

int do_theory(const RunFlags& f, const CLI::App* cmd) {
  const experiments::ScenarioPreset p = load_preset(f, cmd);
  const std::vector<experiments::TheoryRow> rows = experiments::theory_overlay(p);
  std::ostringstream csv;
  experiments::write_theory_csv(rows, csv);
  if (cmd->count("--out")) {
    fs::create_directories(f.out_dir);
    const fs::path path = fs::path(f.out_dir) / (p.name + ".theory.csv");
    write_file_atomic(path, csv.str());
    std::cout << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
  } else {
    std::cout << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Baseband simulator for full-duplex self-interference cancellation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunFlags rf;
  CLI::App* run = app.add_subcommand("run", "Run a sweep and write CSV + manifest");
  run->add_option("--preset", rf.preset, "Built-in scenario name");
  run->add_option("--config", rf.config, "Config file or run manifest");
  run->add_option("--out", rf.out_dir, "Output directory (default .)");
  run->add_option("--seeds", rf.seeds, "Comma-separated seeds override");
  run->add_option("--symbols", rf.symbols, "Frame length override in symbols");
  run->add_option("--mu", rf.mu, "Adaptation step size override");
  run->add_option("--jobs", rf.jobs, "Worker threads (0 = all cores)");

  RunFlags tf;
  CLI::App* theory = app.add_subcommand(
      "theory", "Closed-form residual table for a delay-sweep scenario");
  theory->add_option("--preset", tf.preset, "Built-in scenario name");
  theory->add_option("--config", tf.config, "Config file or run manifest");
  theory->add_option("--out", tf.out_dir, "Write CSV here instead of stdout");

  CLI::App* list = app.add_subcommand("list-presets", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return do_run(rf, run);
    if (theory->parsed()) return do_theory(tf, theory);
    if (list->parsed()) {
      for (const std::string& name : experiments::preset_names())
        std::cout << name << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NotApplicableError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
