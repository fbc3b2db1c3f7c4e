// Command-line front end. Every subcommand builds a JSON configuration and
// hands it to the shared library; `run` executes a configuration as is.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mslab/mslab.h"

using json = nlohmann::json;

namespace {

const char* const kSubcommands[] = {"build-operator", "weights-rh",    "weights-m",   "riesz-norms",
                                    "riesz-reverse",  "cz-run",        "gauge-check", "fp-check",
                                    "solutions-check"};

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid_n;
  std::optional<int> grid_N;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return json::parse(ss.str());
}

void apply_grid_override(json& target, const Options& o) {
  if (!o.grid_n && !o.grid_N) return;
  json& grid = target["grid"];
  if (!grid.is_object()) grid = json::object();
  if (o.grid_n) grid["n"] = *o.grid_n;
  if (o.grid_N) grid["N"] = *o.grid_N;
}

// Applies the command-line overrides to the top level and to every experiment.
void apply_overrides(json& config, const Options& o) {
  apply_grid_override(config, o);
  if (o.seed) config["seed"] = *o.seed;
  for (json& e : config["experiments"]) {
    if (e.contains("grid")) apply_grid_override(e, o);
    if (o.seed) e["seed"] = *o.seed;
  }
}

// Keeps the experiments of one type; without any, runs that type with defaults.
json restrict_to(json config, const std::string& type) {
  json kept = json::array();
  for (const json& e : config.value("experiments", json::array()))
    if (e.value("type", "") == type) kept.push_back(e);
  if (kept.empty()) kept.push_back({{"type", type}, {"name", type}});
  config["experiments"] = kept;
  return config;
}

std::string output_dir(const Options& o, const json& config) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv("MSLAB_OUT_DIR"); env && *env) return env;
  return config.value("output_dir", "results");
}

class Session {
 public:
  Session() {
    if (mslab_context_create(&ctx_) != MSLAB_OK) throw std::runtime_error("cannot create context");
  }
  ~Session() { mslab_context_destroy(ctx_); }
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  int fail(mslab_status s) const {
    std::fprintf(stderr, "mslab: %s: %s\n", mslab_status_name(s), mslab_last_error(ctx_));
    return 2;
  }

  int run(const json& config, const std::string& dir) {
    int exit_code = 0;
    const mslab_status s = mslab_run(ctx_, config.dump().c_str(), dir.c_str(), &exit_code);
    if (s != MSLAB_OK) return fail(s);
    if (exit_code != 0) std::fprintf(stderr, "mslab: experiment failed: %s\n", mslab_last_error(ctx_));
    std::printf("results written to %s\n", dir.c_str());
    return exit_code;
  }

  int report(const std::string& dir) {
    char* summary = nullptr;
    const mslab_status s = mslab_report(ctx_, dir.c_str(), &summary);
    if (s != MSLAB_OK) return fail(s);
    std::printf("%s\n", summary);
    mslab_string_free(summary);
    return 0;
  }

 private:
  mslab_context* ctx_ = nullptr;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out_dir, "output directory (overrides MSLAB_OUT_DIR and the config)");
  cmd->add_option("--seed", o.seed, "seed for every experiment");
  cmd->add_option("--grid-n", o.grid_n, "spatial dimension (2 or 3)");
  cmd->add_option("--grid-N", o.grid_N, "grid points per axis (power of two, 8..128)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for magnetic Schrödinger operators"};
  app.set_version_flag("--version", std::string(mslab_version()));
  app.require_subcommand(1);
  Options o;

  CLI::App* run_cmd = app.add_subcommand("run", "run every experiment of a configuration");
  add_common(run_cmd, o);
  for (const char* name : kSubcommands) add_common(app.add_subcommand(name, std::string("run ") + name + " experiments"), o);
  CLI::App* report_cmd = app.add_subcommand("report", "verify and summarise a results directory");
  add_common(report_cmd, o);

  CLI11_PARSE(app, argc, argv);

  try {
    Session session;
    json config = load_config(o.config_path);
    if (!config.contains("experiments")) config["experiments"] = json::array();
    apply_overrides(config, o);
    const std::string dir = output_dir(o, config);
    if (report_cmd->parsed()) return session.report(dir);
    if (run_cmd->parsed()) return session.run(config, dir);
    for (const char* name : kSubcommands)
      if (app.got_subcommand(name)) return session.run(restrict_to(config, name), dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mslab: %s\n", e.what());
    return 2;
  }
  return 2;
}
