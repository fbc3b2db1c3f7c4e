#pragma once

// JSON configuration: grid, scenario, seed and the experiment list.
//
// {
//   "grid": {"n": 2, "N": 16, "L": 1.0},
//   "scenario": "constant_field" | {"name": "constant_field", "w0": 8, "potential": {...}},
//   "seed": 0,
//   "output_dir": "results",
//   "experiments": [{"type": "riesz-norms", "name": "...", ...parameters}]
// }
//
// Each experiment may override "grid", "scenario" and "seed".

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenario.hpp"

namespace mslab {

using json = nlohmann::json;

// Names understood by scenario_from_json.
const std::vector<std::string>& scenario_catalog();

Scenario scenario_from_json(const json& j);
json scenario_to_json(const Scenario& s);

GridSpec grid_from_json(const json& j);
json grid_to_json(const GridSpec& g);

// Experiment types, in the order of the CLI subcommands.
const std::vector<std::string>& experiment_types();

struct ExperimentConfig {
  std::string type;
  std::string name;
  GridSpec grid;
  Scenario scenario;
  std::uint64_t seed = 0;
  json params;  // the raw experiment object
};

struct Config {
  GridSpec grid;
  Scenario scenario;
  std::uint64_t seed = 0;
  std::string output_dir = "results";
  std::vector<ExperimentConfig> experiments;
};

// Validates every experiment (types, scenarios, grids) before anything runs.
Config parse_config(const json& j);

}  // namespace mslab
