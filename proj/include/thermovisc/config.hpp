/// @file config.hpp
/// @brief INI-style run configuration: parsing, validation, serialization.
///
/// Sections: [mesh] [material] [potential] [initial] [sources] [time] [mode] [tolerances] [output] [study].
/// Field presets use the syntax of sources.hpp, e.g. `g = gaussian 1 0.2 0.5`.
#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermovisc/convergence.hpp"
#include "thermovisc/material.hpp"
#include "thermovisc/mesh.hpp"
#include "thermovisc/sources.hpp"
#include "thermovisc/stepper.hpp"

namespace thermovisc {

struct StudyConfig {
  std::string kind = "tau";  // tau | delta | regularization
  int levels = 5;
  std::vector<double> deltas{1e-1, 1e-2, 1e-3, 0.0};
  std::vector<double> nus{1e-2, 1e-3, 1e-4};
  std::vector<double> Ms;
};

struct RunConfig {
  MeshSpec mesh;
  MaterialParams mp;
  PotentialW pot;
  Preset theta0{"constant", {1.0}};
  Preset chi0{"constant", {1.0}};
  std::array<Preset, 2> u0{Preset{"constant", {0.0}}, Preset{"constant", {0.0}}};
  std::array<Preset, 2> v0{Preset{"constant", {0.0}}, Preset{"constant", {0.0}}};
  std::array<Preset, 2> f{Preset{"constant", {0.0}}, Preset{"constant", {0.0}}};
  Preset g{"constant", {0.0}};
  Preset h{"constant", {0.0}};
  double T = 1.0;
  double tau = 1.0 / 64.0;
  SchemeOptions opts;
  std::string output_dir = "output";
  int snapshot_every = 16;
  StudyConfig study;
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> v);
  std::vector<std::string> violations;
};

/// Parses and validates; throws ConfigError listing every violation.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// All violated conditions by name; empty means valid.
std::vector<std::string> validate_config(const RunConfig& c);
std::string config_to_text(const RunConfig& c);

Problem build_problem(const RunConfig& c);
State initial_state(const RunConfig& c, const Mesh& m);
Sources make_sources(const RunConfig& c);
RunSetup make_run_setup(const RunConfig& c);

/// Output directory after the THERMOVISC_OUTPUT_DIR override.
std::string resolve_output_dir(const RunConfig& c);

}  // namespace thermovisc
