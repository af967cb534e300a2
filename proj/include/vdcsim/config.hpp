#pragma once

#include <string>

#include "vdcsim/sim.hpp"
#include "vdcsim/zwidth.hpp"

namespace vdcsim {

/// Error in the configuration file (parse or validation).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Load an experiment description from a YAML file. Unknown model presets,
/// malformed matrices and inconsistent sections raise ConfigError; the
/// returned config has passed ExperimentConfig::validate().
ExperimentConfig load_config(const std::string& path);

/// Parse from a YAML string (used by tests and the loader).
ExperimentConfig parse_config(const std::string& yaml_text);

/// Sweep parameters from the same file's `zwidth` section (defaults apply
/// when the section is absent).
ZWidthParams load_zwidth_params(const std::string& path);
ZWidthParams parse_zwidth_params(const std::string& yaml_text);

/// Tabletop 3-revolute planar arm working in the horizontal x-y plane
/// (joints about +z, gravity orthogonal to the plane), uniform-rod bodies,
/// viscous joint friction. The default test model.
ChainModel planar_3r_model();

/// Home configuration for planar_3r_model: elbow bent, tip clear of the
/// orientation-representation singularity.
VecX planar_3r_home();

/// Fully-populated experiment built on the planar arm: adaptation on, a wall
/// across the y axis ahead of the start pose, quintic approach into sustained
/// contact with a wall-consistent desired force.
ExperimentConfig default_contact_experiment();

}  // namespace vdcsim
