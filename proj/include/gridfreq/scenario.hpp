#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gridfreq/comm.hpp"
#include "gridfreq/control.hpp"
#include "gridfreq/dynamics.hpp"
#include "gridfreq/grid.hpp"

namespace gridfreq {

/// A complete experiment description. Node and line IDs are 1-based in the
/// file and 0-based here.
struct Scenario {
  std::string name;
  GridSpec grid;
  std::vector<Perturbation> perturbations;
  ControllerSpec controller;
  CommGraph comm;  // mirrors the power lines unless the file says otherwise
  SimConfig sim;
};

/// Parses scenario YAML text. Throws Parse (with line numbers where the YAML
/// layer provides them) or Validation naming the violated invariant.
Scenario parse_scenario(const std::string& text);

Scenario load_scenario(const std::filesystem::path& path);

/// Serializes every field explicitly, at full double precision.
std::string write_scenario(const Scenario& scenario);

}  // namespace gridfreq
