#pragma once

#include <Eigen/Dense>
#include <string>

#include "oactl/system.hpp"

namespace oactl {

// Experiment-level settings carried alongside the system description.
struct ExperimentSettings {
  int horizon = 0;
  double delta = 0.0;
  Eigen::VectorXd x0;
  int objective_component = 1;  // 1-based state index maximized at time T
};

struct SystemConfig {
  DynamicalSystem system;
  ExperimentSettings experiment;
};

// Parses the line-oriented `key = value` config format with sections
// [system], [constraints], [experiment].  Numeric scalars and vector entries
// are constant expressions ("3.14 + 3.14/12" is a valid bound).  Dynamics are
// quoted expression strings over x1..x{n_x}, u1..u{n_u}.
SystemConfig parse_system_config(const std::string& text,
                                 const std::string& origin = "<string>");

// Reads `path` and parses it.  Throws InputError when the file is missing.
SystemConfig load_system_config(const std::string& path);

}  // namespace oactl
