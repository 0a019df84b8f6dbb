#pragma once

#include <cstdint>
#include <string>

#include "nac/control.hpp"
#include "nac/instances.hpp"
#include "nac/mlp.hpp"
#include "nac/sim.hpp"
#include "nac/sweep.hpp"

namespace nac {

// Everything the CLI can tune, with built-in defaults. Precedence:
// command-line flag > config file > default.
struct AppConfig {
  std::uint64_t seed = 0;
  int instance_count = 150;
  int workers = 0;

  DataGenOptions datagen;
  MlpConfig mlp;

  ControlGains gains_manipulator;
  ControlGains gains_unicycle;
  ControlGains gains_pendulum;

  IntegrationDefaults integ_manipulator = integration_defaults(PlantKind::Manipulator);
  IntegrationDefaults integ_unicycle = integration_defaults(PlantKind::Unicycle);
  IntegrationDefaults integ_pendulum = integration_defaults(PlantKind::Pendulum);

  double diag_ceiling = 50.0;  // growth-bound slope flag threshold

  const ControlGains& gains(PlantKind k) const {
    switch (k) {
      case PlantKind::Manipulator: return gains_manipulator;
      case PlantKind::Unicycle: return gains_unicycle;
      case PlantKind::Pendulum: return gains_pendulum;
    }
    return gains_manipulator;
  }
  const IntegrationDefaults& integration(PlantKind k) const {
    switch (k) {
      case PlantKind::Manipulator: return integ_manipulator;
      case PlantKind::Unicycle: return integ_unicycle;
      case PlantKind::Pendulum: return integ_pendulum;
    }
    return integ_manipulator;
  }

  std::string to_json() const;
  // fields present in the file override the defaults; unknown keys error
  static AppConfig from_json(const std::string& text);
};

}  // namespace nac
