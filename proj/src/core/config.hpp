#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "statics.hpp"
#include "types.hpp"

namespace memsdde {

// Flat run configuration: dimensionless model parameters (reference-device
// defaults), the physical parameters they were derived from, and solver knobs.
// Parsing is strict: unknown keys and malformed values are Config errors.
struct RunConfig {
  // dimensionless model
  double e = 9.9e-6;
  DampingKind damping = DampingKind::Linear;
  double c = 5.4e-3;
  double gamma = 3e-4;
  double g1 = 3e-4;
  double g2 = 0.37;
  double d = 0.0;
  double v0 = 20.0;
  double delta = 0.0;
  double omega = 1.0;  // drive frequency; T = 2 pi / omega
  std::vector<Harmonic> harmonics{{1, 1.0, 0.0}};

  // physical device (used by the statics command)
  PhysicalParams physical = PhysicalParams::defaults();

  // solver knobs
  double step = 0.0;    // 0: min(T, d)/64
  double t_end = 0.0;   // 0: 50 T
  int n_harmonics = 32;
  int floquet_m = 64;
  double newton_tol = 1e-10;
  int newton_max = 50;

  std::set<std::string> explicit_keys;

  bool is_explicit(const std::string& key) const { return explicit_keys.count(key) > 0; }

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_json_file(const std::string& path);

  // Applies a single "key=value" style override with the same validation as
  // the JSON path.
  void set_key(const std::string& key, const std::string& value);

  double period() const;
  VoltageProfile voltage() const;
  ActuatorParams actuator() const;

  // Dimensionless set used by the statics command: derived from the physical
  // parameters, with explicitly configured dimensionless keys taking over.
  struct StaticsInputs {
    DimensionlessSet dimensionless;
    double e_eff;
    double c_eff;
    double gamma_eff;
  };
  StaticsInputs statics_inputs() const;

  double effective_step() const;
  double effective_t_end() const;
};

}  // namespace memsdde
