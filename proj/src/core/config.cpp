#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace memsdde {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double as_number(const json& j, const std::string& key) {
  if (!j.is_number()) fail(ErrorCode::Config, "key '" + key + "' must be a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) fail(ErrorCode::Config, "key '" + key + "' must be an integer");
  return j.get<int>();
}

void check_positive(double v, const std::string& key) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::Config, "key '" + key + "' must be > 0");
}

void check_nonnegative(double v, const std::string& key) {
  if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::Config, "key '" + key + "' must be >= 0");
}

void apply(RunConfig& cfg, const std::string& key, const json& value) {
  if (key == "e") {
    cfg.e = as_number(value, key);
    check_positive(cfg.e, key);
  } else if (key == "damping") {
    if (!value.is_string()) fail(ErrorCode::Config, "key 'damping' must be a string");
    const std::string s = value.get<std::string>();
    if (s == "linear")
      cfg.damping = DampingKind::Linear;
    else if (s == "squeeze")
      cfg.damping = DampingKind::SqueezeFilm;
    else
      fail(ErrorCode::Config, "key 'damping' must be 'linear' or 'squeeze'");
  } else if (key == "c") {
    cfg.c = as_number(value, key);
    check_nonnegative(cfg.c, key);
  } else if (key == "gamma") {
    cfg.gamma = as_number(value, key);
    check_nonnegative(cfg.gamma, key);
  } else if (key == "g1") {
    cfg.g1 = as_number(value, key);
  } else if (key == "g2") {
    cfg.g2 = as_number(value, key);
  } else if (key == "d") {
    cfg.d = as_number(value, key);
    check_nonnegative(cfg.d, key);
  } else if (key == "v0") {
    cfg.v0 = as_number(value, key);
    check_positive(cfg.v0, key);
  } else if (key == "delta") {
    cfg.delta = as_number(value, key);
    check_nonnegative(cfg.delta, key);
  } else if (key == "omega") {
    cfg.omega = as_number(value, key);
    check_positive(cfg.omega, key);
  } else if (key == "harmonics") {
    if (!value.is_array()) fail(ErrorCode::Config, "key 'harmonics' must be an array");
    std::vector<Harmonic> hs;
    for (const auto& row : value) {
      if (!row.is_array() || row.size() != 3)
        fail(ErrorCode::Config, "each harmonic must be [k, cos, sin]");
      Harmonic h{};
      h.k = as_int(row[0], "harmonics[].k");
      if (h.k < 1) fail(ErrorCode::Config, "harmonic index k must be >= 1");
      h.cos_coeff = as_number(row[1], "harmonics[].cos");
      h.sin_coeff = as_number(row[2], "harmonics[].sin");
      hs.push_back(h);
    }
    cfg.harmonics = std::move(hs);
  } else if (key == "m") {
    cfg.physical.mass = as_number(value, key);
    check_positive(cfg.physical.mass, key);
  } else if (key == "l") {
    cfg.physical.gap = as_number(value, key);
    check_positive(cfg.physical.gap, key);
  } else if (key == "A") {
    cfg.physical.area = as_number(value, key);
    check_positive(cfg.physical.area, key);
  } else if (key == "k") {
    cfg.physical.stiffness = as_number(value, key);
    check_positive(cfg.physical.stiffness, key);
  } else if (key == "xi") {
    cfg.physical.damping = as_number(value, key);
    check_nonnegative(cfg.physical.damping, key);
  } else if (key == "epsilon") {
    cfg.physical.permittivity = as_number(value, key);
    check_positive(cfg.physical.permittivity, key);
  } else if (key == "Gt1") {
    cfg.physical.gain_pos = as_number(value, key);
    check_positive(cfg.physical.gain_pos, key);
  } else if (key == "Gt2") {
    cfg.physical.gain_vel = as_number(value, key);
    check_positive(cfg.physical.gain_vel, key);
  } else if (key == "step") {
    cfg.step = as_number(value, key);
    check_nonnegative(cfg.step, key);
  } else if (key == "t_end") {
    cfg.t_end = as_number(value, key);
    check_nonnegative(cfg.t_end, key);
  } else if (key == "n_harmonics") {
    cfg.n_harmonics = as_int(value, key);
    if (cfg.n_harmonics < 1 || cfg.n_harmonics > 512)
      fail(ErrorCode::Config, "key 'n_harmonics' must be in [1, 512]");
  } else if (key == "floquet_m") {
    cfg.floquet_m = as_int(value, key);
    if (cfg.floquet_m < 2 || cfg.floquet_m > 1024)
      fail(ErrorCode::Config, "key 'floquet_m' must be in [2, 1024]");
  } else if (key == "newton_tol") {
    cfg.newton_tol = as_number(value, key);
    check_positive(cfg.newton_tol, key);
  } else if (key == "newton_max") {
    cfg.newton_max = as_int(value, key);
    if (cfg.newton_max < 1) fail(ErrorCode::Config, "key 'newton_max' must be >= 1");
  } else {
    fail(ErrorCode::Config, "unknown configuration key '" + key + "'");
  }
  cfg.explicit_keys.insert(key);
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, std::string("configuration is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::Config, "configuration must be a JSON object");
  RunConfig cfg;
  for (const auto& [key, value] : doc.items()) apply(cfg, key, value);
  return cfg;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Config, "cannot open configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void RunConfig::set_key(const std::string& key, const std::string& value) {
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    // treat bare words (e.g. damping names) as strings
    parsed = value;
  }
  apply(*this, key, parsed);
}

double RunConfig::period() const { return kTwoPi / omega; }

VoltageProfile RunConfig::voltage() const {
  if (delta == 0.0) return VoltageProfile::dc(v0, period());
  return VoltageProfile(v0, delta, harmonics, period());
}

ActuatorParams RunConfig::actuator() const {
  const DampingModel dm = damping == DampingKind::Linear ? DampingModel::linear(c)
                                                         : DampingModel::squeeze(gamma);
  ActuatorParams p{e, dm, g1, g2, d, voltage()};
  p.validate();
  return p;
}

RunConfig::StaticsInputs RunConfig::statics_inputs() const {
  StaticsInputs out{nondimensionalize(physical), 0.0, 0.0, 0.0};
  out.e_eff = is_explicit("e") ? e : out.dimensionless.e;
  out.c_eff = is_explicit("c") ? c : out.dimensionless.c;
  out.gamma_eff = gamma;
  return out;
}

double RunConfig::effective_step() const {
  if (step > 0.0) return step;
  const double T = period();
  return (d > 0.0 ? std::min(T, d) : T) / 64.0;
}

double RunConfig::effective_t_end() const { return t_end > 0.0 ? t_end : 50.0 * period(); }

}  // namespace memsdde
