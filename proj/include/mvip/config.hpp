#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mvip/actuator_design.hpp"
#include "mvip/actuator_field.hpp"
#include "mvip/control.hpp"
#include "mvip/core.hpp"
#include "mvip/errors.hpp"
#include "mvip/sensing.hpp"

namespace mvip {

/// FNV-1a 64-bit over raw bytes; stamps configs into trace manifests.
inline std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Per-scenario knobs; every value here is adjustable from the config file.
struct ScenarioConfig {
  struct Levitate {
    double duration = 20.0;                       // s
    Vec3 start_offset = Vec3(1e-3, 1e-3, -2e-3);  // m
    Vec3 start_euler = Vec3(5e-3, -5e-3, 5e-3);   // rad
    double settle_fraction = 0.02;                // of the start offset norm
  } levitate;
  struct Contour {
    double diameter = 6e-3;     // m
    double frequency_hz = 0.1;
    double duration = 40.0;     // s
    double discard = 15.0;      // s dropped before error statistics
  } contour;
  struct Sweep {
    double freq_start_hz = 0.1;
    double freq_end_hz = 50.0;
    double accel_amplitude = 0.012;  // m/s^2
    double duration = 300.0;         // s
    int axis = 0;                    // 0=x, 1=y, 2=z
    bool controller_enabled = true;
  } sweep;
  struct Identify {
    double coupling_perturbation = 0.05;
    double seconds_per_axis = 6.0;
    double amp_translation = 1.2e-3;  // m
    double amp_rotation = 5e-3;       // rad
    double freq_start_hz = 1.0;
    double freq_end_hz = 8.0;
    double accel_noise_rel = 0.0;     // relative accel noise for the estimator
    double probe_wrench = 1.0;        // N (and N*m) for the rectification probe
  } identify;
  struct AllocCompare {
    double duration = 1.0;  // s of shared command profile at the control rate
  } alloc_compare;
  struct Design {
    DesignEnvelope envelope;
    DesignWeights weights;
    DesignBudget budget;
    std::vector<DesignBound> bounds;  // empty selects the default search box
  } design;
};

/// Everything the harness needs to run: plant truth, controller model,
/// sensing chain and scenario parameters.
struct HarnessConfig {
  PlatformGeometry geometry;
  SensorSuite sensors;
  FieldGroundTruth field;
  double field_fit_order = 3;
  double calibration_spacing = 1e-3;     // m
  double calibration_noise_rms = 0.0;    // N/A

  std::array<ControllerGains, 6> gains;  // x, y, z, rot-x, rot-y, rot-z
  double velocity_filter_pole = 2.0 * M_PI * 80.0;  // rad/s
  double sample_period = 5e-4;           // s
  int plant_substeps = 4;
  double current_limit = 2.0;            // A

  // Plant-truth multipliers relative to the controller's model.
  double plant_mass_scale = 1.0;
  double plant_stiffness_scale = 1.0;
  double plant_gain_scale = 1.0;

  int trace_decimation = 10;
  ScenarioConfig scenario;

  DesignParams design_params;  // base point for the design scenario

  HarnessConfig() {
    geometry.cable_stiffness << 50, 50, 50, 2, 2, 2;
    geometry.cable_damping << 1, 1, 1, 0.02, 0.02, 0.02;
    Mat3 j = Mat3::Zero();
    j.diagonal() << 0.12, 0.12, 0.22;
    geometry.inertia = j;

    const ControllerGains trans{};  // tuned for the 8 kg default
    gains[0] = gains[1] = gains[2] = trans;
    auto scaled = [&](double inertia) {
      ControllerGains g = trans;
      const double k = inertia / geometry.mass;
      g.kp *= k; g.ki *= k; g.kd *= k; g.ka *= k;
      return g;
    };
    gains[3] = scaled(0.12);
    gains[4] = scaled(0.12);
    gains[5] = scaled(0.22);
  }

  /// The plant's actual parameters (mismatch multipliers applied).
  PlatformGeometry plant_geometry() const {
    PlatformGeometry g = geometry;
    g.mass *= plant_mass_scale;
    g.inertia *= plant_mass_scale;
    g.cable_stiffness *= plant_stiffness_scale;
    g.cable_damping *= plant_stiffness_scale;
    return g;
  }

  void validate() const {
    geometry.validate();
    sensors.validate();
    if (!(sample_period > 0.0)) throw Config("sample period must be positive");
    if (plant_substeps < 1) throw Config("plant substeps must be >= 1");
    if (!(current_limit > 0.0)) throw Config("current limit must be positive");
    if (trace_decimation < 1) throw Config("trace decimation must be >= 1");
    const double inertias[6] = {geometry.mass, geometry.mass, geometry.mass,
                                geometry.inertia(0, 0), geometry.inertia(1, 1),
                                geometry.inertia(2, 2)};
    for (int i = 0; i < 6; ++i) gains[static_cast<size_t>(i)].validate(inertias[i]);
    if (!(velocity_filter_pole > 0.0))
      throw Config("velocity filter pole must be positive");
  }
};

namespace detail {

class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in) {
    KeyValueFile kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      size_t eq = line.find('=');
      if (eq == std::string::npos) {
        if (line.find_first_not_of(" \t\r") != std::string::npos)
          throw Config("config line " + std::to_string(lineno) + " has no '='");
        continue;
      }
      auto trim = [](std::string s) {
        const size_t a = s.find_first_not_of(" \t\r");
        const size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw Config("config line " + std::to_string(lineno) + " has empty key");
      kv.values_[key] = value;
    }
    return kv;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double number(const std::string& key, double fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    seen_.insert(it->first);
    try {
      size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw Config("config key '" + key + "' is not a number: " + it->second);
    }
  }

  bool boolean(const std::string& key, bool fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    seen_.insert(it->first);
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw Config("config key '" + key + "' is not a boolean: " + it->second);
  }

  std::vector<double> numbers(const std::string& key, size_t count,
                              const std::vector<double>& fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    seen_.insert(it->first);
    std::istringstream ss(it->second);
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    if (out.size() != count)
      throw Config("config key '" + key + "' needs " + std::to_string(count) +
                   " numbers");
    return out;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    seen_.insert(it->first);
    return it->second;
  }

  void reject_unknown_keys() const {
    for (const auto& [key, value] : values_)
      if (seen_.count(key) == 0)
        throw Config("unknown config key '" + key + "'");
  }

  /// Keys with a given prefix, for repeated entries such as design bounds.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [key, value] : values_)
      if (key.rfind(prefix, 0) == 0) out.push_back(key);
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> seen_;
};

inline void load_gain_group(KeyValueFile& kv, const std::string& prefix,
                            ControllerGains& g) {
  g.kp = kv.number(prefix + ".kp", g.kp);
  g.ki = kv.number(prefix + ".ki", g.ki);
  g.kd = kv.number(prefix + ".kd", g.kd);
  g.deriv_pole = kv.number(prefix + ".deriv_pole_rad_s", g.deriv_pole);
  g.ka = kv.number(prefix + ".ka", g.ka);
  g.bp_wn = kv.number(prefix + ".bp_center_rad_s", g.bp_wn);
  g.bp_xi = kv.number(prefix + ".bp_span", g.bp_xi);
  g.setpoint_lowpass_hz = kv.number(prefix + ".setpoint_lowpass_hz", g.setpoint_lowpass_hz);
}

}  // namespace detail

inline HarnessConfig load_config(std::istream& in) {
  auto kv = detail::KeyValueFile::parse(in);
  HarnessConfig c;

  auto vec3 = [&](const std::string& key, const Vec3& def) {
    const auto v = kv.numbers(key, 3, {def.x(), def.y(), def.z()});
    return Vec3(v[0], v[1], v[2]);
  };
  auto vec6 = [&](const std::string& key, const Vec6& def) {
    std::vector<double> d(def.data(), def.data() + 6);
    const auto v = kv.numbers(key, 6, d);
    Vec6 out;
    for (int i = 0; i < 6; ++i) out(i) = v[static_cast<size_t>(i)];
    return out;
  };

  auto& g = c.geometry;
  g.l1 = kv.number("geometry.l1_m", g.l1);
  g.l2 = kv.number("geometry.l2_m", g.l2);
  g.d1 = kv.number("geometry.d1_m", g.d1);
  g.d2 = kv.number("geometry.d2_m", g.d2);
  g.d3 = kv.number("geometry.d3_m", g.d3);
  g.mass = kv.number("geometry.mass_kg", g.mass);
  if (kv.has("geometry.inertia_kgm2")) {
    const auto v = kv.numbers("geometry.inertia_kgm2", 9, {});
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) g.inertia(r, col) = v[static_cast<size_t>(3 * r + col)];
  } else {
    const auto v = kv.numbers("geometry.inertia_diag_kgm2", 3,
                              {g.inertia(0, 0), g.inertia(1, 1), g.inertia(2, 2)});
    g.inertia = Mat3::Zero();
    g.inertia.diagonal() << v[0], v[1], v[2];
  }
  g.cable_stiffness = vec6("geometry.cable_stiffness", g.cable_stiffness);
  g.cable_damping = vec6("geometry.cable_damping", g.cable_damping);
  g.gravity = kv.number("geometry.gravity_mps2", g.gravity);
  g.stroke_half_range = vec3("geometry.stroke_half_range_m", g.stroke_half_range);

  auto& s = c.sensors;
  s.d1 = g.d1; s.d2 = g.d2; s.d3 = g.d3;
  s.psd_noise_rms = kv.number("sensors.psd_noise_rms_m", s.psd_noise_rms);
  s.rotation_noise_rms = kv.number("sensors.rotation_noise_rms_rad", s.rotation_noise_rms);
  s.accel_noise_rms = kv.number("sensors.accel_noise_rms_mps2", s.accel_noise_rms);
  s.accel_bias_walk = kv.number("sensors.accel_bias_walk", s.accel_bias_walk);
  s.quantization = kv.boolean("sensors.quantization", s.quantization);
  s.psd_full_scale = kv.number("sensors.psd_full_scale_m", s.psd_full_scale);
  s.accel_full_scale = kv.number("sensors.accel_full_scale_mps2", s.accel_full_scale);
  s.adc_bits = static_cast<int>(kv.number("sensors.adc_bits", s.adc_bits));
  s.sample_period = c.sample_period;

  auto& f = c.field;
  f.nominal_gain = kv.number("field.nominal_gain_n_per_a", f.nominal_gain);
  f.variation_fraction = kv.number("field.variation_fraction", f.variation_fraction);
  f.scale = kv.number("field.scale", f.scale);
  f.half_extent_y = kv.number("field.half_extent_y_m", f.half_extent_y);
  f.half_extent_z = kv.number("field.half_extent_z_m", f.half_extent_z);
  f.cubic_skew = kv.number("field.cubic_skew", f.cubic_skew);
  c.field_fit_order = kv.number("field.fit_order", c.field_fit_order);
  c.calibration_spacing = kv.number("field.calibration_spacing_m", c.calibration_spacing);
  c.calibration_noise_rms = kv.number("field.calibration_noise_rms", c.calibration_noise_rms);

  c.sample_period = kv.number("control.sample_period_s", c.sample_period);
  s.sample_period = c.sample_period;
  for (auto& gg : c.gains) gg.sample_period = c.sample_period;
  detail::load_gain_group(kv, "control.translation", c.gains[0]);
  c.gains[1] = c.gains[0];
  c.gains[2] = c.gains[0];
  detail::load_gain_group(kv, "control.rotation_xy", c.gains[3]);
  c.gains[4] = c.gains[3];
  detail::load_gain_group(kv, "control.rotation_z", c.gains[5]);
  c.velocity_filter_pole = kv.number("control.velocity_filter_pole_rad_s", c.velocity_filter_pole);

  c.plant_substeps = static_cast<int>(kv.number("plant.substeps", c.plant_substeps));
  c.current_limit = kv.number("plant.current_limit_a", c.current_limit);
  c.plant_mass_scale = kv.number("plant.mass_scale", c.plant_mass_scale);
  c.plant_stiffness_scale = kv.number("plant.stiffness_scale", c.plant_stiffness_scale);
  c.plant_gain_scale = kv.number("plant.gain_scale", c.plant_gain_scale);
  c.trace_decimation = static_cast<int>(kv.number("output.trace_decimation", c.trace_decimation));

  auto& sc = c.scenario;
  sc.levitate.duration = kv.number("scenario.levitate.duration_s", sc.levitate.duration);
  sc.levitate.start_offset = vec3("scenario.levitate.start_offset_m", sc.levitate.start_offset);
  sc.levitate.start_euler = vec3("scenario.levitate.start_euler_rad", sc.levitate.start_euler);
  sc.levitate.settle_fraction = kv.number("scenario.levitate.settle_fraction", sc.levitate.settle_fraction);

  sc.contour.diameter = kv.number("scenario.contour.diameter_m", sc.contour.diameter);
  sc.contour.frequency_hz = kv.number("scenario.contour.frequency_hz", sc.contour.frequency_hz);
  sc.contour.duration = kv.number("scenario.contour.duration_s", sc.contour.duration);
  sc.contour.discard = kv.number("scenario.contour.discard_s", sc.contour.discard);

  sc.sweep.freq_start_hz = kv.number("scenario.sweep.freq_start_hz", sc.sweep.freq_start_hz);
  sc.sweep.freq_end_hz = kv.number("scenario.sweep.freq_end_hz", sc.sweep.freq_end_hz);
  sc.sweep.accel_amplitude = kv.number("scenario.sweep.accel_amplitude_mps2", sc.sweep.accel_amplitude);
  sc.sweep.duration = kv.number("scenario.sweep.duration_s", sc.sweep.duration);
  sc.sweep.axis = static_cast<int>(kv.number("scenario.sweep.axis", sc.sweep.axis));
  sc.sweep.controller_enabled = kv.boolean("scenario.sweep.controller_enabled", sc.sweep.controller_enabled);

  sc.identify.coupling_perturbation = kv.number("scenario.identify.coupling_perturbation", sc.identify.coupling_perturbation);
  sc.identify.seconds_per_axis = kv.number("scenario.identify.seconds_per_axis", sc.identify.seconds_per_axis);
  sc.identify.amp_translation = kv.number("scenario.identify.amp_translation_m", sc.identify.amp_translation);
  sc.identify.amp_rotation = kv.number("scenario.identify.amp_rotation_rad", sc.identify.amp_rotation);
  sc.identify.freq_start_hz = kv.number("scenario.identify.freq_start_hz", sc.identify.freq_start_hz);
  sc.identify.freq_end_hz = kv.number("scenario.identify.freq_end_hz", sc.identify.freq_end_hz);
  sc.identify.accel_noise_rel = kv.number("scenario.identify.accel_noise_rel", sc.identify.accel_noise_rel);
  sc.identify.probe_wrench = kv.number("scenario.identify.probe_wrench", sc.identify.probe_wrench);

  sc.alloc_compare.duration = kv.number("scenario.alloc_compare.duration_s", sc.alloc_compare.duration);

  sc.design.envelope.max_width = kv.number("design.envelope.max_width_m", sc.design.envelope.max_width);
  sc.design.envelope.max_thickness = kv.number("design.envelope.max_thickness_m", sc.design.envelope.max_thickness);
  sc.design.envelope.max_height = kv.number("design.envelope.max_height_m", sc.design.envelope.max_height);
  sc.design.envelope.min_force = kv.number("design.envelope.min_force_n", sc.design.envelope.min_force);
  sc.design.weights.flux = kv.number("design.weights.flux", sc.design.weights.flux);
  sc.design.weights.heat = kv.number("design.weights.heat", sc.design.weights.heat);
  sc.design.weights.mass = kv.number("design.weights.mass", sc.design.weights.mass);
  sc.design.budget.population = static_cast<int>(kv.number("design.population", sc.design.budget.population));
  sc.design.budget.generations = static_cast<int>(kv.number("design.generations", sc.design.budget.generations));

  auto& dp = c.design_params;
  dp.magnet_length = kv.number("design.base.magnet_length_m", dp.magnet_length);
  dp.magnet_width = kv.number("design.base.magnet_width_m", dp.magnet_width);
  dp.magnet_thickness = kv.number("design.base.magnet_thickness_m", dp.magnet_thickness);
  dp.air_gap = kv.number("design.base.air_gap_m", dp.air_gap);
  dp.stroke = kv.number("design.base.stroke_m", dp.stroke);
  dp.coil_width = kv.number("design.base.coil_width_m", dp.coil_width);
  dp.coil_length = kv.number("design.base.coil_length_m", dp.coil_length);
  dp.coil_thickness = kv.number("design.base.coil_thickness_m", dp.coil_thickness);
  dp.turns = kv.number("design.base.turns", dp.turns);
  dp.wire_diameter = kv.number("design.base.wire_diameter_m", dp.wire_diameter);
  dp.frame_thickness = kv.number("design.base.frame_thickness_m", dp.frame_thickness);
  dp.remanence = kv.number("design.base.remanence_t", dp.remanence);
  dp.copper_resistivity = kv.number("design.base.copper_resistivity", dp.copper_resistivity);
  dp.copper_density = kv.number("design.base.copper_density", dp.copper_density);
  dp.packing_fraction = kv.number("design.base.packing_fraction", dp.packing_fraction);
  dp.current_max = kv.number("design.base.current_max_a", dp.current_max);
  dp.yoke_clearance = kv.number("design.base.yoke_clearance_m", dp.yoke_clearance);

  static const std::map<std::string, DesignVar> kVarByName = {
      {"magnet_length", DesignVar::MagnetLength},
      {"magnet_width", DesignVar::MagnetWidth},
      {"magnet_thickness", DesignVar::MagnetThickness},
      {"air_gap", DesignVar::AirGap},
      {"coil_width", DesignVar::CoilWidth},
      {"coil_length", DesignVar::CoilLength},
      {"turns", DesignVar::Turns},
      {"stroke", DesignVar::Stroke},
  };
  for (const auto& key : kv.keys_with_prefix("design.bound.")) {
    const std::string name = key.substr(std::string("design.bound.").size());
    auto it = kVarByName.find(name);
    if (it == kVarByName.end()) throw Config("unknown design bound '" + name + "'");
    const auto v = kv.numbers(key, 2, {});
    sc.design.bounds.push_back({it->second, v[0], v[1]});
  }

  kv.reject_unknown_keys();
  c.validate();
  return c;
}

inline HarnessConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Config("cannot open config file: " + path);
  return load_config(in);
}

/// Reference configuration text: every key at its default, with non-paper
/// values annotated so they are not mistaken for published numbers.
inline std::string reference_config_text() {
  const HarnessConfig c;
  std::ostringstream out;
  char buf[256];
  auto kv = [&](const char* key, double v, const char* note) {
    std::snprintf(buf, sizeof(buf), "%-42s = %-12.6g%s\n", key, v, note);
    out << buf;
  };
  auto kv3 = [&](const char* key, const Vec3& v, const char* note) {
    std::snprintf(buf, sizeof(buf), "%-42s = %g %g %g%s\n", key, v.x(), v.y(), v.z(), note);
    out << buf;
  };
  auto kv6 = [&](const char* key, const Vec6& v, const char* note) {
    std::snprintf(buf, sizeof(buf), "%-42s = %g %g %g %g %g %g%s\n", key, v(0), v(1),
                  v(2), v(3), v(4), v(5), note);
    out << buf;
  };
  const char* np = "   # non-paper default";

  out << "# MVIP harness reference configuration (SI units unless noted)\n\n";
  kv("geometry.l1_m", c.geometry.l1, np);
  kv("geometry.l2_m", c.geometry.l2, np);
  kv("geometry.d1_m", c.geometry.d1, np);
  kv("geometry.d2_m", c.geometry.d2, np);
  kv("geometry.d3_m", c.geometry.d3, np);
  kv("geometry.mass_kg", c.geometry.mass, np);
  kv3("geometry.inertia_diag_kgm2",
      Vec3(c.geometry.inertia(0, 0), c.geometry.inertia(1, 1), c.geometry.inertia(2, 2)), np);
  kv6("geometry.cable_stiffness", c.geometry.cable_stiffness, np);
  kv6("geometry.cable_damping", c.geometry.cable_damping, np);
  kv("geometry.gravity_mps2", c.geometry.gravity, "   # 0 for orbital runs");
  kv3("geometry.stroke_half_range_m", c.geometry.stroke_half_range, "");
  out << "\n";
  kv("sensors.psd_noise_rms_m", c.sensors.psd_noise_rms, "");
  kv("sensors.rotation_noise_rms_rad", c.sensors.rotation_noise_rms, "");
  kv("sensors.accel_noise_rms_mps2", c.sensors.accel_noise_rms, np);
  kv("sensors.accel_bias_walk", c.sensors.accel_bias_walk, np);
  out << "sensors.quantization                       = true\n";
  kv("sensors.psd_full_scale_m", c.sensors.psd_full_scale, np);
  kv("sensors.accel_full_scale_mps2", c.sensors.accel_full_scale, np);
  kv("sensors.adc_bits", c.sensors.adc_bits, "");
  out << "\n";
  kv("field.nominal_gain_n_per_a", c.field.nominal_gain, np);
  kv("field.variation_fraction", c.field.variation_fraction, "");
  kv("field.scale", c.field.scale, "   # 0.92 reproduces the measured/simulated ratio");
  kv("field.half_extent_y_m", c.field.half_extent_y, "");
  kv("field.half_extent_z_m", c.field.half_extent_z, "");
  kv("field.cubic_skew", c.field.cubic_skew, np);
  kv("field.fit_order", c.field_fit_order, "");
  kv("field.calibration_spacing_m", c.calibration_spacing, "");
  kv("field.calibration_noise_rms", c.calibration_noise_rms, np);
  out << "\n";
  kv("control.sample_period_s", c.sample_period, "");
  auto gain_group = [&](const char* prefix, const ControllerGains& gg) {
    std::string p(prefix);
    kv((p + ".kp").c_str(), gg.kp, np);
    kv((p + ".ki").c_str(), gg.ki, np);
    kv((p + ".kd").c_str(), gg.kd, np);
    kv((p + ".deriv_pole_rad_s").c_str(), gg.deriv_pole, np);
    kv((p + ".ka").c_str(), gg.ka, np);
    kv((p + ".bp_center_rad_s").c_str(), gg.bp_wn, np);
    kv((p + ".bp_span").c_str(), gg.bp_xi, np);
    kv((p + ".setpoint_lowpass_hz").c_str(), gg.setpoint_lowpass_hz, np);
  };
  gain_group("control.translation", c.gains[0]);
  gain_group("control.rotation_xy", c.gains[3]);
  gain_group("control.rotation_z", c.gains[5]);
  kv("control.velocity_filter_pole_rad_s", c.velocity_filter_pole, np);
  out << "\n";
  kv("plant.substeps", c.plant_substeps, "");
  kv("plant.current_limit_a", c.current_limit, "");
  kv("plant.mass_scale", c.plant_mass_scale, "   # plant-truth multipliers for mismatch studies");
  kv("plant.stiffness_scale", c.plant_stiffness_scale, "");
  kv("plant.gain_scale", c.plant_gain_scale, "");
  kv("output.trace_decimation", c.trace_decimation, "");
  out << "\n";
  kv("scenario.levitate.duration_s", c.scenario.levitate.duration, "");
  kv3("scenario.levitate.start_offset_m", c.scenario.levitate.start_offset, np);
  kv3("scenario.levitate.start_euler_rad", c.scenario.levitate.start_euler, np);
  kv("scenario.levitate.settle_fraction", c.scenario.levitate.settle_fraction, np);
  kv("scenario.contour.diameter_m", c.scenario.contour.diameter, "");
  kv("scenario.contour.frequency_hz", c.scenario.contour.frequency_hz, np);
  kv("scenario.contour.duration_s", c.scenario.contour.duration, np);
  kv("scenario.contour.discard_s", c.scenario.contour.discard, np);
  kv("scenario.sweep.freq_start_hz", c.scenario.sweep.freq_start_hz, np);
  kv("scenario.sweep.freq_end_hz", c.scenario.sweep.freq_end_hz, np);
  kv("scenario.sweep.accel_amplitude_mps2", c.scenario.sweep.accel_amplitude, np);
  kv("scenario.sweep.duration_s", c.scenario.sweep.duration, np);
  kv("scenario.sweep.axis", c.scenario.sweep.axis, "   # 0=x 1=y 2=z");
  out << "scenario.sweep.controller_enabled          = true\n";
  kv("scenario.identify.coupling_perturbation", c.scenario.identify.coupling_perturbation, np);
  kv("scenario.identify.seconds_per_axis", c.scenario.identify.seconds_per_axis, np);
  kv("scenario.identify.amp_translation_m", c.scenario.identify.amp_translation, np);
  kv("scenario.identify.amp_rotation_rad", c.scenario.identify.amp_rotation, np);
  kv("scenario.identify.freq_start_hz", c.scenario.identify.freq_start_hz, np);
  kv("scenario.identify.freq_end_hz", c.scenario.identify.freq_end_hz, np);
  kv("scenario.identify.accel_noise_rel", c.scenario.identify.accel_noise_rel, np);
  kv("scenario.identify.probe_wrench", c.scenario.identify.probe_wrench, np);
  kv("scenario.alloc_compare.duration_s", c.scenario.alloc_compare.duration, "");
  out << "\n";
  kv("design.envelope.max_width_m", c.scenario.design.envelope.max_width, "");
  kv("design.envelope.max_thickness_m", c.scenario.design.envelope.max_thickness, "");
  kv("design.envelope.max_height_m", c.scenario.design.envelope.max_height, "");
  kv("design.envelope.min_force_n", c.scenario.design.envelope.min_force, "");
  kv("design.weights.flux", c.scenario.design.weights.flux, "");
  kv("design.weights.heat", c.scenario.design.weights.heat, "");
  kv("design.weights.mass", c.scenario.design.weights.mass, "");
  kv("design.population", c.scenario.design.budget.population, "");
  kv("design.generations", c.scenario.design.budget.generations, "");
  kv("design.base.magnet_length_m", c.design_params.magnet_length, "");
  kv("design.base.magnet_width_m", c.design_params.magnet_width, "");
  kv("design.base.magnet_thickness_m", c.design_params.magnet_thickness, "");
  kv("design.base.air_gap_m", c.design_params.air_gap, "");
  kv("design.base.stroke_m", c.design_params.stroke, "");
  kv("design.base.coil_width_m", c.design_params.coil_width, "");
  kv("design.base.coil_length_m", c.design_params.coil_length, "");
  kv("design.base.coil_thickness_m", c.design_params.coil_thickness, "");
  kv("design.base.turns", c.design_params.turns, "");
  kv("design.base.wire_diameter_m", c.design_params.wire_diameter, np);
  kv("design.base.frame_thickness_m", c.design_params.frame_thickness, np);
  kv("design.base.remanence_t", c.design_params.remanence, np);
  kv("design.base.copper_resistivity", c.design_params.copper_resistivity, np);
  kv("design.base.copper_density", c.design_params.copper_density, np);
  kv("design.base.packing_fraction", c.design_params.packing_fraction, np);
  kv("design.base.current_max_a", c.design_params.current_max, "");
  kv("design.base.yoke_clearance_m", c.design_params.yoke_clearance, np);
  return out.str();
}

}  // namespace mvip
