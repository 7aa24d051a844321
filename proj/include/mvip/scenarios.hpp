#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mvip/config.hpp"
#include "mvip/identification.hpp"
#include "mvip/sim.hpp"
#include "mvip/spectral.hpp"

namespace mvip {

enum class ScenarioKind {
  Levitate,
  Contour,
  Sweep,
  Identify,
  Failure,
  AllocCompare,
  Design,
  LoopAnalysis,
};

inline ScenarioKind parse_scenario_kind(const std::string& name) {
  if (name == "levitate") return ScenarioKind::Levitate;
  if (name == "contour") return ScenarioKind::Contour;
  if (name == "sweep") return ScenarioKind::Sweep;
  if (name == "identify") return ScenarioKind::Identify;
  if (name == "failure") return ScenarioKind::Failure;
  if (name == "alloc-compare") return ScenarioKind::AllocCompare;
  if (name == "design") return ScenarioKind::Design;
  if (name == "loop-analysis") return ScenarioKind::LoopAnalysis;
  throw Config("unknown scenario '" + name + "'");
}

struct ScenarioRequest {
  ScenarioKind kind = ScenarioKind::Levitate;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool no_noise = false;          // force the noiseless/ideal-instrument mode
  double duration_override = 0.0; // seconds, 0 keeps the config value
  std::uint64_t config_hash = 0;
};

/// Ordered key/value metric set; rendering is byte-stable for a fixed run.
class Metrics {
 public:
  void put(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    rows_.emplace_back(key, buf);
  }
  void put(const std::string& key, const std::string& value) {
    rows_.emplace_back(key, value);
  }

  std::string text() const {
    std::string out;
    for (const auto& [k, v] : rows_) {
      out += k;
      out += " = ";
      out += v;
      out += "\n";
    }
    return out;
  }
  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Config("cannot open metrics file for writing: " + path);
    out << text();
  }
  const std::vector<std::pair<std::string, std::string>>& rows() const { return rows_; }
  double number(const std::string& key) const {
    for (const auto& [k, v] : rows_)
      if (k == key) return std::stod(v);
    throw Config("metric '" + key + "' not present");
  }
  std::string value(const std::string& key) const {
    for (const auto& [k, v] : rows_)
      if (k == key) return v;
    throw Config("metric '" + key + "' not present");
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

struct ScenarioResult {
  Metrics metrics;
  SimTrace trace;
  bool has_trace = false;

  TransmissibilityCurve transmissibility_curve;
  bool has_transmissibility = false;

  AmplitudeSpectrum acceleration_spectrum;
  bool has_spectrum = false;

  DesignOutcome designs;
  bool has_designs = false;

  std::vector<LoopResponsePoint> loop_curve;
  bool has_loop_curve = false;

  Mat6 coupling_truth = Mat6::Identity();
  Mat6 coupling_estimate = Mat6::Identity();
  Mat6 rectifier_matrix = Mat6::Identity();
  bool has_identification = false;

  std::vector<std::array<double, 3>> alloc_energy_rows;  // t, qp, minimax
  bool has_alloc_rows = false;

  /// Writes metrics.txt plus whatever curve files the scenario produced.
  void write_outputs(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    metrics.save((fs::path(dir) / "metrics.txt").string());
    if (has_trace) trace.save_csv((fs::path(dir) / "trace.csv").string());
    if (has_transmissibility) {
      std::ofstream out(fs::path(dir) / "transmissibility.csv");
      out << "freq_hz,magnitude_db,phase_deg\n";
      char buf[96];
      for (size_t i = 0; i < transmissibility_curve.freq_hz.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n",
                      transmissibility_curve.freq_hz[i],
                      transmissibility_curve.magnitude_db(i),
                      std::arg(transmissibility_curve.response[i]) * 180.0 / M_PI);
        out << buf;
      }
    }
    if (has_spectrum) {
      std::ofstream out(fs::path(dir) / "spectrum.csv");
      out << "freq_hz,amplitude_g\n";
      char buf[64];
      for (size_t i = 0; i < acceleration_spectrum.freq_hz.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n",
                      acceleration_spectrum.freq_hz[i],
                      acceleration_spectrum.amplitude[i]);
        out << buf;
      }
    }
    if (has_designs) {
      std::ofstream csv(fs::path(dir) / "designs.csv");
      write_design_table(designs, csv);
      std::ofstream rep(fs::path(dir) / "designs.txt");
      write_design_report(designs, rep);
    }
    if (has_loop_curve) {
      std::ofstream out(fs::path(dir) / "loop_response.csv");
      out << "freq_hz,open_loop_db,open_loop_phase_deg,transmissibility_db,"
             "transmissibility_phase_deg\n";
      char buf[160];
      for (const auto& p : loop_curve) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      p.freq_hz, p.open_loop_db, p.open_loop_phase_deg,
                      p.transmissibility_db, p.transmissibility_phase_deg);
        out << buf;
      }
    }
    if (has_identification) {
      save_matrix(coupling_truth, (fs::path(dir) / "coupling_truth.csv").string());
      save_matrix(coupling_estimate, (fs::path(dir) / "coupling_estimate.csv").string());
      save_matrix(rectifier_matrix, (fs::path(dir) / "rectifier.csv").string());
    }
    if (has_alloc_rows) {
      std::ofstream out(fs::path(dir) / "alloc_compare.csv");
      out << "t,cost_qp_a2,cost_minimax_a2\n";
      char buf[96];
      for (const auto& row : alloc_energy_rows) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", row[0], row[1], row[2]);
        out << buf;
      }
    }
  }
};

namespace detail {

/// Scenario noise defaults: experiments that the acceptance bounds define
/// noiselessly default to the ideal-instrument mode.
inline bool default_noise(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Levitate:
    case ScenarioKind::Contour:
      return true;
    default:
      return false;
  }
}

inline void require_seed_if_noisy(const ScenarioRequest& req, bool noise) {
  if (noise && !req.seed_given)
    throw Config("a seed is required when sensor noise is enabled");
}

inline double rms(const std::vector<double>& v, size_t from) {
  if (from >= v.size()) return 0.0;
  double acc = 0.0;
  for (size_t i = from; i < v.size(); ++i) acc += v[i] * v[i];
  return std::sqrt(acc / static_cast<double>(v.size() - from));
}

inline void append_record(SimTrace& trace, const SimulationEngine::CycleOutput& out,
                          int cycle, int decimation) {
  if (cycle % decimation != 0) return;
  TraceRecord r;
  r.t = out.t_end;
  r.floater = out.floater;
  r.base_position = out.base.position;
  r.base_acceleration = out.base.acceleration;
  r.commanded_wrench = out.commanded_wrench;
  r.achieved_wrench = out.achieved_wrench;
  r.currents = out.currents;
  r.pose_estimate = out.pose_estimate;
  r.accel_measured = out.accel_measured;
  r.saturated = out.saturated;
  r.contact = out.contact;
  trace.records.push_back(r);
}

inline Mat6 make_coupling_truth(double perturbation, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xc0807e4dULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Mat6 s;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) s(r, c) = uni(rng);
  Mat6 coupling = Mat6::Identity() + perturbation * s;
  Eigen::JacobiSVD<Mat6> svd(coupling);
  const double cond =
      svd.singularValues().maxCoeff() / svd.singularValues().minCoeff();
  if (cond >= 10.0) {
    // Shrink the perturbation until the conditioning bound holds.
    coupling = Mat6::Identity() + (perturbation * 8.0 / cond) * s;
  }
  return coupling;
}

}  // namespace detail

inline ScenarioResult run_levitate(const HarnessConfig& config,
                                   const ScenarioRequest& req) {
  ScenarioResult result;
  const bool noise = req.no_noise ? false : detail::default_noise(ScenarioKind::Levitate);
  detail::require_seed_if_noisy(req, noise);

  EngineOptions opt;
  opt.noise = noise;
  SimulationEngine engine(config, req.seed, opt);

  PlantState start;
  start.position = config.scenario.levitate.start_offset;
  start.euler = config.scenario.levitate.start_euler;
  engine.set_floater_state(start);

  const double duration = req.duration_override > 0.0 ? req.duration_override
                                                      : config.scenario.levitate.duration;
  const int cycles = static_cast<int>(duration / config.sample_period);
  const int decimation = std::max(config.trace_decimation, 1);
  result.trace.sample_period = config.sample_period * decimation;
  result.trace.seed = req.seed;
  result.trace.config_hash = req.config_hash;

  std::vector<double> err_norm;
  std::vector<std::vector<double>> pos(3), accel(3);
  err_norm.reserve(static_cast<size_t>(cycles));
  bool contact = false;

  SimulationEngine::CycleInput in;  // setpoint zero: hold the stator center
  for (int k = 0; k < cycles; ++k) {
    const auto out = engine.step(in);
    // First record lands one decimation period in, keeping the base uniform.
    detail::append_record(result.trace, out, k, decimation);
    const Vec3 rel = out.floater.position - out.base.position;
    err_norm.push_back(rel.norm());
    for (int i = 0; i < 3; ++i) {
      pos[static_cast<size_t>(i)].push_back(rel(i));
      accel[static_cast<size_t>(i)].push_back(out.accel_measured(i));
    }
    if (out.contact) { contact = true; break; }
  }
  result.has_trace = true;
  result.trace.validate();

  const double start_norm = config.scenario.levitate.start_offset.norm();
  const double settle_level = config.scenario.levitate.settle_fraction * start_norm;
  double settling_time = -1.0;
  for (size_t i = 0; i < err_norm.size(); ++i) {
    if (err_norm[i] <= settle_level) {
      bool stays = true;
      for (size_t j = i; j < err_norm.size(); ++j)
        if (err_norm[j] > settle_level) { stays = false; break; }
      if (stays) {
        settling_time = static_cast<double>(i + 1) * config.sample_period;
        break;
      }
    }
  }

  const size_t steady_from = err_norm.size() - err_norm.size() / 4;
  result.metrics.put("outcome", contact ? "contact-stop" : "ok");
  result.metrics.put("settling_time_s", settling_time);
  result.metrics.put("steady_position_rms_m", detail::rms(err_norm, steady_from));
  double steady_max = 0.0;
  for (size_t i = steady_from; i < err_norm.size(); ++i)
    steady_max = std::max(steady_max, err_norm[i]);
  result.metrics.put("steady_position_max_m", steady_max);
  const char* axes[3] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) {
    const auto& a = accel[static_cast<size_t>(i)];
    double mean = 0.0;
    for (size_t j = steady_from; j < a.size(); ++j) mean += a[j];
    mean /= static_cast<double>(a.size() - steady_from);
    double lo = 1e300, hi = -1e300, sq = 0.0;
    for (size_t j = steady_from; j < a.size(); ++j) {
      lo = std::min(lo, a[j]);
      hi = std::max(hi, a[j]);
      const double d = a[j] - mean;
      sq += d * d;
    }
    const double g0 = 9.8;
    result.metrics.put(std::string("steady_accel_mean_") + axes[i] + "_mps2", mean);
    result.metrics.put(std::string("steady_accel_pp_") + axes[i] + "_mg",
                       (hi - lo) / g0 * 1e3);
    result.metrics.put(std::string("steady_accel_rms_") + axes[i] + "_mg",
                       std::sqrt(sq / static_cast<double>(a.size() - steady_from)) / g0 * 1e3);
  }

  if (accel[1].size() >= 1024) {
    std::vector<double> y_accel_g(accel[1].size());
    for (size_t i = 0; i < accel[1].size(); ++i) y_accel_g[i] = accel[1][i] / 9.8;
    result.acceleration_spectrum = spectrum(y_accel_g, 1.0 / config.sample_period);
    result.has_spectrum = true;
  }
  return result;
}

inline ScenarioResult run_contour(const HarnessConfig& config,
                                  const ScenarioRequest& req) {
  ScenarioResult result;
  const bool noise = req.no_noise ? false : detail::default_noise(ScenarioKind::Contour);
  detail::require_seed_if_noisy(req, noise);

  HarnessConfig cfg = config;
  for (auto& g : cfg.gains) g.setpoint_lowpass_hz = 0.0;  // track, don't shape

  EngineOptions opt;
  opt.noise = noise;
  opt.tracking_axes = {true, true, false, false, false, false};
  SimulationEngine engine(cfg, req.seed, opt);

  const double radius = cfg.scenario.contour.diameter / 2.0;
  const double w = 2.0 * M_PI * cfg.scenario.contour.frequency_hz;
  PlantState start;
  start.position = Vec3(radius, 0.0, 0.0);
  start.velocity = Vec3(0.0, radius * w, 0.0);  // enter the circle tangentially
  engine.set_floater_state(start);

  const double duration = req.duration_override > 0.0 ? req.duration_override
                                                      : cfg.scenario.contour.duration;
  const int cycles = static_cast<int>(duration / cfg.sample_period);
  const int decimation = std::max(cfg.trace_decimation, 1);
  result.trace.sample_period = cfg.sample_period * decimation;
  result.trace.seed = req.seed;
  result.trace.config_hash = req.config_hash;

  std::vector<double> ex, ey, radial;
  bool contact = false;
  for (int k = 0; k < cycles; ++k) {
    const double t = engine.time();
    SimulationEngine::CycleInput in;
    in.setpoint(0) = radius * std::cos(w * t);
    in.setpoint(1) = radius * std::sin(w * t);
    in.accel_ff(0) = -radius * w * w * std::cos(w * t);
    in.accel_ff(1) = -radius * w * w * std::sin(w * t);
    const auto out = engine.step(in);
    detail::append_record(result.trace, out, k, decimation);

    const double te = out.t_end;
    const Vec3 rel = out.floater.position - out.base.position;
    ex.push_back(rel.x() - radius * std::cos(w * te));
    ey.push_back(rel.y() - radius * std::sin(w * te));
    radial.push_back(std::hypot(rel.x(), rel.y()) - radius);
    if (out.contact) { contact = true; break; }
  }
  result.has_trace = true;
  result.trace.validate();

  const size_t from = std::min<size_t>(
      static_cast<size_t>(cfg.scenario.contour.discard / cfg.sample_period), ex.size());
  double max_err = 0.0;
  for (size_t i = from; i < ex.size(); ++i)
    max_err = std::max(max_err, std::hypot(ex[i], ey[i]));
  result.metrics.put("outcome", contact ? "contact-stop" : "ok");
  result.metrics.put("tracking_rms_x_m", detail::rms(ex, from));
  result.metrics.put("tracking_rms_y_m", detail::rms(ey, from));
  result.metrics.put("contour_rms_m", detail::rms(radial, from));
  result.metrics.put("tracking_max_m", max_err);
  return result;
}

inline ScenarioResult run_sweep(const HarnessConfig& config, const ScenarioRequest& req) {
  ScenarioResult result;
  const bool noise = req.no_noise ? false : detail::default_noise(ScenarioKind::Sweep);
  detail::require_seed_if_noisy(req, noise);

  const auto& sw = config.scenario.sweep;
  EngineOptions opt;
  opt.noise = noise;
  opt.controller_enabled = sw.controller_enabled;
  opt.excitation.kind = BaseExcitation::Kind::LogSweep;
  opt.excitation.axis = Vec3::Unit(sw.axis);
  opt.excitation.accel_amplitude = sw.accel_amplitude;
  opt.excitation.freq_start = sw.freq_start_hz;
  opt.excitation.freq_end = sw.freq_end_hz;
  const double duration = req.duration_override > 0.0 ? req.duration_override : sw.duration;
  opt.excitation.duration = duration;
  SimulationEngine engine(config, req.seed, opt);

  const int cycles = static_cast<int>(duration / config.sample_period);
  const int decimation = std::max(config.trace_decimation, 40);
  result.trace.sample_period = config.sample_period * decimation;
  result.trace.seed = req.seed;
  result.trace.config_hash = req.config_hash;

  std::vector<double> base_acc, floater_acc;
  base_acc.reserve(static_cast<size_t>(cycles));
  floater_acc.reserve(static_cast<size_t>(cycles));
  bool contact = false;
  SimulationEngine::CycleInput in;
  for (int k = 0; k < cycles; ++k) {
    const auto out = engine.step(in);
    detail::append_record(result.trace, out, k, decimation);
    base_acc.push_back(out.base.acceleration(sw.axis));
    floater_acc.push_back(out.accel_true_linear(sw.axis));
    if (out.contact) { contact = true; break; }
  }
  result.has_trace = true;
  result.trace.validate();
  result.metrics.put("outcome", contact ? "contact-stop" : "ok");

  if (!contact) {
    result.transmissibility_curve =
        transmissibility(base_acc, floater_acc, 1.0 / config.sample_period);
    result.has_transmissibility = true;
    const double slope =
        fitted_slope_db_per_decade(result.transmissibility_curve, 1.0, 10.0);
    const double cutoff = cutoff_frequency_hz(result.transmissibility_curve, 0.15);
    result.metrics.put("slope_1_10_db_per_decade", slope);
    result.metrics.put("cutoff_hz", cutoff);
  }
  return result;
}

inline ScenarioResult run_identify(const HarnessConfig& config,
                                   const ScenarioRequest& req) {
  ScenarioResult result;
  const auto& id = config.scenario.identify;
  const bool noise = req.no_noise ? false : detail::default_noise(ScenarioKind::Identify);
  detail::require_seed_if_noisy(req, noise || id.accel_noise_rel > 0.0);

  // Identification targets the orbital platform: gravity off keeps the
  // coupled weight offload from walking the floater into the stroke box.
  EngineOptions opt;
  opt.noise = noise;
  opt.zero_gravity = true;
  opt.tracking_axes = {true, true, true, true, true, true};
  opt.coupling_truth = detail::make_coupling_truth(id.coupling_perturbation, req.seed);

  HarnessConfig cfg = config;
  for (auto& g : cfg.gains) g.setpoint_lowpass_hz = 0.0;
  SimulationEngine engine(cfg, req.seed, opt);

  RlsEstimator estimator(1.0, 1e4);
  std::mt19937_64 noise_rng(req.seed ^ 0x1de47e57ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Per-channel constant-acceleration reference sweeps, excited in turn.
  const double accel_amp_trans = id.amp_translation * std::pow(2.0 * M_PI * id.freq_start_hz, 2);
  const double accel_amp_rot = id.amp_rotation * std::pow(2.0 * M_PI * id.freq_start_hz, 2);
  BaseExcitation ref_gen;
  ref_gen.kind = BaseExcitation::Kind::LogSweep;
  ref_gen.freq_start = id.freq_start_hz;
  ref_gen.freq_end = id.freq_end_hz;
  ref_gen.duration = id.seconds_per_axis;
  ref_gen.axis = Vec3::UnitX();

  const int cycles_per_axis = static_cast<int>(id.seconds_per_axis / cfg.sample_period);
  const int decimation = std::max(cfg.trace_decimation, 10);
  result.trace.sample_period = cfg.sample_period * decimation;
  result.trace.seed = req.seed;
  result.trace.config_hash = req.config_hash;

  bool contact = false;
  int cycle = 0;
  for (int channel = 0; channel < 6 && !contact; ++channel) {
    const bool translational = channel < 3;
    ref_gen.accel_amplitude = translational ? accel_amp_trans : accel_amp_rot;
    const double t0 = engine.time();
    for (int k = 0; k < cycles_per_axis; ++k, ++cycle) {
      const auto motion = ref_gen.evaluate(engine.time() - t0);
      SimulationEngine::CycleInput in;
      in.setpoint(channel) = motion.position.x();
      in.accel_ff(channel) = motion.acceleration.x();
      const auto out = engine.step(in);
      detail::append_record(result.trace, out, cycle, decimation);
      if (out.contact) { contact = true; break; }

      // Regression target: inertia-weighted acceleration with the modeled
      // cable reaction removed. The kinematic signals are idealized (taken
      // from the simulator, optionally noised) as the sensing chain for
      // angular acceleration is delegated to the platform hardware.
      Vec6 accel;
      accel << out.accel_true_linear, out.accel_true_angular;
      if (id.accel_noise_rel > 0.0) {
        const double scale = translational ? accel_amp_trans : accel_amp_rot;
        for (int i = 0; i < 6; ++i)
          accel(i) += id.accel_noise_rel * scale * gauss(noise_rng);
      }
      const RigidState relative = out.floater;  // base is still in this scenario
      const Wrench cable = cable_wrench(engine.model_geometry(), relative);
      Vec6 target;
      target.head<3>() = engine.model_geometry().mass * accel.head<3>();
      target.tail<3>() = engine.model_geometry().inertia * accel.tail<3>();
      target -= cable.as_vector();
      estimator.update_target(out.commanded_wrench, target);
    }
  }
  result.has_trace = true;
  result.trace.validate();

  result.coupling_truth = opt.coupling_truth;
  result.coupling_estimate = estimator.estimate();
  result.has_identification = true;
  const double frob_err = (result.coupling_estimate - opt.coupling_truth).norm();
  result.metrics.put("outcome", contact ? "contact-stop" : "ok");
  result.metrics.put("samples", estimator.sample_count());
  result.metrics.put("frobenius_error", frob_err);
  result.metrics.put("excitation_covariance_trace", estimator.excitation_figure());

  if (!contact) {
    result.rectifier_matrix = rectifier(result.coupling_estimate);

    // Rectification probe: pure-axis wrenches through a fresh plant at rest.
    CouplingMatrix coupling;
    coupling.matrix = opt.coupling_truth;
    PlatformGeometry probe_geom = config.plant_geometry();
    probe_geom.gravity = 0.0;
    Plant probe(probe_geom, coupling, BaseExcitation{});
    double worst_ratio = 0.0;
    for (int c = 0; c < 6; ++c) {
      const Vec6 wrench = result.rectifier_matrix *
                          (id.probe_wrench * Vec6::Unit(c));
      const PlantAcceleration acc = probe.acceleration(Wrench::from_vector(wrench));
      Vec6 y;
      y.head<3>() = probe_geom.mass * acc.linear;
      y.tail<3>() = probe_geom.inertia * acc.angular;
      y /= id.probe_wrench;
      double cross = 0.0;
      for (int j = 0; j < 6; ++j)
        if (j != c) cross = std::max(cross, std::abs(y(j)));
      worst_ratio = std::max(worst_ratio, cross / std::abs(y(c)));
    }
    result.metrics.put("post_rectification_cross_axis_ratio", worst_ratio);
  }
  return result;
}

inline ScenarioResult run_failure(const HarnessConfig& config,
                                  const ScenarioRequest& req) {
  (void)req;
  ScenarioResult result;
  AllocatorState alloc(build_mixing_matrix(config.geometry), config.current_limit);

  auto report = [&](const std::set<int>& failed) {
    std::string name = "failure";
    if (failed.empty()) name += "_none";
    for (int i : failed) name += "_" + std::to_string(i + 1);
    const bool functional = alloc.reconfigure(failed);
    result.metrics.put(name, (functional ? "functional rank=" : "security-mode rank=") +
                                 std::to_string(alloc.rank()));
    return functional;
  };

  report({});
  for (int i = 0; i < kNumActuators; ++i) report({i});
  int functional_pairs = 0, security_pairs = 0;
  for (int i = 0; i < kNumActuators; ++i)
    for (int j = i + 1; j < kNumActuators; ++j) {
      if (report({i, j}))
        ++functional_pairs;
      else
        ++security_pairs;
    }
  report({0, 1, 2});
  result.metrics.put("two_failure_functional_sets", functional_pairs);
  result.metrics.put("two_failure_security_sets", security_pairs);
  return result;
}

inline ScenarioResult run_alloc_compare(const HarnessConfig& config,
                                        const ScenarioRequest& req) {
  ScenarioResult result;
  AllocatorState alloc(build_mixing_matrix(config.geometry), config.current_limit);

  // Slightly off-center pose so the gain matrix is not perfectly uniform.
  const CalibrationGrid grid = synthesize_calibration(
      config.field, config.calibration_spacing, 0.0, req.seed ^ 0xca11ULL);
  const ActuatorModel model = fit_model(grid, 3);
  const ActuatorLayout layout = ActuatorLayout::standard(config.geometry);
  RigidState pose;
  pose.position = Vec3(0.5e-3, 0.8e-3, -0.6e-3);
  pose.euler = Vec3(2e-3, -1e-3, 3e-3);
  Vec8 gains;
  for (int i = 0; i < kNumActuators; ++i) {
    const Eigen::Vector2d yz = coil_local_displacement(layout, pose, i);
    gains(i) = model.force_per_ampere(yz.x(), yz.y());
  }
  alloc.set_gains(gains);

  // Shared band-limited multi-sine command profile.
  std::mt19937_64 rng(req.seed ^ 0xa110cULL);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::array<double, 6> freq{}, phase{};
  for (int i = 0; i < 6; ++i) {
    freq[static_cast<size_t>(i)] = 0.5 + 4.5 * uni(rng);
    phase[static_cast<size_t>(i)] = 2.0 * M_PI * uni(rng);
  }
  const Vec6 amp = (Vec6() << 4.0, 4.0, 4.0, 0.3, 0.3, 0.3).finished();

  const int cycles = static_cast<int>(config.scenario.alloc_compare.duration /
                                      config.sample_period);
  double energy_qp = 0.0, energy_mm = 0.0;
  int strict = 0;
  for (int k = 0; k < cycles; ++k) {
    const double t = k * config.sample_period;
    Vec6 w;
    for (int i = 0; i < 6; ++i)
      w(i) = amp(i) * std::sin(2.0 * M_PI * freq[static_cast<size_t>(i)] * t +
                               phase[static_cast<size_t>(i)]);
    const auto qp = allocate_qp(alloc, Wrench::from_vector(w));
    const auto mm = allocate_minimax(alloc, Wrench::from_vector(w));
    energy_qp += qp.cost * config.sample_period;
    energy_mm += mm.cost * config.sample_period;
    if (qp.cost < mm.cost * (1.0 - 1e-12)) ++strict;
    result.alloc_energy_rows.push_back({t, qp.cost, mm.cost});
  }
  result.has_alloc_rows = true;
  result.metrics.put("energy_qp_a2s", energy_qp);
  result.metrics.put("energy_minimax_a2s", energy_mm);
  result.metrics.put("energy_ratio", energy_qp / energy_mm);
  result.metrics.put("strict_improvement_fraction",
                     static_cast<double>(strict) / static_cast<double>(cycles));
  return result;
}

inline ScenarioResult run_design(const HarnessConfig& config,
                                 const ScenarioRequest& req) {
  ScenarioResult result;
  std::vector<DesignBound> bounds = config.scenario.design.bounds;
  if (bounds.empty()) {
    bounds = {
        {DesignVar::MagnetLength, 30e-3, 45e-3},
        {DesignVar::MagnetWidth, 12e-3, 22.5e-3},
        {DesignVar::MagnetThickness, 8e-3, 14.5e-3},
        {DesignVar::AirGap, 24e-3, 32e-3},
        {DesignVar::CoilLength, 50e-3, 70e-3},
        {DesignVar::CoilWidth, 8e-3, 14e-3},
        {DesignVar::Turns, 250, 450},
    };
  }
  result.designs = optimize(config.design_params, config.scenario.design.envelope,
                            bounds, config.scenario.design.weights,
                            config.scenario.design.budget, req.seed);
  result.has_designs = true;
  const auto& best = result.designs.elites.front();
  result.metrics.put("elites", static_cast<double>(result.designs.elites.size()));
  result.metrics.put("best_flux_t", best.flux);
  result.metrics.put("best_heat_w", best.heat);
  result.metrics.put("best_mass_kg", best.mass);
  result.metrics.put("best_peak_force_n", peak_force(best.params));
  result.metrics.put("best_objective", best.objective);
  return result;
}

inline ScenarioResult run_loop_analysis(const HarnessConfig& config,
                                        const ScenarioRequest& req) {
  (void)req;
  ScenarioResult result;
  const double inertias[6] = {config.geometry.mass, config.geometry.mass,
                              config.geometry.mass, config.geometry.inertia(0, 0),
                              config.geometry.inertia(1, 1), config.geometry.inertia(2, 2)};
  const char* names[6] = {"x", "y", "z", "rot_x", "rot_y", "rot_z"};
  for (int i = 0; i < 6; ++i) {
    const LoopReport rep = analyze_loop(config.gains[static_cast<size_t>(i)], inertias[i]);
    const std::string p = std::string("axis_") + names[i] + "_";
    result.metrics.put(p + "crossover_hz", rep.crossover_hz);
    result.metrics.put(p + "phase_margin_deg", rep.phase_margin_deg);
    result.metrics.put(p + "cutoff_hz", rep.closed_loop_cutoff_hz);
    result.metrics.put(p + "dc_db", rep.dc_transmissibility_db);
    result.metrics.put(p + "hf_slope_db_per_decade", rep.hf_slope_db_per_decade);
    result.metrics.put(p + "band_slope_db_per_decade", rep.band_slope_db_per_decade);
    result.metrics.put(p + "peak_db", rep.peak_db);
    result.metrics.put(p + "stable", rep.stable ? "true" : "false");
  }
  result.loop_curve = loop_response(config.gains[0], config.geometry.mass, 1e-2, 1e3, 400);
  result.has_loop_curve = true;
  return result;
}

inline ScenarioResult run_scenario(const HarnessConfig& config,
                                   const ScenarioRequest& req) {
  config.validate();
  switch (req.kind) {
    case ScenarioKind::Levitate: return run_levitate(config, req);
    case ScenarioKind::Contour: return run_contour(config, req);
    case ScenarioKind::Sweep: return run_sweep(config, req);
    case ScenarioKind::Identify: return run_identify(config, req);
    case ScenarioKind::Failure: return run_failure(config, req);
    case ScenarioKind::AllocCompare: return run_alloc_compare(config, req);
    case ScenarioKind::Design: return run_design(config, req);
    case ScenarioKind::LoopAnalysis: return run_loop_analysis(config, req);
  }
  throw Config("unhandled scenario kind");
}

}  // namespace mvip
