#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "mvip/actuator_field.hpp"
#include "mvip/allocation.hpp"
#include "mvip/config.hpp"
#include "mvip/control.hpp"
#include "mvip/core.hpp"
#include "mvip/plant.hpp"
#include "mvip/sensing.hpp"

namespace mvip {

/// One decimated simulation record.
struct TraceRecord {
  double t = 0.0;
  RigidState floater;
  Vec3 base_position = Vec3::Zero();
  Vec3 base_acceleration = Vec3::Zero();
  Vec6 commanded_wrench = Vec6::Zero();
  Vec6 achieved_wrench = Vec6::Zero();
  Vec8 currents = Vec8::Zero();
  Vec6 pose_estimate = Vec6::Zero();   // measured relative pose (pos, euler)
  Vec6 accel_measured = Vec6::Zero();
  bool saturated = false;
  bool contact = false;
};

/// Uniformly sampled simulation record set plus the manifest stamped into
/// every exported file.
struct SimTrace {
  double sample_period = 5e-4;  // record spacing (control period * decimation)
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<TraceRecord> records;

  /// Monotone uniform time base, finite values everywhere.
  void validate() const {
    for (size_t i = 0; i < records.size(); ++i) {
      const TraceRecord& r = records[i];
      if (!r.floater.all_finite() || !r.commanded_wrench.allFinite() ||
          !r.achieved_wrench.allFinite() || !r.currents.allFinite() ||
          !r.pose_estimate.allFinite() || !r.accel_measured.allFinite())
        throw NonFiniteState("trace record " + std::to_string(i) + " is not finite");
      if (i > 0) {
        const double dt = r.t - records[i - 1].t;
        if (!(dt > 0.0) || std::abs(dt - sample_period) > 1e-9 * (1.0 + sample_period))
          throw Config("trace time base is not uniformly increasing at record " +
                       std::to_string(i));
      }
    }
  }

  void save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Config("cannot open trace file for writing: " + path);
    char buf[64];
    out << "# mvip-trace v1\n";
    std::snprintf(buf, sizeof(buf), "0x%016llx",
                  static_cast<unsigned long long>(config_hash));
    out << "# config_hash = " << buf << "\n";
    out << "# seed = " << seed << "\n";
    std::snprintf(buf, sizeof(buf), "%.12g", sample_period);
    out << "# sample_period_s = " << buf << "\n";
    out << "t,pos_x,pos_y,pos_z,euler_x,euler_y,euler_z,"
           "vel_x,vel_y,vel_z,rate_x,rate_y,rate_z,"
           "base_x,base_y,base_z,base_ax,base_ay,base_az,"
           "cmd_fx,cmd_fy,cmd_fz,cmd_tx,cmd_ty,cmd_tz,"
           "ach_fx,ach_fy,ach_fz,ach_tx,ach_ty,ach_tz,"
           "i1,i2,i3,i4,i5,i6,i7,i8,"
           "meas_x,meas_y,meas_z,meas_ex,meas_ey,meas_ez,"
           "acc_x,acc_y,acc_z,acc_rx,acc_ry,acc_rz,saturated,contact\n";
    auto put = [&](double v, char sep) {
      std::snprintf(buf, sizeof(buf), "%.12g%c", v, sep);
      out << buf;
    };
    for (const auto& r : records) {
      put(r.t, ',');
      for (int i = 0; i < 3; ++i) put(r.floater.position(i), ',');
      for (int i = 0; i < 3; ++i) put(r.floater.euler(i), ',');
      for (int i = 0; i < 3; ++i) put(r.floater.velocity(i), ',');
      for (int i = 0; i < 3; ++i) put(r.floater.euler_rates(i), ',');
      for (int i = 0; i < 3; ++i) put(r.base_position(i), ',');
      for (int i = 0; i < 3; ++i) put(r.base_acceleration(i), ',');
      for (int i = 0; i < 6; ++i) put(r.commanded_wrench(i), ',');
      for (int i = 0; i < 6; ++i) put(r.achieved_wrench(i), ',');
      for (int i = 0; i < 8; ++i) put(r.currents(i), ',');
      for (int i = 0; i < 6; ++i) put(r.pose_estimate(i), ',');
      for (int i = 0; i < 6; ++i) put(r.accel_measured(i), ',');
      out << (r.saturated ? 1 : 0) << ',' << (r.contact ? 1 : 0) << '\n';
    }
  }
};

struct EngineOptions {
  bool noise = true;
  bool controller_enabled = true;
  bool zero_gravity = false;
  std::array<bool, 6> tracking_axes{};  // per-axis 2-DOF setpoint weighting
  Mat6 coupling_truth = Mat6::Identity();
  Mat6 rectifier = Mat6::Identity();
  BaseExcitation excitation{};
};

/// Full closed-loop cycle: sense, regulate, linearize, rectify, allocate,
/// drive, integrate. The controller side only ever sees sensor outputs and
/// the fitted actuator model; the plant side uses the ground-truth field.
class SimulationEngine {
 public:
  SimulationEngine(const HarnessConfig& config, std::uint64_t seed,
                   const EngineOptions& options)
      : config_(config),
        options_(options),
        model_geometry_(config.geometry),
        plant_truth_geometry_(config.plant_geometry()),
        layout_(ActuatorLayout::standard(config.geometry)),
        truth_field_(config.field),
        sensors_(config.sensors, seed ^ 0x5eed5eedULL, options.noise),
        allocator_(build_mixing_matrix(config.geometry), config.current_limit) {
    if (options_.zero_gravity) {
      model_geometry_.gravity = 0.0;
      plant_truth_geometry_.gravity = 0.0;
    }
    truth_field_.scale *= config.plant_gain_scale;

    const CalibrationGrid grid = synthesize_calibration(
        config.field, config.calibration_spacing, config.calibration_noise_rms,
        seed ^ 0xca11b7a7eULL);
    model_ = fit_model(grid, static_cast<int>(config.field_fit_order));

    CouplingMatrix coupling;
    coupling.matrix = options.coupling_truth;
    plant_ = std::make_unique<Plant>(plant_truth_geometry_, coupling, options.excitation);

    const double inertias[6] = {
        model_geometry_.mass, model_geometry_.mass, model_geometry_.mass,
        model_geometry_.inertia(0, 0), model_geometry_.inertia(1, 1),
        model_geometry_.inertia(2, 2)};
    for (int i = 0; i < 6; ++i) {
      axis_inertia_[static_cast<size_t>(i)] = inertias[i];
      controllers_[static_cast<size_t>(i)] = AxisController(
          config.gains[static_cast<size_t>(i)], options.tracking_axes[static_cast<size_t>(i)]);
    }
    velocity_decay_ = std::exp(-config.velocity_filter_pole * config.sample_period);
  }

  Plant& plant() { return *plant_; }
  const Plant& plant() const { return *plant_; }
  const ActuatorModel& actuator_model() const { return model_; }
  const PlatformGeometry& model_geometry() const { return model_geometry_; }
  double time() const { return plant_->time(); }
  double sample_period() const { return config_.sample_period; }

  void set_floater_state(const PlantState& s) { plant_->set_state(s); }

  struct CycleInput {
    Vec6 setpoint = Vec6::Zero();   // relative pose targets (pos, euler)
    Vec6 accel_ff = Vec6::Zero();   // feedforward accelerations
  };

  struct CycleOutput {
    double t_end = 0.0;
    RigidState floater;             // truth at the end of the cycle
    BaseExcitation::Motion base;    // at the end of the cycle
    Vec6 pose_estimate = Vec6::Zero();
    Vec6 velocity_estimate = Vec6::Zero();
    Vec6 accel_measured = Vec6::Zero();
    Vec3 accel_true_linear = Vec3::Zero();
    Vec3 accel_true_angular = Vec3::Zero();
    Vec6 commanded_wrench = Vec6::Zero();
    Vec6 achieved_wrench = Vec6::Zero();
    Vec8 currents = Vec8::Zero();
    bool saturated = false;
    bool contact = false;
  };

  CycleOutput step(const CycleInput& input) {
    CycleOutput out;
    const double t = plant_->time();
    const BaseExcitation::Motion base_now = plant_->excitation().evaluate(t);

    // Truth relative state feeding the sensors.
    const PlantState& truth = plant_->state();
    RigidState relative;
    relative.position = truth.position - base_now.position;
    relative.velocity = truth.velocity - base_now.velocity;
    relative.euler = truth.euler;
    relative.euler_rates = euler_rate_map(truth.euler).inverse() * truth.omega;

    // PSD chain, then pose-rate estimation by filtered differentiation.
    const Vec6 psd = sensors_.measure_displacement(relative);
    Vec6 pose_est;
    pose_est << psd(0), psd(1), psd(3), psd(4), psd(5), psd(2);
    if (!velocity_primed_) {
      velocity_state_ = pose_est;
      velocity_primed_ = true;
    }
    Vec6 vel_est;
    for (int i = 0; i < 6; ++i) {
      vel_est(i) = config_.velocity_filter_pole * (pose_est(i) - velocity_state_(i));
      velocity_state_(i) = velocity_decay_ * velocity_state_(i) +
                           (1.0 - velocity_decay_) * pose_est(i);
    }

    // Accelerometers observe the interval just completed (held wrench).
    const Vec6 accel_meas = sensors_.measure_acceleration(
        last_accel_.linear, last_accel_.angular, plant_truth_geometry_.gravity);

    Vec6 commanded = Vec6::Zero();
    AllocationResult alloc;
    if (options_.controller_enabled) {
      Vec6 virtual_accel = input.accel_ff;
      for (int i = 0; i < 6; ++i) {
        const double u = controllers_[static_cast<size_t>(i)].step(
            input.setpoint(i), pose_est(i), accel_meas(i));
        virtual_accel(i) += u / axis_inertia_[static_cast<size_t>(i)];
      }

      StateEstimate est;
      est.relative_position = pose_est.head<3>();
      est.relative_velocity = vel_est.head<3>();
      est.euler = pose_est.tail<3>();
      est.euler_rates = vel_est.tail<3>();
      const Wrench target = linearize_wrench(model_geometry_, est, virtual_accel);
      commanded = options_.rectifier * target.as_vector();

      // Allocation gains at the coil offsets implied by the measured pose.
      RigidState est_state;
      est_state.position = est.relative_position;
      est_state.euler = est.euler;
      Vec8 gains;
      for (int i = 0; i < kNumActuators; ++i) {
        const Eigen::Vector2d yz = coil_local_displacement(layout_, est_state, i);
        gains(i) = model_.force_per_ampere(yz.x(), yz.y());
      }
      allocator_.set_gains(gains);
      alloc = allocate_qp(allocator_, Wrench::from_vector(commanded));
      if (config_.sensors.quantization && options_.noise)
        for (int i = 0; i < kNumActuators; ++i)
          alloc.motor_currents(i) =
              quantize(alloc.motor_currents(i), config_.current_limit, kDacBits);
    }

    // The plant converts currents back to forces through the true field.
    RigidState true_rel;
    true_rel.position = relative.position;
    true_rel.euler = relative.euler;
    Vec8 true_forces = Vec8::Zero();
    for (int i = 0; i < kNumActuators; ++i) {
      if (alloc.motor_currents(i) == 0.0) continue;
      const Eigen::Vector2d yz = coil_local_displacement(layout_, true_rel, i);
      true_forces(i) = alloc.motor_currents(i) * truth_field_.evaluate(yz.x(), yz.y());
    }
    const Wrench achieved = apply_mixing(allocator_.mixing(), true_forces);

    plant_->step(achieved, config_.sample_period, config_.plant_substeps);
    last_accel_ = plant_->acceleration(achieved);

    out.t_end = plant_->time();
    out.floater = plant_->state().to_rigid_state();
    out.base = plant_->excitation().evaluate(out.t_end);
    out.pose_estimate = pose_est;
    out.velocity_estimate = vel_est;
    out.accel_measured = accel_meas;
    out.accel_true_linear = last_accel_.linear;
    out.accel_true_angular = last_accel_.angular;
    out.commanded_wrench = commanded;
    out.achieved_wrench = achieved.as_vector();
    out.currents = alloc.motor_currents;
    out.saturated = alloc.any_saturated;
    out.contact = plant_->contact_stop();
    return out;
  }

  static constexpr int kDacBits = 16;

 private:
  HarnessConfig config_;
  EngineOptions options_;
  PlatformGeometry model_geometry_;
  PlatformGeometry plant_truth_geometry_;
  ActuatorLayout layout_;
  FieldGroundTruth truth_field_;
  ActuatorModel model_;
  SensorChain sensors_;
  AllocatorState allocator_;
  std::unique_ptr<Plant> plant_;
  std::array<AxisController, 6> controllers_;
  std::array<double, 6> axis_inertia_{};
  Vec6 velocity_state_ = Vec6::Zero();
  bool velocity_primed_ = false;
  double velocity_decay_ = 0.0;
  PlantAcceleration last_accel_;
};

}  // namespace mvip
