#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "mvip/core.hpp"
#include "mvip/errors.hpp"

namespace mvip {

/// Cross-coupling applied to the commanded wrench before it reaches the
/// floater; identity under the nominal decoupled scheme.
struct CouplingMatrix {
  Mat6 matrix = Mat6::Identity();

  void validate() const {
    Eigen::JacobiSVD<Mat6> svd(matrix);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin >= 1e6)
      throw Config("coupling matrix must be invertible (condition < 1e6)");
  }
};

/// Umbilical-cable reaction for a floater state relative to the base:
/// restoring spring and damper on every axis.
inline Wrench cable_wrench(const PlatformGeometry& geom, const RigidState& relative) {
  Vec6 pose;
  pose << relative.position, relative.euler;
  Vec6 rates;
  rates << relative.velocity, relative.euler_rates;
  const Vec6 w = -(geom.cable_stiffness.cwiseProduct(pose) +
                   geom.cable_damping.cwiseProduct(rates));
  return Wrench::from_vector(w);
}

/// Base (stator) translational motion profiles. Position, velocity and
/// acceleration are analytic and mutually consistent.
struct BaseExcitation {
  enum class Kind { Still, Sine, LogSweep };
  Kind kind = Kind::Still;
  Vec3 axis = Vec3::UnitX();
  double accel_amplitude = 0.0;  // m/s^2
  double freq_start = 1.0;       // Hz (sine frequency, or sweep start)
  double freq_end = 1.0;         // Hz
  double duration = 1.0;         // s, sweep length

  struct Motion {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Vec3 acceleration = Vec3::Zero();
  };

  void validate() const {
    if (kind == Kind::Still) return;
    if (!(accel_amplitude >= 0.0)) throw BadProfile("excitation amplitude must be >= 0");
    if (!(freq_start > 0.0)) throw BadProfile("excitation frequency must be positive");
    if (kind == Kind::LogSweep) {
      if (!(freq_end > 0.0)) throw BadProfile("sweep end frequency must be positive");
      if (!(duration > 0.0)) throw BadProfile("sweep duration must be positive");
    }
    if (std::abs(axis.norm() - 1.0) > 1e-9) throw BadProfile("excitation axis must be unit");
  }

  double instantaneous_frequency(double t) const {
    if (kind != Kind::LogSweep) return freq_start;
    const double lam = std::log(freq_end / freq_start) / duration;
    return freq_start * std::exp(lam * t);
  }

  Motion evaluate(double t) const {
    Motion m;
    if (kind == Kind::Still || accel_amplitude == 0.0) return m;
    double pos, vel, acc;
    if (kind == Kind::Sine || freq_end == freq_start) {
      const double w = 2.0 * M_PI * freq_start;
      const double amp = accel_amplitude / (w * w);
      pos = amp * std::sin(w * t);
      vel = amp * w * std::cos(w * t);
      acc = -accel_amplitude * std::sin(w * t);
    } else {
      // Constant-acceleration-amplitude logarithmic sweep: the displacement
      // envelope shrinks as 1/f(t)^2 and all derivatives are closed form.
      const double lam = std::log(freq_end / freq_start) / duration;
      const double w0 = 2.0 * M_PI * freq_start;
      const double el = std::exp(lam * t);
      const double phase = w0 * (el - 1.0) / lam;
      const double phase_d = w0 * el;
      const double phase_dd = lam * phase_d;
      const double env = accel_amplitude / (phase_d * phase_d);
      const double env_d = -2.0 * lam * env;
      const double env_dd = 4.0 * lam * lam * env;
      const double sp = std::sin(phase), cp = std::cos(phase);
      pos = env * sp;
      vel = env_d * sp + env * phase_d * cp;
      acc = env_dd * sp + 2.0 * env_d * phase_d * cp + env * phase_dd * cp -
            env * phase_d * phase_d * sp;
    }
    m.position = axis * pos;
    m.velocity = axis * vel;
    m.acceleration = axis * acc;
    return m;
  }
};

/// Integration state of the floater. Orientation rates are carried as the
/// body angular velocity so Euler's equation integrates exactly; euler-angle
/// rates are derived through the rate map on demand.
struct PlantState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 euler = Vec3::Zero();
  Vec3 omega = Vec3::Zero();  // body angular velocity, rad/s

  using Packed = Eigen::Matrix<double, 12, 1>;

  Packed pack() const {
    Packed x;
    x << position, velocity, euler, omega;
    return x;
  }
  static PlantState unpack(const Packed& x) {
    PlantState s;
    s.position = x.segment<3>(0);
    s.velocity = x.segment<3>(3);
    s.euler = x.segment<3>(6);
    s.omega = x.segment<3>(9);
    return s;
  }

  RigidState to_rigid_state() const {
    RigidState r;
    r.position = position;
    r.velocity = velocity;
    r.euler = euler;
    r.euler_rates = euler_rate_map(euler).inverse() * omega;
    return r;
  }
  static PlantState from_rigid_state(const RigidState& r) {
    PlantState s;
    s.position = r.position;
    s.velocity = r.velocity;
    s.euler = r.euler;
    s.omega = euler_rate_map(r.euler) * r.euler_rates;
    return s;
  }
};

/// Instantaneous accelerations produced by the plant; exported so the
/// sensing chain can observe them directly.
struct PlantAcceleration {
  Vec3 linear = Vec3::Zero();   // m/s^2
  Vec3 angular = Vec3::Zero();  // body omega-dot, rad/s^2
};

/// Newton-Euler right-hand side. The commanded wrench passes through the
/// coupling matrix; cable forces act on the state relative to the base.
inline PlantState::Packed dynamics_rhs(const PlatformGeometry& geom,
                                       const CouplingMatrix& coupling,
                                       const PlantState& state,
                                       const BaseExcitation::Motion& base,
                                       const Wrench& commanded,
                                       PlantAcceleration* accel_out = nullptr) {
  const Wrench applied = Wrench::from_vector(coupling.matrix * commanded.as_vector());

  const Mat3 rate_map = euler_rate_map(state.euler);
  const Vec3 euler_rates = rate_map.inverse() * state.omega;

  RigidState relative;
  relative.position = state.position - base.position;
  relative.velocity = state.velocity - base.velocity;
  relative.euler = state.euler;
  relative.euler_rates = euler_rates;
  const Wrench cable = cable_wrench(geom, relative);

  const Vec3 gravity(0.0, 0.0, geom.mass * geom.gravity);
  const Vec3 linear_accel =
      (applied.force + cable.force + gravity) / geom.mass;
  const Vec3 omega_dot = geom.inertia.ldlt().solve(
      applied.torque + cable.torque - state.omega.cross(geom.inertia * state.omega));

  if (accel_out) {
    accel_out->linear = linear_accel;
    accel_out->angular = omega_dot;
  }

  PlantState::Packed dx;
  dx << state.velocity, linear_accel, euler_rates, omega_dot;
  return dx;
}

/// Classical fourth-order Runge-Kutta step for any fixed-size state.
template <typename State, typename Rhs>
State integrate_step(const Rhs& rhs, const State& state, double t, double dt) {
  if (!(dt > 0.0)) throw Config("integration step must be positive");
  const State k1 = rhs(state, t);
  const State k2 = rhs(state + 0.5 * dt * k1, t + 0.5 * dt);
  const State k3 = rhs(state + 0.5 * dt * k2, t + 0.5 * dt);
  const State k4 = rhs(state + dt * k3, t + dt);
  State next = state + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw NonFiniteState("integration diverged");
  return next;
}

/// Full simulated truth of the mechanical system: floater state, prescribed
/// base motion and contact monitoring against the stroke box.
class Plant {
 public:
  Plant(const PlatformGeometry& geom, const CouplingMatrix& coupling,
        const BaseExcitation& excitation)
      : geom_(geom), coupling_(coupling), excitation_(excitation) {
    geom_.validate();
    coupling_.validate();
    excitation_.validate();
  }

  const PlantState& state() const { return state_; }
  void set_state(const PlantState& s) { state_ = s; }
  double time() const { return time_; }
  const PlatformGeometry& geometry() const { return geom_; }
  const BaseExcitation& excitation() const { return excitation_; }
  const CouplingMatrix& coupling() const { return coupling_; }
  bool contact_stop() const { return contact_stop_; }

  BaseExcitation::Motion base_motion() const { return excitation_.evaluate(time_); }

  /// Accelerations for the currently held wrench, for the sensing chain.
  PlantAcceleration acceleration(const Wrench& commanded) const {
    PlantAcceleration acc;
    dynamics_rhs(geom_, coupling_, state_, excitation_.evaluate(time_), commanded, &acc);
    return acc;
  }

  /// Advances one zero-order-hold interval of the commanded wrench, split
  /// into `substeps` RK4 steps. Raises the contact flag (and stops
  /// advancing) once the relative position leaves the stroke box.
  void step(const Wrench& commanded, double dt, int substeps) {
    if (contact_stop_) return;
    if (substeps < 1) throw Config("substeps must be >= 1");
    const double h = dt / substeps;
    auto rhs = [&](const PlantState::Packed& x, double t) {
      return dynamics_rhs(geom_, coupling_, PlantState::unpack(x),
                          excitation_.evaluate(t), commanded);
    };
    PlantState::Packed x = state_.pack();
    for (int i = 0; i < substeps; ++i) {
      x = integrate_step(rhs, x, time_, h);
      time_ += h;
    }
    state_ = PlantState::unpack(x);
    const Vec3 rel = state_.position - excitation_.evaluate(time_).position;
    if ((rel.cwiseAbs().array() > geom_.stroke_half_range.array()).any())
      contact_stop_ = true;
  }

 private:
  PlatformGeometry geom_;
  CouplingMatrix coupling_;
  BaseExcitation excitation_;
  PlantState state_;
  double time_ = 0.0;
  bool contact_stop_ = false;
};

}  // namespace mvip
