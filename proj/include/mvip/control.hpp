#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "mvip/core.hpp"
#include "mvip/errors.hpp"
#include "mvip/plant.hpp"

namespace mvip {

/// One axis of the 2 kHz discrete stack: I-PD with filtered derivative and
/// band-passed acceleration compensation.
struct ControllerGains {
  double kp = 58.0;            // N/m or N*m/rad
  double ki = 17.5;            // N/(m*s)
  double kd = 25.0;            // N*s/m
  double deriv_pole = 11.3097; // rad/s, low-pass on the derivative
  double ka = 1.6;             // kg or kg*m^2, acceleration gain
  double bp_wn = 2.0 * M_PI * 8.0;  // rad/s, band-pass center
  double bp_xi = 0.7;          // band-pass span
  double sample_period = 5e-4; // s
  double setpoint_lowpass_hz = 0.2;  // 0 disables the reference low-pass

  /// `inertia` is the mass (translation) or the moment of inertia (rotation)
  /// seen by this axis; the acceleration gain must stay strictly below it.
  void validate(double inertia) const {
    if (!(sample_period > 0.0)) throw Config("sample period must be positive");
    if (!(deriv_pole > 0.0)) throw Config("derivative filter pole must be positive");
    if (!(bp_wn > 0.0 && bp_xi > 0.0)) throw Config("band-pass parameters must be positive");
    if (!(ka < inertia))
      throw Config("acceleration gain must be smaller than the axis inertia");
    if (ka < 0.0) throw Config("acceleration gain must be non-negative");
  }
};

/// Second-order discrete section in direct form II transposed.
class Biquad {
 public:
  Biquad() = default;
  Biquad(const std::array<double, 3>& b, const std::array<double, 3>& a)
      : b_(b), a_(a) {}

  double step(double x) {
    const double y = b_[0] * x + s1_;
    s1_ = b_[1] * x - a_[1] * y + s2_;
    s2_ = b_[2] * x - a_[2] * y;
    return y;
  }
  void reset() { s1_ = s2_ = 0.0; }

  std::complex<double> response(double omega, double ts) const {
    const std::complex<double> z = std::exp(std::complex<double>(0.0, omega * ts));
    const std::complex<double> zi = 1.0 / z;
    return (b_[0] + b_[1] * zi + b_[2] * zi * zi) /
           (1.0 + a_[1] * zi + a_[2] * zi * zi);
  }

 private:
  std::array<double, 3> b_{0.0, 0.0, 0.0};
  std::array<double, 3> a_{1.0, 0.0, 0.0};
  double s1_ = 0.0, s2_ = 0.0;
};

/// Band-pass 2*xi*wn*s / (s^2 + 2*xi*wn*s + wn^2) discretized by the
/// bilinear transform prewarped at wn, preserving the unity passband gain.
inline Biquad bandpass_wa(double wn, double xi, double ts) {
  if (!(wn > 0.0 && xi > 0.0)) throw Config("band-pass parameters must be positive");
  if (!(ts > 0.0)) throw Config("sample period must be positive");
  if (wn >= M_PI / ts)
    throw NyquistViolation("band-pass center at or above the Nyquist rate");
  const double k = wn / std::tan(wn * ts / 2.0);
  const double a0 = k * k + 2.0 * xi * wn * k + wn * wn;
  return Biquad({2.0 * xi * wn * k / a0, 0.0, -2.0 * xi * wn * k / a0},
                {1.0, (-2.0 * k * k + 2.0 * wn * wn) / a0,
                 (k * k - 2.0 * xi * wn * k + wn * wn) / a0});
}

/// Continuous-design transfer functions used by the loop analysis.
inline std::complex<double> controller_tf(const ControllerGains& g,
                                          std::complex<double> s) {
  return g.kp + g.ki / s + g.kd * s * g.deriv_pole / (s + g.deriv_pole);
}

inline std::complex<double> bandpass_tf(const ControllerGains& g,
                                        std::complex<double> s) {
  return 2.0 * g.bp_xi * g.bp_wn * s /
         (s * s + 2.0 * g.bp_xi * g.bp_wn * s + g.bp_wn * g.bp_wn);
}

/// Discrete per-axis loop state. In the regulation form (tracking_mode off)
/// the proportional and derivative actions see the measurement only, so a
/// setpoint step passes only through the integrator. The tracking form
/// weights the setpoint into both paths (2-DOF weighting) for contouring.
class AxisController {
 public:
  AxisController() : AxisController(ControllerGains{}, false) {}
  AxisController(const ControllerGains& gains, bool tracking_mode)
      : gains_(gains),
        tracking_(tracking_mode),
        wa_(bandpass_wa(gains.bp_wn, gains.bp_xi, gains.sample_period)) {
    const double ts = gains_.sample_period;
    deriv_decay_ = std::exp(-gains_.deriv_pole * ts);
    if (gains_.setpoint_lowpass_hz > 0.0)
      ref_decay_ = std::exp(-2.0 * M_PI * gains_.setpoint_lowpass_hz * ts);
  }

  const ControllerGains& gains() const { return gains_; }
  bool tracking_mode() const { return tracking_; }

  void reset() {
    integrator_ = 0.0;
    prev_error_ = 0.0;
    deriv_state_ = 0.0;
    ref_state_ = 0.0;
    accel_delay_ = 0.0;
    wa_.reset();
    primed_ = false;
  }

  /// One 2 kHz update. `setpoint` and `measured` are positions (or angles),
  /// `measured_accel` the floater acceleration on this axis. Returns the
  /// virtual force (or torque) command.
  double step(double setpoint, double measured, double measured_accel) {
    const double ts = gains_.sample_period;

    double r = setpoint;
    if (gains_.setpoint_lowpass_hz > 0.0) {
      if (!primed_) ref_state_ = setpoint;  // avoid an artificial startup ramp
      ref_state_ = ref_decay_ * ref_state_ + (1.0 - ref_decay_) * setpoint;
      r = ref_state_;
    }

    const double error = r - measured;
    const double fb = tracking_ ? -error : measured;
    if (!primed_) {
      // Bumpless engagement: the integrator sees a full first trapezoid and
      // the derivative filter starts on the signal, producing no kick.
      prev_error_ = error;
      deriv_state_ = fb;
      primed_ = true;
    }
    integrator_ += 0.5 * ts * (error + prev_error_);
    prev_error_ = error;

    // Filtered derivative of the feedback signal (measurement, or error in
    // tracking mode): kd * N * (x - lowpass(x)).
    const double deriv = gains_.deriv_pole * (fb - deriv_state_);
    deriv_state_ = deriv_decay_ * deriv_state_ + (1.0 - deriv_decay_) * fb;

    const double prop = tracking_ ? -error : measured;

    // Acceleration path carries exactly one sample of delay.
    double accel_term = 0.0;
    const double wa_now = wa_.step(measured_accel);
    if (gains_.ka != 0.0) accel_term = gains_.ka * accel_delay_;
    accel_delay_ = wa_now;

    return gains_.ki * integrator_ - gains_.kp * prop - gains_.kd * deriv - accel_term;
  }

 private:
  ControllerGains gains_;
  bool tracking_ = false;
  Biquad wa_;
  double deriv_decay_ = 0.0;
  double ref_decay_ = 0.0;
  double integrator_ = 0.0;
  double prev_error_ = 0.0;
  double deriv_state_ = 0.0;
  double ref_state_ = 0.0;
  double accel_delay_ = 0.0;
  bool primed_ = false;
};

/// Model-based estimate of the floater state used for the inverse-dynamics
/// wrench; relative pose/rates come from the PSD chain, the angular velocity
/// from the euler-rate map.
struct StateEstimate {
  Vec3 relative_position = Vec3::Zero();
  Vec3 relative_velocity = Vec3::Zero();
  Vec3 euler = Vec3::Zero();
  Vec3 euler_rates = Vec3::Zero();
};

/// Inverse dynamics: converts the per-axis virtual accelerations into the
/// commanded CoM wrench, cancelling modeled gravity, cable reaction and the
/// gyroscopic term. The model geometry may deliberately differ from the
/// plant's.
inline Wrench linearize_wrench(const PlatformGeometry& model,
                               const StateEstimate& est,
                               const Vec6& virtual_accel) {
  RigidState relative;
  relative.position = est.relative_position;
  relative.velocity = est.relative_velocity;
  relative.euler = est.euler;
  relative.euler_rates = est.euler_rates;
  const Wrench cable = cable_wrench(model, relative);

  const Mat3 rate_map = euler_rate_map(est.euler);
  const Vec3 omega = rate_map * est.euler_rates;

  Wrench cmd;
  cmd.force = model.mass * virtual_accel.head<3>() -
              Vec3(0.0, 0.0, model.mass * model.gravity) - cable.force;
  cmd.torque = model.inertia * (rate_map * virtual_accel.tail<3>()) +
               omega.cross(model.inertia * omega) - cable.torque;
  return cmd;
}

/// Analytic loop metrics per axis from the continuous design.
struct LoopReport {
  double crossover_hz = 0.0;
  double phase_margin_deg = 0.0;
  double closed_loop_cutoff_hz = 0.0;
  double dc_transmissibility_db = 0.0;
  double hf_slope_db_per_decade = 0.0;    // 100 Hz -> 1 kHz
  double band_slope_db_per_decade = 0.0;  // fitted over 1..10 Hz
  double peak_db = 0.0;
  bool stable = true;
};

namespace detail {

inline std::complex<double> effective_inertia(const ControllerGains& g,
                                              double inertia,
                                              std::complex<double> s) {
  return inertia + bandpass_tf(g, s) * g.ka * std::exp(-s * g.sample_period);
}

inline std::complex<double> open_loop_tf(const ControllerGains& g, double inertia,
                                         std::complex<double> s) {
  return controller_tf(g, s) / (s * s * effective_inertia(g, inertia, s));
}

inline std::complex<double> transmissibility_tf(const ControllerGains& g,
                                                double inertia,
                                                std::complex<double> s) {
  const std::complex<double> c = controller_tf(g, s);
  return c / (c + s * s * effective_inertia(g, inertia, s));
}

}  // namespace detail

inline LoopReport analyze_loop(const ControllerGains& gains, double inertia) {
  LoopReport rep;
  auto mag_db = [](std::complex<double> v) { return 20.0 * std::log10(std::abs(v)); };

  // Crossover by log-grid scan plus bisection refinement.
  const int n = 4000;
  double prev_f = 1e-3, prev_mag = 1e9;
  double fc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double f = std::pow(10.0, -3.0 + 6.0 * i / n);
    const double m = std::abs(detail::open_loop_tf(gains, inertia, {0.0, 2.0 * M_PI * f}));
    if (prev_mag >= 1.0 && m < 1.0) {
      double lo = prev_f, hi = f;
      for (int k = 0; k < 60; ++k) {
        const double mid = std::sqrt(lo * hi);
        if (std::abs(detail::open_loop_tf(gains, inertia, {0.0, 2.0 * M_PI * mid})) >= 1.0)
          lo = mid;
        else
          hi = mid;
      }
      fc = std::sqrt(lo * hi);
      break;
    }
    prev_f = f;
    prev_mag = m;
  }
  rep.crossover_hz = fc;
  if (fc > 0.0) {
    const std::complex<double> l =
        detail::open_loop_tf(gains, inertia, {0.0, 2.0 * M_PI * fc});
    double pm = 180.0 + std::arg(l) * 180.0 / M_PI;
    if (pm > 180.0) pm -= 360.0;
    rep.phase_margin_deg = pm;
    rep.stable = pm > 0.0;
  } else {
    rep.stable = false;
  }

  rep.dc_transmissibility_db =
      mag_db(detail::transmissibility_tf(gains, inertia, {0.0, 2.0 * M_PI * 1e-4}));
  rep.hf_slope_db_per_decade =
      mag_db(detail::transmissibility_tf(gains, inertia, {0.0, 2.0 * M_PI * 1000.0})) -
      mag_db(detail::transmissibility_tf(gains, inertia, {0.0, 2.0 * M_PI * 100.0}));

  // Closed-loop cutoff: first downward -3 dB crossing.
  double cutoff = 0.0, peak = -1e9;
  double pf = 1e-3;
  double pmag = mag_db(detail::transmissibility_tf(gains, inertia, {0.0, 2.0 * M_PI * pf}));
  for (int i = 1; i <= n; ++i) {
    const double f = std::pow(10.0, -3.0 + 6.0 * i / n);
    const double m =
        mag_db(detail::transmissibility_tf(gains, inertia, {0.0, 2.0 * M_PI * f}));
    peak = std::max(peak, m);
    if (cutoff == 0.0 && pmag >= -3.0 && m < -3.0) {
      const double t = (-3.0 - pmag) / (m - pmag);
      cutoff = std::pow(10.0, std::log10(pf) + t * (std::log10(f) - std::log10(pf)));
    }
    pf = f;
    pmag = m;
  }
  rep.closed_loop_cutoff_hz = cutoff;
  rep.peak_db = peak;

  // Least-squares slope of |T| in dB against log10(f) over 1..10 Hz.
  const int nb = 60;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < nb; ++i) {
    const double lf = static_cast<double>(i) / (nb - 1);
    const double f = std::pow(10.0, lf);
    const double m =
        mag_db(detail::transmissibility_tf(gains, inertia, {0.0, 2.0 * M_PI * f}));
    sx += lf; sy += m; sxx += lf * lf; sxy += lf * m;
  }
  rep.band_slope_db_per_decade = (nb * sxy - sx * sy) / (nb * sxx - sx * sx);
  return rep;
}

/// Frequency-response table row for export.
struct LoopResponsePoint {
  double freq_hz;
  double open_loop_db;
  double open_loop_phase_deg;
  double transmissibility_db;
  double transmissibility_phase_deg;
};

inline std::vector<LoopResponsePoint> loop_response(const ControllerGains& gains,
                                                    double inertia,
                                                    double f_lo, double f_hi,
                                                    int points) {
  std::vector<LoopResponsePoint> out;
  out.reserve(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double f = std::pow(10.0, std::log10(f_lo) +
                                        (std::log10(f_hi) - std::log10(f_lo)) * i /
                                            (points - 1));
    const std::complex<double> s(0.0, 2.0 * M_PI * f);
    const auto l = detail::open_loop_tf(gains, inertia, s);
    const auto t = detail::transmissibility_tf(gains, inertia, s);
    out.push_back({f, 20.0 * std::log10(std::abs(l)), std::arg(l) * 180.0 / M_PI,
                   20.0 * std::log10(std::abs(t)), std::arg(t) * 180.0 / M_PI});
  }
  return out;
}

}  // namespace mvip
