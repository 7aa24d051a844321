#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "mvip/core.hpp"
#include "mvip/errors.hpp"

namespace mvip {

/// Mid-riser quantizer over a symmetric full-scale range.
inline double quantize(double value, double full_scale, int bits) {
  const double lsb = 2.0 * full_scale / static_cast<double>(1ull << bits);
  const double clamped = std::clamp(value, -full_scale, full_scale);
  return std::round(clamped / lsb) * lsb;
}

/// Measurement-chain parameters. Noise magnitudes are per-sample RMS values;
/// zeroing them (or disabling noise wholesale) makes the chain exact apart
/// from quantization, which has its own switch.
struct SensorSuite {
  double d1 = 0.1, d2 = 0.1, d3 = 0.1;   // PSD offsets, m
  double psd_noise_rms = 100e-9;         // m, per channel
  double rotation_noise_rms = 1e-5;      // rad, on recovered rotations
  double accel_noise_rms = 2e-4;         // m/s^2 white, per sample
  double accel_bias_walk = 1e-5;         // m/s^2 per sqrt(s)
  double sample_period = 5e-4;           // s
  bool quantization = true;
  double psd_full_scale = 6e-3;          // m, 18-bit ADC range
  double accel_full_scale = 50.0;        // m/s^2, 18-bit ADC range
  int adc_bits = 18;

  void validate() const {
    if (!(d1 + d3 > 0.0)) throw DegenerateGeometry("d1 + d3 must be positive");
    if (!(d2 > 0.0)) throw DegenerateGeometry("d2 must be positive");
    if (psd_noise_rms < 0.0 || rotation_noise_rms < 0.0 || accel_noise_rms < 0.0 ||
        accel_bias_walk < 0.0)
      throw Config("sensor noise parameters must be non-negative");
    if (!(sample_period > 0.0)) throw Config("sample period must be positive");
  }
};

/// Displacement vector ordering used by the PSD map:
/// (dx, dy, dphi, dz, dpsi, dtheta) with phi the z rotation, psi the x
/// rotation and theta the y rotation.
inline Vec6 psd_displacement_from_state(const RigidState& relative) {
  Vec6 d;
  d << relative.position.x(), relative.position.y(), relative.euler.z(),
      relative.position.z(), relative.euler.x(), relative.euler.y();
  return d;
}

inline RigidState psd_state_from_displacement(const Vec6& d) {
  RigidState s;
  s.position = Vec3(d(0), d(1), d(3));
  s.euler = Vec3(d(4), d(5), d(2));
  return s;
}

/// Linear map from floater displacement to the six PSD spot readings
/// (p1y, p2y, p3y, p1z, p2z, p3z).
inline Mat6 psd_forward_matrix(const SensorSuite& suite) {
  const double d1 = suite.d1, d2 = suite.d2, d3 = suite.d3;
  Mat6 m = Mat6::Zero();
  m(0, 0) = 1;  m(0, 2) = -d1;
  m(1, 1) = 1;  m(1, 2) = -d2;
  m(2, 0) = -1; m(2, 2) = -d3;
  m(3, 3) = 1;  m(3, 4) = d1;
  m(4, 3) = 1;  m(4, 5) = d2;
  m(5, 3) = 1;  m(5, 4) = -d3;
  return m;
}

/// Exact inverse of the forward map, built from the two 3x3 blocks at
/// construction time. The translational rows agree with the printed
/// closed-form coefficients; the rotational rows follow by inversion.
inline Mat6 psd_inverse_matrix(const SensorSuite& suite) {
  suite.validate();
  const Mat6 fwd = psd_forward_matrix(suite);
  Mat6 inv = Mat6::Zero();
  inv.topLeftCorner<3, 3>() = fwd.topLeftCorner<3, 3>().inverse();
  inv.bottomRightCorner<3, 3>() = fwd.bottomRightCorner<3, 3>().inverse();
  return inv;
}

inline Vec6 psd_forward(const SensorSuite& suite, const Vec6& displacement) {
  return psd_forward_matrix(suite) * displacement;
}

inline Vec6 psd_inverse(const SensorSuite& suite, const Vec6& readings) {
  return psd_inverse_matrix(suite) * readings;
}

/// Stateful measurement chain: seeded noise, accelerometer bias random walk
/// and converter quantization. One instance per plant.
class SensorChain {
 public:
  SensorChain(const SensorSuite& suite, std::uint64_t seed, bool noise_enabled)
      : suite_(suite),
        forward_(psd_forward_matrix(suite)),
        inverse_(psd_inverse_matrix(suite)),
        rng_(seed),
        noise_enabled_(noise_enabled) {
    suite_.validate();
  }

  const SensorSuite& suite() const { return suite_; }

  /// PSD-derived relative displacement estimate (forward map, channel noise,
  /// ADC quantization, inversion, rotation noise).
  Vec6 measure_displacement(const RigidState& relative) {
    Vec6 readings = forward_ * psd_displacement_from_state(relative);
    if (noise_enabled_ && suite_.psd_noise_rms > 0.0)
      for (int i = 0; i < 6; ++i) readings(i) += suite_.psd_noise_rms * gauss_(rng_);
    if (quantization_active())
      for (int i = 0; i < 6; ++i)
        readings(i) = quantize(readings(i), suite_.psd_full_scale, suite_.adc_bits);
    Vec6 disp = inverse_ * readings;
    if (noise_enabled_ && suite_.rotation_noise_rms > 0.0)
      for (int i : {2, 4, 5}) disp(i) += suite_.rotation_noise_rms * gauss_(rng_);
    return disp;
  }

  /// Six-channel accelerometer readout: linear channels observe proper
  /// acceleration (gravity shows up on z), angular channels observe the
  /// body angular acceleration directly.
  Vec6 measure_acceleration(const Vec3& linear, const Vec3& angular, double gravity) {
    Vec6 truth;
    truth << linear - Vec3(0.0, 0.0, gravity), angular;
    if (noise_enabled_) {
      for (int i = 0; i < 6; ++i) {
        if (suite_.accel_bias_walk > 0.0)
          bias_(i) += suite_.accel_bias_walk * std::sqrt(suite_.sample_period) * gauss_(rng_);
        if (suite_.accel_noise_rms > 0.0)
          truth(i) += suite_.accel_noise_rms * gauss_(rng_);
        truth(i) += bias_(i);
      }
    }
    if (quantization_active())
      for (int i = 0; i < 6; ++i)
        truth(i) = quantize(truth(i), suite_.accel_full_scale, suite_.adc_bits);
    return truth;
  }

  const Vec6& accelerometer_bias() const { return bias_; }
  bool noise_enabled() const { return noise_enabled_; }

  /// The noiseless mode idealizes the converters too.
  bool quantization_active() const { return noise_enabled_ && suite_.quantization; }

 private:
  SensorSuite suite_;
  Mat6 forward_;
  Mat6 inverse_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  Vec6 bias_ = Vec6::Zero();
  bool noise_enabled_;
};

}  // namespace mvip
