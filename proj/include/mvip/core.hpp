#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "mvip/errors.hpp"

namespace mvip {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat68 = Eigen::Matrix<double, 6, 8>;

inline constexpr int kNumActuators = 8;

/// Margin kept from the euler-rate-map singularity at |pitch| = pi/2.
inline constexpr double kGimbalGuard = 1e-3;

/// Force gain floor below which current inversion is refused.
inline constexpr double kMinGain = 0.1;  // N/A

/// Resultant force/torque pair at the floater's CoM, floater axes.
struct Wrench {
  Vec3 force = Vec3::Zero();    // N
  Vec3 torque = Vec3::Zero();   // N*m

  Vec6 as_vector() const {
    Vec6 v;
    v << force, torque;
    return v;
  }
  static Wrench from_vector(const Vec6& v) {
    return Wrench{v.head<3>(), v.tail<3>()};
  }
  bool all_finite() const {
    return force.allFinite() && torque.allFinite();
  }
};

/// Floater pose and rates. Angles are the (alpha, beta, gamma) triple used
/// by both the rotation matrix and the euler-rate map; alpha rotates about
/// x, beta about y, gamma about z.
struct RigidState {
  Vec3 position = Vec3::Zero();      // m
  Vec3 euler = Vec3::Zero();         // rad
  Vec3 velocity = Vec3::Zero();      // m/s
  Vec3 euler_rates = Vec3::Zero();   // rad/s

  bool all_finite() const {
    return position.allFinite() && euler.allFinite() &&
           velocity.allFinite() && euler_rates.allFinite();
  }
};

/// Fixed platform dimensions, mass properties and cable model.
/// Cable stiffness/damping entries are restoring-convention (>= 0 opposes
/// displacement); negate entries to recover a non-restoring literal form.
struct PlatformGeometry {
  double l1 = 0.1;   // long moment arm, m
  double l2 = 0.08;  // short moment arm, m
  double d1 = 0.1;   // PSD sensor offsets from floater center, m
  double d2 = 0.1;
  double d3 = 0.1;
  double mass = 8.0;                     // kg
  Mat3 inertia = Mat3::Identity() * 0.12;  // kg*m^2, symmetric positive definite
  Vec6 cable_stiffness = Vec6::Zero();   // N/m (trans), N*m/rad (rot)
  Vec6 cable_damping = Vec6::Zero();     // N*s/m, N*m*s/rad
  double gravity = 9.8;                  // m/s^2; force on floater is +mass*gravity on z
  Vec3 stroke_half_range = Vec3(5e-3, 5e-3, 4e-3);  // m

  void validate() const {
    if (!(mass > 0.0)) throw Config("mass must be positive");
    if (!(l1 > 0.0 && l2 > 0.0)) throw Config("moment arms must be positive");
    if (!(d1 + d3 > 0.0)) throw Config("d1 + d3 must be positive");
    if (!(d2 > 0.0)) throw Config("d2 must be positive");
    if (!inertia.isApprox(inertia.transpose(), 1e-12))
      throw Config("inertia matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> es(inertia);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw Config("inertia matrix must be positive definite");
    if (cable_stiffness.minCoeff() < 0.0 || cable_damping.minCoeff() < 0.0)
      throw Config("cable stiffness/damping must be non-negative (restoring)");
    if (stroke_half_range.minCoeff() <= 0.0)
      throw Config("stroke box must be positive");
  }
};

enum class ActuatorAxis { HorizontalX, HorizontalY, VerticalZ };

/// One Lorentz actuator: where it sits on the floater, which way it pushes,
/// and the two local transverse axes its force gain is calibrated over.
struct ActuatorInfo {
  ActuatorAxis axis = ActuatorAxis::VerticalZ;
  Vec3 position = Vec3::Zero();   // mounting point in floater frame, m
  double sign = 1.0;              // force direction along the class axis
  Vec3 local_y = Vec3::UnitX();   // calibration y axis (unit)
  Vec3 local_z = Vec3::UnitZ();   // calibration z axis (unit)

  Vec3 force_direction() const {
    switch (axis) {
      case ActuatorAxis::HorizontalX: return sign * Vec3::UnitX();
      case ActuatorAxis::HorizontalY: return sign * Vec3::UnitY();
      case ActuatorAxis::VerticalZ: return sign * Vec3::UnitZ();
    }
    return Vec3::UnitZ();
  }
};

/// Eight actuators on four sides: 1,3,5,7 horizontal, 2,4,6,8 vertical
/// (1-based numbering as in the mixing matrix columns).
struct ActuatorLayout {
  std::array<ActuatorInfo, kNumActuators> actuators;

  /// Pinwheel layout whose wrench columns reproduce the canonical mixing
  /// matrix exactly: horizontals on face midplanes, verticals on corners.
  static ActuatorLayout standard(const PlatformGeometry& geom) {
    const double l1 = geom.l1, l2 = geom.l2;
    ActuatorLayout lay;
    auto set = [&lay](int i, ActuatorAxis ax, double sign, const Vec3& pos,
                      const Vec3& ly, const Vec3& lz) {
      lay.actuators[i] = ActuatorInfo{ax, pos, sign, ly, lz};
    };
    // Horizontal actuators: force along +/-x or +/-y, torque about z only.
    set(0, ActuatorAxis::HorizontalX, +1.0, Vec3(0, l1, 0), Vec3::UnitY(), Vec3::UnitX());
    set(2, ActuatorAxis::HorizontalY, +1.0, Vec3(l1, 0, 0), Vec3::UnitX(), Vec3::UnitY());
    set(4, ActuatorAxis::HorizontalX, -1.0, Vec3(0, -l1, 0), Vec3::UnitY(), Vec3::UnitX());
    set(6, ActuatorAxis::HorizontalY, -1.0, Vec3(-l1, 0, 0), Vec3::UnitX(), Vec3::UnitY());
    // Vertical actuators on the corner pinwheel.
    set(1, ActuatorAxis::VerticalZ, +1.0, Vec3(l2, l1, 0), Vec3::UnitX(), Vec3::UnitZ());
    set(3, ActuatorAxis::VerticalZ, +1.0, Vec3(l1, -l2, 0), Vec3::UnitX(), Vec3::UnitZ());
    set(5, ActuatorAxis::VerticalZ, +1.0, Vec3(-l2, -l1, 0), Vec3::UnitX(), Vec3::UnitZ());
    set(7, ActuatorAxis::VerticalZ, +1.0, Vec3(-l1, l2, 0), Vec3::UnitX(), Vec3::UnitZ());
    return lay;
  }

  /// Wrench column of actuator i for unit force.
  Vec6 wrench_column(int i) const {
    const ActuatorInfo& a = actuators[static_cast<size_t>(i)];
    Vec3 f = a.force_direction();
    Vec6 col;
    col << f, a.position.cross(f);
    return col;
  }
};

/// The 6x8 map from individual actuator forces to the CoM wrench.
/// Columns follow the canonical layout; rank is 6 for any positive arms.
inline Mat68 build_mixing_matrix(const PlatformGeometry& geom) {
  if (!(geom.l1 > 0.0 && geom.l2 > 0.0))
    throw Config("moment arms must be positive");
  const double l1 = geom.l1, l2 = geom.l2;
  Mat68 c;
  c <<  1,   0,  0,   0, -1,   0,  0,  0,
        0,   0,  1,   0,  0,   0, -1,  0,
        0,   1,  0,   1,  0,   1,  0,  1,
        0,  l1,  0, -l2,  0, -l1,  0, l2,
        0, -l2,  0, -l1,  0,  l2,  0, l1,
      -l1,   0, l1,   0, -l1,   0, l1,  0;
  return c;
}

inline Wrench apply_mixing(const Mat68& mixing, const Vec8& motor_forces) {
  return Wrench::from_vector(mixing * motor_forces);
}

/// Body-to-base rotation for euler = (alpha, beta, gamma):
/// R = Rx(alpha) * Ry(beta) * Rz(gamma).
inline Mat3 rotation_matrix(const Vec3& euler) {
  const double sa = std::sin(euler.x()), ca = std::cos(euler.x());
  const double sb = std::sin(euler.y()), cb = std::cos(euler.y());
  const double sg = std::sin(euler.z()), cg = std::cos(euler.z());
  Mat3 r;
  r << cb * cg, -cb * sg, sb,
       sa * sb * cg + ca * sg, -sa * sb * sg + ca * cg, -sa * cb,
       -ca * sb * cg + sa * sg, ca * sb * sg + sa * cg, ca * cb;
  return r;
}

/// Homogeneous floater-to-base transform.
inline Mat4 transform(const Vec3& euler, const Vec3& translation) {
  Mat4 t = Mat4::Identity();
  t.topLeftCorner<3, 3>() = rotation_matrix(euler);
  t.topRightCorner<3, 1>() = translation;
  return t;
}

/// Maps euler rates to the body angular velocity: omega = T * qdot.
/// Singular when |beta| approaches pi/2 (det = cos(beta)).
inline Mat3 euler_rate_map(const Vec3& euler) {
  const double beta = euler.y(), gamma = euler.z();
  if (std::abs(beta) >= M_PI / 2.0 - kGimbalGuard)
    throw GimbalProximity("pitch too close to pi/2 for euler-rate map");
  const double sb = std::sin(beta), cb = std::cos(beta);
  const double sg = std::sin(gamma), cg = std::cos(gamma);
  Mat3 t;
  t << cb * cg, sg, 0,
       -cb * sg, cg, 0,
       sb, 0, 1;
  return t;
}

/// RMS stroke demanded by a sinusoidal disturbance of acceleration amplitude
/// a_vib at frequency f_vib.
inline double required_stroke(double accel_amplitude, double frequency_hz) {
  if (!(frequency_hz > 0.0))
    throw NonPositiveFrequency("vibration frequency must be positive");
  const double w = 2.0 * M_PI * frequency_hz;
  return accel_amplitude / (w * w);
}

/// Numeric row rank with tolerance relative to the largest singular value.
inline int numeric_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-9) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++rank;
  return rank;
}

}  // namespace mvip
