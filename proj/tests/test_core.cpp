#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mvip/core.hpp"

using namespace mvip;

namespace {

PlatformGeometry geom_with_arms(double l1, double l2) {
  PlatformGeometry g;
  g.l1 = l1;
  g.l2 = l2;
  return g;
}

/// Body angular velocity extracted from the rotation matrix by central
/// differences: omega_hat = vee(R^T dR/dt).
Vec3 finite_difference_omega(const Vec3& euler, const Vec3& rates, double h) {
  const Mat3 r_plus = rotation_matrix(euler + h * rates);
  const Mat3 r_minus = rotation_matrix(euler - h * rates);
  const Mat3 r = rotation_matrix(euler);
  const Mat3 skew = r.transpose() * ((r_plus - r_minus) / (2.0 * h));
  return Vec3(skew(2, 1), skew(0, 2), skew(1, 0));
}

}  // namespace

TEST_CASE("mixing matrix reproduces the canonical columns") {
  const double l1 = 0.1, l2 = 0.08;
  const Mat68 c = build_mixing_matrix(geom_with_arms(l1, l2));

  Vec8 f = Vec8::Zero();
  f(0) = 1.0;
  Wrench w = apply_mixing(c, f);
  CHECK(w.force.isApprox(Vec3(1, 0, 0), 1e-15));
  CHECK(w.torque.isApprox(Vec3(0, 0, -l1), 1e-15));

  f.setZero();
  f(1) = 1.0;
  w = apply_mixing(c, f);
  CHECK(w.force.isApprox(Vec3(0, 0, 1), 1e-15));
  CHECK(w.torque.isApprox(Vec3(l1, -l2, 0), 1e-15));
}

TEST_CASE("vertical symmetry cancels all moments") {
  const Mat68 c = build_mixing_matrix(geom_with_arms(0.1, 0.08));
  Vec8 f;
  f << 0, 1, 0, 1, 0, 1, 0, 1;
  const Wrench w = apply_mixing(c, f);
  CHECK(w.force.isApprox(Vec3(0, 0, 4), 1e-15));
  CHECK(w.torque.norm() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("opposed x-forces leave a pure z-torque") {
  const double l1 = 0.13;
  const Mat68 c = build_mixing_matrix(geom_with_arms(l1, 0.06));
  Vec8 f;
  f << 1, 0, 0, 0, 1, 0, 0, 0;
  const Wrench w = apply_mixing(c, f);
  CHECK(w.force.norm() == Catch::Approx(0.0).margin(1e-15));
  CHECK(w.torque.isApprox(Vec3(0, 0, -2 * l1), 1e-15));
}

TEST_CASE("zero forces map to the zero wrench") {
  const Mat68 c = build_mixing_matrix(geom_with_arms(0.1, 0.08));
  const Wrench w = apply_mixing(c, Vec8::Zero());
  CHECK(w.force.norm() == 0.0);
  CHECK(w.torque.norm() == 0.0);
}

TEST_CASE("mixing matrix has rank 6 for any positive arms") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> arm(0.01, 0.4);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat68 c = build_mixing_matrix(geom_with_arms(arm(rng), arm(rng)));
    CHECK(numeric_rank(c) == 6);
  }
}

TEST_CASE("standard layout columns equal the mixing matrix columns") {
  const PlatformGeometry geom = geom_with_arms(0.11, 0.07);
  const Mat68 c = build_mixing_matrix(geom);
  const ActuatorLayout layout = ActuatorLayout::standard(geom);
  for (int i = 0; i < kNumActuators; ++i)
    CHECK((layout.wrench_column(i) - c.col(i)).norm() < 1e-15);
}

TEST_CASE("rotation matrix basics") {
  CHECK(rotation_matrix(Vec3::Zero()).isApprox(Mat3::Identity(), 1e-15));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(-0.3, 0.3);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 q(ang(rng), ang(rng), ang(rng));
    const Mat3 r = rotation_matrix(q);
    CHECK((r * r.transpose() - Mat3::Identity()).norm() < 1e-12);
    CHECK(r.determinant() == Catch::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rotation matrix about the middle angle matches its closed form") {
  const double theta = 0.37;
  const Mat3 r = rotation_matrix(Vec3(0, theta, 0));
  Mat3 expected;
  expected << std::cos(theta), 0, std::sin(theta),
              0, 1, 0,
              -std::sin(theta), 0, std::cos(theta);
  CHECK(r.isApprox(expected, 1e-15));
}

TEST_CASE("homogeneous transform carries rotation and translation") {
  const Vec3 q(0.1, -0.2, 0.05);
  const Vec3 p(1.0, 2.0, 3.0);
  const Mat4 t = transform(q, p);
  CHECK(t.topLeftCorner<3, 3>().isApprox(rotation_matrix(q), 1e-15));
  CHECK(t.topRightCorner<3, 1>().isApprox(p, 1e-15));
  CHECK(t.row(3).isApprox(Eigen::RowVector4d(0, 0, 0, 1), 1e-15));
}

TEST_CASE("euler rate map identity and singularity") {
  CHECK(euler_rate_map(Vec3::Zero()).isApprox(Mat3::Identity(), 1e-15));
  CHECK_THROWS_AS(euler_rate_map(Vec3(0, M_PI / 2, 0)), GimbalProximity);
  // Determinant carries the cos(beta) factor.
  const double beta = 0.4;
  CHECK(euler_rate_map(Vec3(0.2, beta, -0.1)).determinant() ==
        Catch::Approx(std::cos(beta)).epsilon(1e-12));
}

TEST_CASE("euler rate map agrees with finite-difference kinematics") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ang(-0.2, 0.2);
  std::uniform_real_distribution<double> rate(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 q(ang(rng), ang(rng), ang(rng));
    const Vec3 qd(rate(rng), rate(rng), rate(rng));
    const Vec3 omega = euler_rate_map(q) * qd;
    const Vec3 omega_fd = finite_difference_omega(q, qd, 1e-6);
    CHECK((omega - omega_fd).norm() < 1e-6);
  }
}

TEST_CASE("required stroke from the disturbance ceiling") {
  // 0.1 g at 3 Hz sizes the stroke to about 2.8 mm.
  const double x = required_stroke(0.98, 3.0);
  CHECK(x == Catch::Approx(2.76e-3).margin(0.05e-3));
  CHECK(required_stroke(0.0, 5.0) == 0.0);
  CHECK(required_stroke(1.0, 1.0 / (2.0 * M_PI)) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(required_stroke(1.0, 0.0), NonPositiveFrequency);
}

TEST_CASE("required stroke scaling laws") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(0.1, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = uni(rng), f = uni(rng), s = uni(rng);
    CHECK(required_stroke(s * a, f) ==
          Catch::Approx(s * required_stroke(a, f)).epsilon(1e-12));
    CHECK(required_stroke(a, s * f) ==
          Catch::Approx(required_stroke(a, f) / (s * s)).epsilon(1e-12));
  }
}

TEST_CASE("geometry validation rejects bad parameters") {
  PlatformGeometry g;
  g.mass = -1.0;
  CHECK_THROWS_AS(g.validate(), Config);

  PlatformGeometry g2;
  g2.inertia(0, 1) = 0.5;  // asymmetric
  CHECK_THROWS_AS(g2.validate(), Config);

  PlatformGeometry g3;
  g3.inertia = Mat3::Identity() * -0.1;
  CHECK_THROWS_AS(g3.validate(), Config);

  PlatformGeometry ok;
  CHECK_NOTHROW(ok.validate());
}
