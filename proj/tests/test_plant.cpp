#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mvip/allocation.hpp"
#include "mvip/plant.hpp"

using namespace mvip;

namespace {

PlatformGeometry free_space_geometry() {
  PlatformGeometry g;
  g.gravity = 0.0;
  g.cable_stiffness = Vec6::Zero();
  g.cable_damping = Vec6::Zero();
  g.mass = 8.0;
  Mat3 j = Mat3::Zero();
  j.diagonal() << 0.12, 0.12, 0.22;
  g.inertia = j;
  return g;
}

}  // namespace

TEST_CASE("cable wrench arithmetic") {
  PlatformGeometry g;
  g.cable_stiffness << 10, 0, 0, 0, 0, 0;
  g.cable_damping << 0.5, 0, 0, 0, 0, 0;

  RigidState rest;
  const Wrench zero = cable_wrench(g, rest);
  CHECK(zero.force.norm() == 0.0);
  CHECK(zero.torque.norm() == 0.0);

  RigidState displaced;
  displaced.position = Vec3(1e-3, 0, 0);
  CHECK(cable_wrench(g, displaced).force.x() ==
        Catch::Approx(-0.01).epsilon(1e-12));

  RigidState moving;
  moving.velocity = Vec3(1e-3, 0, 0);
  CHECK(cable_wrench(g, moving).force.x() ==
        Catch::Approx(-5e-4).epsilon(1e-12));
}

TEST_CASE("free floater at rest has zero derivative") {
  const PlatformGeometry g = free_space_geometry();
  CouplingMatrix coupling;
  PlantState state;
  const auto dx = dynamics_rhs(g, coupling, state, BaseExcitation::Motion{}, Wrench{});
  CHECK(dx.norm() == 0.0);
}

TEST_CASE("constant force integrates ballistically") {
  const PlatformGeometry g = free_space_geometry();
  Plant plant(g, CouplingMatrix{}, BaseExcitation{});
  Wrench push;
  push.force = Vec3(0, 0, g.mass * 1.0);  // 1 m/s^2

  const double dt = 5e-4;
  for (int k = 0; k < 2000; ++k) plant.step(push, dt, 4);
  const double t = plant.time();
  CHECK(t == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(plant.state().position.z() == Catch::Approx(t * t / 2.0).epsilon(1e-9));
  CHECK(plant.state().velocity.z() == Catch::Approx(t).epsilon(1e-9));
}

TEST_CASE("principal-axis spin is stationary") {
  PlatformGeometry g = free_space_geometry();
  g.stroke_half_range = Vec3(1, 1, 1);
  Plant plant(g, CouplingMatrix{}, BaseExcitation{});
  PlantState s;
  s.omega = Vec3(0, 0, 1.0);
  plant.set_state(s);
  for (int k = 0; k < 2000; ++k) plant.step(Wrench{}, 5e-4, 4);
  CHECK((plant.state().omega - Vec3(0, 0, 1.0)).norm() < 1e-12);
}

TEST_CASE("torque-free tumble conserves momentum norm and energy") {
  PlatformGeometry g = free_space_geometry();
  g.stroke_half_range = Vec3(1, 1, 1);
  Plant plant(g, CouplingMatrix{}, BaseExcitation{});
  PlantState s;
  s.omega = Vec3(0.05, 0.03, 1.0);  // fast-axis spin with nutation
  plant.set_state(s);

  const Vec3 h0 = g.inertia * s.omega;
  const double e0 = 0.5 * s.omega.dot(h0);

  for (int k = 0; k < 20000; ++k) plant.step(Wrench{}, 5e-4, 4);  // 10 s
  const Vec3 omega = plant.state().omega;
  const Vec3 h = g.inertia * omega;
  CHECK(std::abs(h.norm() - h0.norm()) <= 1e-8 * h0.norm());
  CHECK(std::abs(0.5 * omega.dot(h) - e0) <= 1e-8 * e0);
}

TEST_CASE("translational momentum is conserved force-free") {
  const PlatformGeometry g = free_space_geometry();
  Plant plant(g, CouplingMatrix{}, BaseExcitation{});
  PlantState s;
  s.velocity = Vec3(0.3e-3, -0.2e-3, 0.1e-3);
  plant.set_state(s);
  for (int k = 0; k < 4000; ++k) plant.step(Wrench{}, 5e-4, 4);
  CHECK((plant.state().velocity - s.velocity).norm() < 1e-15);
}

TEST_CASE("rk4 step matches the fourth-order series on a linear system") {
  const double w = 2.3;
  auto rhs = [w](const Eigen::Vector2d& x, double) {
    return Eigen::Vector2d(x(1), -w * w * x(0));
  };
  const Eigen::Vector2d x0(1.0, 0.5);
  const double dt = 1e-3;
  const Eigen::Vector2d got = integrate_step(rhs, x0, 0.0, dt);

  Eigen::Matrix2d a;
  a << 0, 1, -w * w, 0;
  Eigen::Matrix2d series = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d power = Eigen::Matrix2d::Identity();
  double factorial = 1.0;
  for (int k = 1; k <= 4; ++k) {
    power = power * (a * dt);
    factorial *= k;
    series += power / factorial;
  }
  CHECK((got - series * x0).norm() < 1e-15);
}

TEST_CASE("rk4 energy drift on the undamped oscillator stays tiny") {
  const double w = 3.7;
  const double period = 2.0 * M_PI / w;
  const double dt = period / 1000.0;
  auto rhs = [w](const Eigen::Vector2d& x, double) {
    return Eigen::Vector2d(x(1), -w * w * x(0));
  };
  Eigen::Vector2d x(1.0, 0.0);
  const double e0 = 0.5 * (x(1) * x(1) + w * w * x(0) * x(0));
  for (int k = 0; k < 100 * 1000; ++k) x = integrate_step(rhs, x, 0.0, dt);
  const double e = 0.5 * (x(1) * x(1) + w * w * x(0) * x(0));
  CHECK(std::abs(e - e0) / e0 < 1e-8);
}

TEST_CASE("rk4 rejects a non-positive step") {
  auto rhs = [](const Eigen::Vector2d& x, double) { return x; };
  CHECK_THROWS_AS(integrate_step(rhs, Eigen::Vector2d(1, 1), 0.0, 0.0), Config);
}

TEST_CASE("base excitation profiles") {
  BaseExcitation still;
  CHECK(still.evaluate(1.0).position.norm() == 0.0);
  CHECK(still.evaluate(1.0).acceleration.norm() == 0.0);

  // A 0.1 g tone at 3 Hz moves the base by the stroke-sizing amplitude.
  BaseExcitation sine;
  sine.kind = BaseExcitation::Kind::Sine;
  sine.accel_amplitude = 0.98;
  sine.freq_start = 3.0;
  sine.validate();
  const double w = 2.0 * M_PI * 3.0;
  const double amp = 0.98 / (w * w);
  CHECK(amp == Catch::Approx(2.76e-3).margin(0.05e-3));
  CHECK(sine.evaluate(1.0 / 12.0).position.x() ==
        Catch::Approx(amp).epsilon(1e-9));  // quarter period

  BaseExcitation sweep;
  sweep.kind = BaseExcitation::Kind::LogSweep;
  sweep.accel_amplitude = 0.05;
  sweep.freq_start = 0.1;
  sweep.freq_end = 50.0;
  sweep.duration = 300.0;
  sweep.validate();
  CHECK(sweep.instantaneous_frequency(0.0) == Catch::Approx(0.1).epsilon(1e-12));
  CHECK(sweep.instantaneous_frequency(300.0) == Catch::Approx(50.0).epsilon(1e-12));

  // Analytic velocity and acceleration agree with central differences.
  const double h = 1e-6;
  for (double t : {1.0, 10.0, 100.0, 250.0}) {
    const auto m = sweep.evaluate(t);
    const auto p = sweep.evaluate(t + h);
    const auto q = sweep.evaluate(t - h);
    const double vel_fd = (p.position.x() - q.position.x()) / (2.0 * h);
    const double acc_fd = (p.velocity.x() - q.velocity.x()) / (2.0 * h);
    CHECK(std::abs(m.velocity.x() - vel_fd) < 1e-8 * (1.0 + std::abs(vel_fd)));
    CHECK(std::abs(m.acceleration.x() - acc_fd) < 1e-8 * (1.0 + std::abs(acc_fd)));
  }

  BaseExcitation bad;
  bad.kind = BaseExcitation::Kind::Sine;
  bad.freq_start = 0.0;
  CHECK_THROWS_AS(bad.validate(), BadProfile);
}

TEST_CASE("contact stop trips exactly at the stroke box") {
  PlatformGeometry g = free_space_geometry();
  g.stroke_half_range = Vec3(5e-3, 5e-3, 4e-3);
  Plant plant(g, CouplingMatrix{}, BaseExcitation{});
  Wrench shove;
  shove.force = Vec3(2.0, 0, 0);
  while (!plant.contact_stop() && plant.time() < 1.0)
    plant.step(shove, 5e-4, 4);
  REQUIRE(plant.contact_stop());
  CHECK(std::abs(plant.state().position.x()) > 5e-3);
  // Once stopped, stepping is inert.
  const Vec3 frozen = plant.state().position;
  plant.step(shove, 5e-4, 4);
  CHECK(plant.state().position == frozen);
}

TEST_CASE("coupling matrix validation") {
  CouplingMatrix ok;
  CHECK_NOTHROW(ok.validate());
  CouplingMatrix singular;
  singular.matrix.row(0).setZero();
  CHECK_THROWS_AS(singular.validate(), Config);
}

TEST_CASE("coupling reshapes the applied wrench") {
  PlatformGeometry g = free_space_geometry();
  CouplingMatrix coupling;
  coupling.matrix(0, 2) = 0.1;  // z force leaks into x
  Plant plant(g, coupling, BaseExcitation{});
  Wrench cmd;
  cmd.force = Vec3(0, 0, 8.0);
  const PlantAcceleration acc = plant.acceleration(cmd);
  CHECK(acc.linear.z() == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(acc.linear.x() == Catch::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("allocation and mixing round trip through the plant") {
  // Commanding a wrench through allocation, mixing and the rigid body gives
  // back the commanded accelerations at the rest state.
  const PlatformGeometry g = free_space_geometry();
  Plant plant(g, CouplingMatrix{}, BaseExcitation{});
  AllocatorState alloc(build_mixing_matrix(g), 100.0);
  alloc.set_gains(Vec8::Constant(12.0));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> f(-5.0, 5.0);
  std::uniform_real_distribution<double> tq(-0.4, 0.4);
  for (int trial = 0; trial < 20; ++trial) {
    Wrench w;
    w.force = Vec3(f(rng), f(rng), f(rng));
    w.torque = Vec3(tq(rng), tq(rng), tq(rng));
    const AllocationResult r = allocate_qp(alloc, w);
    const Wrench achieved = apply_mixing(alloc.mixing(), r.motor_forces);
    const PlantAcceleration acc = plant.acceleration(achieved);
    CHECK((acc.linear - w.force / g.mass).norm() <=
          1e-9 * (1.0 + w.force.norm() / g.mass));
    const Vec3 expected_omega_dot = g.inertia.ldlt().solve(w.torque);
    CHECK((acc.angular - expected_omega_dot).norm() <=
          1e-9 * (1.0 + expected_omega_dot.norm()));
  }
}

TEST_CASE("plant trajectories are bit-identical across runs") {
  PlatformGeometry g = free_space_geometry();
  g.cable_stiffness << 50, 50, 50, 2, 2, 2;
  g.cable_damping << 1, 1, 1, 0.02, 0.02, 0.02;
  BaseExcitation sweep;
  sweep.kind = BaseExcitation::Kind::LogSweep;
  sweep.accel_amplitude = 0.01;
  sweep.freq_start = 0.5;
  sweep.freq_end = 5.0;
  sweep.duration = 2.0;

  auto run = [&]() {
    Plant plant(g, CouplingMatrix{}, sweep);
    Wrench cmd;
    cmd.force = Vec3(0.1, 0, 0);
    for (int k = 0; k < 4000; ++k) plant.step(cmd, 5e-4, 4);
    return plant.state().pack();
  };
  const auto a = run();
  const auto b = run();
  CHECK(a == b);
}

TEST_CASE("plant state round trips through the rigid-state view") {
  PlantState s;
  s.position = Vec3(1e-3, -2e-3, 0.5e-3);
  s.euler = Vec3(0.05, -0.1, 0.15);
  s.velocity = Vec3(0.01, 0.02, -0.03);
  s.omega = Vec3(0.2, -0.3, 0.4);
  const RigidState r = s.to_rigid_state();
  const PlantState back = PlantState::from_rigid_state(r);
  CHECK((back.pack() - s.pack()).norm() < 1e-14);
}
