#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mvip/sensing.hpp"

using namespace mvip;

TEST_CASE("psd forward map columns") {
  SensorSuite suite;  // d1 = d2 = d3 = 0.1

  Vec6 dx = Vec6::Zero();
  dx(0) = 1e-3;
  Vec6 r = psd_forward(suite, dx);
  CHECK(r.isApprox((Vec6() << 1e-3, 0, -1e-3, 0, 0, 0).finished(), 1e-12));

  Vec6 dphi = Vec6::Zero();
  dphi(2) = 1e-3;  // yaw
  r = psd_forward(suite, dphi);
  CHECK(r.isApprox((Vec6() << -1e-4, -1e-4, -1e-4, 0, 0, 0).finished(), 1e-12));

  Vec6 dz = Vec6::Zero();
  dz(3) = 1e-3;
  r = psd_forward(suite, dz);
  CHECK(r.isApprox((Vec6() << 0, 0, 0, 1e-3, 1e-3, 1e-3).finished(), 1e-12));
}

TEST_CASE("psd inverse recovers displacements") {
  SensorSuite suite;
  suite.d1 = 0.12;
  suite.d2 = 0.09;
  suite.d3 = 0.11;

  // Symmetric-geometry row checks from the printed closed form.
  SensorSuite sym;
  Vec6 readings = (Vec6() << 1e-3, 0, -1e-3, 0, 0, 0).finished();
  Vec6 d = psd_inverse(sym, readings);
  CHECK(d(0) == Catch::Approx(1e-3).epsilon(1e-12));
  CHECK(std::abs(d(2)) < 1e-15);

  readings = (Vec6() << 0, 0, 0, 1e-3, 1e-3, 1e-3).finished();
  d = psd_inverse(sym, readings);
  CHECK(d(3) == Catch::Approx(1e-3).epsilon(1e-12));
  CHECK(std::abs(d(4)) < 1e-15);
  CHECK(std::abs(d(5)) < 1e-15);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(-3e-3, 3e-3);
  std::uniform_real_distribution<double> rot(-0.05, 0.05);
  for (int trial = 0; trial < 1000; ++trial) {
    Vec6 disp;
    disp << pos(rng), pos(rng), rot(rng), pos(rng), rot(rng), rot(rng);
    const Vec6 rec = psd_inverse(suite, psd_forward(suite, disp));
    CHECK((rec - disp).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("forward and inverse matrices compose to identity") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(0.02, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    SensorSuite s;
    s.d1 = dist(rng);
    s.d2 = dist(rng);
    s.d3 = dist(rng);
    const Mat6 prod = psd_forward_matrix(s) * psd_inverse_matrix(s);
    CHECK((prod - Mat6::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("translational inverse rows match the printed coefficients") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dist(0.02, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    SensorSuite s;
    s.d1 = dist(rng);
    s.d2 = dist(rng);
    s.d3 = dist(rng);
    const Mat6 inv = psd_inverse_matrix(s);
    const double den = s.d1 + s.d3;
    // dx row
    CHECK(inv(0, 0) == Catch::Approx(s.d3 / den).epsilon(1e-12));
    CHECK(std::abs(inv(0, 1)) < 1e-14);
    CHECK(inv(0, 2) == Catch::Approx(-s.d1 / den).epsilon(1e-12));
    // dy row
    CHECK(inv(1, 0) == Catch::Approx(-s.d2 / den).epsilon(1e-12));
    CHECK(inv(1, 1) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(inv(1, 2) == Catch::Approx(-s.d2 / den).epsilon(1e-12));
    // dphi row
    CHECK(inv(2, 0) == Catch::Approx(-1.0 / den).epsilon(1e-12));
    CHECK(std::abs(inv(2, 1)) < 1e-14);
    CHECK(inv(2, 2) == Catch::Approx(-1.0 / den).epsilon(1e-12));
  }
}

TEST_CASE("degenerate sensor geometry is rejected") {
  SensorSuite s;
  s.d2 = 0.0;
  CHECK_THROWS_AS(psd_inverse_matrix(s), DegenerateGeometry);
  SensorSuite s2;
  s2.d1 = 0.1;
  s2.d3 = -0.1;
  CHECK_THROWS_AS(psd_inverse_matrix(s2), DegenerateGeometry);
}

TEST_CASE("quantizer granularity and clamping") {
  const double fs = 1.0;
  const int bits = 4;  // lsb = 2/16 = 0.125
  CHECK(quantize(0.0, fs, bits) == 0.0);
  CHECK(quantize(0.06, fs, bits) == Catch::Approx(0.125).epsilon(1e-12));
  CHECK(quantize(0.05, fs, bits) == 0.0);
  CHECK(quantize(5.0, fs, bits) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(quantize(-5.0, fs, bits) == Catch::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("noiseless accelerometer chain is exact apart from gravity") {
  SensorSuite suite;
  suite.quantization = false;
  SensorChain chain(suite, 1, /*noise=*/false);
  const Vec3 lin(0.1, -0.2, 0.3);
  const Vec3 ang(0.01, 0.02, -0.03);
  const Vec6 m = chain.measure_acceleration(lin, ang, 9.8);
  CHECK(m.head<3>().isApprox(lin - Vec3(0, 0, 9.8), 1e-15));
  CHECK(m.tail<3>().isApprox(ang, 1e-15));

  // The same chain with gravity off is the identity.
  SensorChain chain2(suite, 1, false);
  const Vec6 m2 = chain2.measure_acceleration(lin, ang, 0.0);
  CHECK(m2.head<3>().isApprox(lin, 1e-15));
}

TEST_CASE("white accelerometer noise has the configured scale") {
  SensorSuite suite;
  suite.quantization = false;
  suite.accel_bias_walk = 0.0;
  suite.accel_noise_rms = 1e-3;
  SensorChain chain(suite, 42, true);
  const int n = 1000000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = chain.measure_acceleration(Vec3::Zero(), Vec3::Zero(), 0.0)(0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double rms = std::sqrt(sq / n);
  CHECK(std::abs(mean) < 5e-6);  // mean -> 0
  CHECK(rms == Catch::Approx(1e-3).epsilon(0.05));
}

TEST_CASE("bias random walk variance grows linearly in time") {
  SensorSuite suite;
  suite.quantization = false;
  suite.accel_noise_rms = 0.0;
  suite.accel_bias_walk = 1e-3;

  const int chains = 400;
  const int n_short = 100, n_long = 400;
  double var_short = 0.0, var_long = 0.0;
  for (int c = 0; c < chains; ++c) {
    SensorChain chain(suite, 1000 + static_cast<std::uint64_t>(c), true);
    double b_short = 0.0, b_long = 0.0;
    for (int i = 0; i < n_long; ++i) {
      const double v = chain.measure_acceleration(Vec3::Zero(), Vec3::Zero(), 0.0)(0);
      if (i == n_short - 1) b_short = v;
      if (i == n_long - 1) b_long = v;
    }
    var_short += b_short * b_short;
    var_long += b_long * b_long;
  }
  var_short /= chains;
  var_long /= chains;
  // Fourfold duration, fourfold variance (within sampling error).
  CHECK(var_long / var_short == Catch::Approx(4.0).epsilon(0.35));
}

TEST_CASE("seeded chains reproduce their noise streams") {
  SensorSuite suite;
  RigidState pose;
  pose.position = Vec3(1e-3, -0.5e-3, 0.2e-3);

  SensorChain a(suite, 777, true);
  SensorChain b(suite, 777, true);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.measure_displacement(pose) == b.measure_displacement(pose));
    CHECK(a.measure_acceleration(Vec3::Zero(), Vec3::Zero(), 9.8) ==
          b.measure_acceleration(Vec3::Zero(), Vec3::Zero(), 9.8));
  }

  SensorChain c(suite, 778, true);
  CHECK(a.measure_displacement(pose) != c.measure_displacement(pose));
}

TEST_CASE("displacement measurement inverts the true pose when ideal") {
  SensorSuite suite;
  SensorChain chain(suite, 1, false);
  RigidState pose;
  pose.position = Vec3(2e-3, -1e-3, 0.5e-3);
  pose.euler = Vec3(0.01, -0.02, 0.03);
  const Vec6 d = chain.measure_displacement(pose);
  CHECK(d(0) == Catch::Approx(2e-3).epsilon(1e-12));
  CHECK(d(1) == Catch::Approx(-1e-3).epsilon(1e-12));
  CHECK(d(3) == Catch::Approx(0.5e-3).epsilon(1e-12));
  CHECK(d(2) == Catch::Approx(0.03).epsilon(1e-12));   // phi = yaw
  CHECK(d(4) == Catch::Approx(0.01).epsilon(1e-12));   // psi = roll
  CHECK(d(5) == Catch::Approx(-0.02).epsilon(1e-12));  // theta = pitch
}
