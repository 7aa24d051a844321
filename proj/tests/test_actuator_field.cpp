#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "mvip/actuator_field.hpp"

using namespace mvip;

namespace {

/// Independent normal-equations solve in the box-normalized basis, mapped
/// back to raw coefficients; checks the production QR path.
Eigen::VectorXd normal_equations_fit(const CalibrationGrid& grid, int order) {
  const int n = static_cast<int>(grid.samples.size());
  const int m = basis_size(order);
  Eigen::MatrixXd a(n, m);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const auto& s = grid.samples[static_cast<size_t>(i)];
    a.row(i) = monomial_basis(order, s.y / grid.half_extent_y,
                              s.z / grid.half_extent_z).transpose();
    y(i) = s.gain;
  }
  const Eigen::VectorXd scaled =
      (a.transpose() * a).ldlt().solve(a.transpose() * y);
  Eigen::VectorXd raw(m);
  for (int k = 0; k < m; ++k) {
    const auto [py, pz] = basis_exponents(order, k);
    raw(k) = scaled(k) / (std::pow(grid.half_extent_y, py) *
                          std::pow(grid.half_extent_z, pz));
  }
  return raw;
}

/// Raw-basis coefficients of the ground-truth surface (it is exactly order
/// three in the normalized coordinates).
Eigen::VectorXd truth_coefficients(const FieldGroundTruth& t) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(basis_size(3));
  const double base = t.nominal_gain * t.scale;
  g(0) = base;
  g(3) = -base * 0.5 * t.variation_fraction / (t.half_extent_y * t.half_extent_y);
  g(5) = base * 0.5 * t.variation_fraction / (t.half_extent_z * t.half_extent_z);
  g(8) = base * t.cubic_skew * t.variation_fraction /
         (t.half_extent_y * t.half_extent_z * t.half_extent_z);
  return g;
}

}  // namespace

TEST_CASE("synthetic calibration grid geometry") {
  FieldGroundTruth truth;
  const CalibrationGrid grid = synthesize_calibration(truth, 1e-3, 0.0, 1);
  CHECK(grid.samples.size() == 121);  // 11 x 11 lattice over the 10 mm box

  for (const auto& s : grid.samples)
    CHECK(s.gain == truth.evaluate(s.y, s.z));  // zero noise: exact
}

TEST_CASE("ground-truth surface spans the configured variation") {
  FieldGroundTruth truth;
  truth.nominal_gain = 12.0;
  truth.variation_fraction = 0.12;
  const CalibrationGrid grid = synthesize_calibration(truth, 1e-3, 0.0, 1);
  double lo = 1e300, hi = -1e300;
  for (const auto& s : grid.samples) {
    lo = std::min(lo, s.gain);
    hi = std::max(hi, s.gain);
  }
  CHECK(hi - lo >= 1.32);
  CHECK(hi - lo <= 1.56);
}

TEST_CASE("surface shape: z-minimum and y-maximum at the center lines") {
  FieldGroundTruth truth;
  // Along z at y = 0 the center is the minimum.
  CHECK(truth.evaluate(0.0, 0.0) < truth.evaluate(0.0, 3e-3));
  CHECK(truth.evaluate(0.0, 0.0) < truth.evaluate(0.0, -3e-3));
  // Along y at z = 0 the center is the maximum.
  CHECK(truth.evaluate(0.0, 0.0) > truth.evaluate(3e-3, 0.0));
  CHECK(truth.evaluate(0.0, 0.0) > truth.evaluate(-3e-3, 0.0));
}

TEST_CASE("order-3 fit recovers an order-3 surface exactly") {
  FieldGroundTruth truth;
  const CalibrationGrid grid = synthesize_calibration(truth, 1e-3, 0.0, 1);
  const ActuatorModel model = fit_model(grid, 3);
  const Eigen::VectorXd expected = truth_coefficients(truth);
  const Eigen::VectorXd oracle = normal_equations_fit(grid, 3);

  // Compare in the normalized basis so every coefficient carries the same
  // weight; recovery and the independent oracle agree to 1e-9 relative.
  for (int k = 0; k < 10; ++k) {
    const auto [py, pz] = basis_exponents(3, k);
    const double scale = std::pow(truth.half_extent_y, py) *
                         std::pow(truth.half_extent_z, pz);
    const double got = model.coefficients()(k) * scale;
    const double want = expected(k) * scale;
    const double ora = oracle(k) * scale;
    CHECK(std::abs(got - want) <= 1e-9 * truth.nominal_gain);
    CHECK(std::abs(got - ora) <= 1e-9 * truth.nominal_gain);
  }

  // Fitted surface reproduces the noiseless data at the nodes.
  double sq = 0.0;
  for (const auto& s : grid.samples) {
    const double e = model.force_per_ampere(s.y, s.z) - s.gain;
    sq += e * e;
  }
  CHECK(std::sqrt(sq / static_cast<double>(grid.samples.size())) < 1e-6);
}

TEST_CASE("constant field fits to a lone constant coefficient") {
  FieldGroundTruth truth;
  truth.variation_fraction = 0.0;
  truth.cubic_skew = 0.0;
  truth.nominal_gain = 7.5;
  const CalibrationGrid grid = synthesize_calibration(truth, 1e-3, 0.0, 1);
  for (int order = 1; order <= 5; ++order) {
    const ActuatorModel model = fit_model(grid, order);
    CHECK(model.coefficients()(0) == Catch::Approx(7.5).epsilon(1e-9));
    CHECK(model.coefficients().tail(model.coefficients().size() - 1).norm() < 1e-6);
  }
}

TEST_CASE("fit diagnostics are monotone in the order") {
  FieldGroundTruth truth;
  const CalibrationGrid grid = synthesize_calibration(truth, 1e-3, 0.05, 42);
  double prev_r2 = -1.0, prev_rmse = 1e300;
  for (int order = 1; order <= 5; ++order) {
    const ActuatorModel model = fit_model(grid, order);
    CHECK(model.r_squared() >= prev_r2 - 1e-12);
    CHECK(model.rmse() <= prev_rmse + 1e-12);
    prev_r2 = model.r_squared();
    prev_rmse = model.rmse();
  }
}

TEST_CASE("fit residual is orthogonal to the basis columns") {
  FieldGroundTruth truth;
  const CalibrationGrid grid = synthesize_calibration(truth, 1e-3, 0.02, 5);
  const ActuatorModel model = fit_model(grid, 3);
  Eigen::VectorXd residual(grid.samples.size());
  Eigen::MatrixXd design(grid.samples.size(), 10);
  for (size_t i = 0; i < grid.samples.size(); ++i) {
    const auto& s = grid.samples[i];
    residual(static_cast<Eigen::Index>(i)) =
        s.gain - model.force_per_ampere(s.y, s.z);
    design.row(static_cast<Eigen::Index>(i)) =
        monomial_basis(3, s.y / grid.half_extent_y, s.z / grid.half_extent_z)
            .transpose();
  }
  CHECK((design.transpose() * residual).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fit rejects degenerate sample placement") {
  CalibrationGrid grid;
  grid.half_extent_y = 5e-3;
  grid.half_extent_z = 5e-3;
  for (int i = 0; i < 30; ++i)  // all samples on the z axis: y terms unseen
    grid.samples.push_back({0.0, -5e-3 + i * 0.3e-3, 12.0});
  CHECK_THROWS_AS(fit_model(grid, 3), RankDeficientFit);

  CalibrationGrid tiny;
  tiny.samples.push_back({0.0, 0.0, 12.0});
  CHECK_THROWS_AS(fit_model(tiny, 3), RankDeficientFit);
}

TEST_CASE("model evaluation honors the printed basis layout") {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(10);
  c(0) = 1.0;
  const ActuatorModel constant(c, 3, 5e-3, 5e-3, 1.0, 0.0);
  CHECK(constant.force_per_ampere(1e-3, -2e-3) == 1.0);

  Eigen::VectorXd lin = Eigen::VectorXd::Zero(10);
  lin(1) = 1.0;  // the y term
  const ActuatorModel linear(lin, 3, 5e-3, 5e-3, 1.0, 0.0);
  CHECK(linear.force_per_ampere(2e-3, 0.0) == Catch::Approx(2e-3).epsilon(1e-12));

  bool clamped = false;
  linear.force_per_ampere(9e-3, 0.0, &clamped);
  CHECK(clamped);
  CHECK(linear.force_per_ampere(9e-3, 0.0) ==
        Catch::Approx(5e-3).epsilon(1e-12));  // clamped to the box edge
}

TEST_CASE("current inversion and round trip") {
  const ActuatorModel model = ActuatorModel::constant(12.0);
  CHECK(current_for_force(model, 24.0, 0, 0, 10.0).current ==
        Catch::Approx(2.0).epsilon(1e-12));
  CHECK(current_for_force(model, 0.0, 0, 0, 2.0).current == 0.0);

  const auto saturated = current_for_force(model, 100.0, 0, 0, 2.0);
  CHECK(saturated.saturated);
  CHECK(saturated.current == 2.0);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(-4e-3, 4e-3);
  std::uniform_real_distribution<double> force(-20.0, 20.0);
  FieldGroundTruth truth;
  const ActuatorModel fitted = fit_model(synthesize_calibration(truth, 1e-3, 0.0, 1), 3);
  for (int trial = 0; trial < 200; ++trial) {
    const double y = pos(rng), z = pos(rng), f = force(rng);
    const auto cmd = current_for_force(fitted, f, y, z, 10.0);
    if (cmd.saturated) continue;
    const double back = fitted.force_per_ampere(y, z) * cmd.current;
    CHECK(std::abs(back - f) <= 1e-12 * std::max(1.0, std::abs(f)));
  }

  const ActuatorModel weak = ActuatorModel::constant(0.01);
  CHECK_THROWS_AS(current_for_force(weak, 1.0, 0, 0, 2.0), DegenerateGain);
}

TEST_CASE("coil displacement follows the floater pose") {
  const PlatformGeometry geom;
  const ActuatorLayout layout = ActuatorLayout::standard(geom);

  RigidState at_rest;
  for (int i = 0; i < kNumActuators; ++i)
    CHECK(coil_local_displacement(layout, at_rest, i).norm() == 0.0);

  // Pure vertical translation: vertical actuators see it on their local z.
  RigidState dz;
  dz.position = Vec3(0, 0, 1e-3);
  const Eigen::Vector2d v = coil_local_displacement(layout, dz, 1);
  CHECK(v.y() == Catch::Approx(1e-3).epsilon(1e-12));
  CHECK(v.x() == 0.0);

  // Pure yaw: an actuator mounted at (l1, 0, 0) sees |euler x r| = l1 * phi.
  RigidState yaw;
  yaw.euler = Vec3(0, 0, 1e-3);
  const Eigen::Vector2d h = coil_local_displacement(layout, yaw, 2);
  CHECK(h.norm() == Catch::Approx(geom.l1 * 1e-3).epsilon(1e-12));
}

TEST_CASE("calibration text round trip is exact at 12 digits") {
  FieldGroundTruth truth;
  const CalibrationGrid grid = synthesize_calibration(truth, 1e-3, 0.01, 77);

  std::ostringstream first;
  save_calibration(grid, first);
  std::istringstream back(first.str());
  const CalibrationGrid loaded = load_calibration(back);
  REQUIRE(loaded.samples.size() == grid.samples.size());
  std::ostringstream second;
  save_calibration(loaded, second);
  CHECK(first.str() == second.str());

  for (size_t i = 0; i < grid.samples.size(); ++i) {
    CHECK(std::abs(loaded.samples[i].gain - grid.samples[i].gain) <=
          1e-12 * std::abs(grid.samples[i].gain));
  }

  std::istringstream bad("nonsense\n1,2,3\n");
  CHECK_THROWS_AS(load_calibration(bad), Config);
}
