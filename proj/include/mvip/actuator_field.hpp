#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mvip/core.hpp"
#include "mvip/errors.hpp"

namespace mvip {

/// Closed-form force-per-ampere surface used to synthesize calibration data.
/// Shape: saddle with the gain minimum at the stroke center along z and the
/// maximum at the center along y, plus a small cubic skew so the surface is
/// genuinely third order. Peak-to-peak variation over the box equals
/// variation_fraction * nominal_gain on the center lines.
struct FieldGroundTruth {
  double nominal_gain = 12.0;       // N/A at the stroke center
  double variation_fraction = 0.12;
  double scale = 1.0;               // measured/simulated ratio, e.g. 0.92
  double half_extent_y = 5e-3;      // m
  double half_extent_z = 5e-3;      // m
  double cubic_skew = 0.1;          // relative weight of the y*z^2 term

  double evaluate(double y, double z) const {
    const double u = y / half_extent_y;
    const double v = z / half_extent_z;
    const double shape = 1.0 + 0.5 * variation_fraction * (v * v - u * u) +
                         cubic_skew * variation_fraction * u * v * v;
    return nominal_gain * scale * shape;
  }
};

struct CalibrationSample {
  double y = 0.0;               // m
  double z = 0.0;               // m
  double gain = 0.0;            // N/A
};

struct CalibrationGrid {
  std::vector<CalibrationSample> samples;
  double spacing = 1e-3;        // m
  double half_extent_y = 5e-3;  // m
  double half_extent_z = 5e-3;  // m
  double reference_current = 1.0;  // A
};

/// Regular-lattice synthetic calibration of a ground-truth surface with
/// optional seeded Gaussian measurement noise.
inline CalibrationGrid synthesize_calibration(const FieldGroundTruth& truth,
                                              double spacing,
                                              double noise_rms,
                                              std::uint64_t seed) {
  if (!(spacing > 0.0)) throw Config("calibration spacing must be positive");
  if (noise_rms < 0.0) throw Config("noise rms must be non-negative");
  const int ny = static_cast<int>(std::floor(2.0 * truth.half_extent_y / spacing + 0.5)) + 1;
  const int nz = static_cast<int>(std::floor(2.0 * truth.half_extent_z / spacing + 0.5)) + 1;
  if (ny < 1 || nz < 1 || truth.half_extent_y <= 0.0 || truth.half_extent_z <= 0.0)
    throw EmptyRegion("calibration region is empty");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_rms > 0.0 ? noise_rms : 1.0);

  CalibrationGrid grid;
  grid.spacing = spacing;
  grid.half_extent_y = truth.half_extent_y;
  grid.half_extent_z = truth.half_extent_z;
  grid.samples.reserve(static_cast<size_t>(ny) * static_cast<size_t>(nz));
  for (int iy = 0; iy < ny; ++iy) {
    for (int iz = 0; iz < nz; ++iz) {
      const double y = -truth.half_extent_y + iy * spacing;
      const double z = -truth.half_extent_z + iz * spacing;
      double g = truth.evaluate(y, z);
      if (noise_rms > 0.0) g += noise(rng);
      grid.samples.push_back({y, z, g});
    }
  }
  return grid;
}

/// Number of bivariate monomials up to total degree `order`.
inline int basis_size(int order) { return (order + 1) * (order + 2) / 2; }

/// Exponent pair (y, z) of basis term k in the graded ordering.
inline std::pair<int, int> basis_exponents(int order, int k) {
  int idx = 0;
  for (int grade = 0; grade <= order; ++grade)
    for (int j = 0; j <= grade; ++j)
      if (idx++ == k) return {grade - j, j};
  throw Config("basis index out of range");
}

/// Graded monomial basis. For order 3 the terms are exactly
/// [1, y, z, y^2, yz, z^2, y^3, y^2 z, y z^2, z^3].
inline Eigen::VectorXd monomial_basis(int order, double y, double z) {
  Eigen::VectorXd b(basis_size(order));
  int k = 0;
  for (int grade = 0; grade <= order; ++grade)
    for (int j = 0; j <= grade; ++j)
      b(k++) = std::pow(y, grade - j) * std::pow(z, j);
  return b;
}

/// Position-dependent force-per-ampere model of one actuator. Coefficients
/// weight raw SI-meter monomials; evaluation clamps to the calibrated box.
class ActuatorModel {
 public:
  ActuatorModel() = default;
  ActuatorModel(Eigen::VectorXd coefficients, int order, double half_extent_y,
                double half_extent_z, double r_squared, double rmse)
      : coefficients_(std::move(coefficients)),
        order_(order),
        half_extent_y_(half_extent_y),
        half_extent_z_(half_extent_z),
        r_squared_(r_squared),
        rmse_(rmse) {}

  /// Uniform-gain model, handy as a neutral default.
  static ActuatorModel constant(double gain) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis_size(3));
    c(0) = gain;
    return ActuatorModel(c, 3, 5e-3, 5e-3, 1.0, 0.0);
  }

  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  int order() const { return order_; }
  double r_squared() const { return r_squared_; }
  double rmse() const { return rmse_; }
  double half_extent_y() const { return half_extent_y_; }
  double half_extent_z() const { return half_extent_z_; }

  /// Gain at (y, z). Out-of-box positions are clamped and flagged rather
  /// than rejected; control must stay defined through violent transients.
  double force_per_ampere(double y, double z, bool* clamped = nullptr) const {
    bool clip = false;
    if (std::abs(y) > half_extent_y_) { y = std::copysign(half_extent_y_, y); clip = true; }
    if (std::abs(z) > half_extent_z_) { z = std::copysign(half_extent_z_, z); clip = true; }
    if (clamped) *clamped = clip;
    return coefficients_.dot(monomial_basis(order_, y, z));
  }

 private:
  Eigen::VectorXd coefficients_;
  int order_ = 3;
  double half_extent_y_ = 5e-3;
  double half_extent_z_ = 5e-3;
  double r_squared_ = 0.0;
  double rmse_ = 0.0;
};

/// Least-squares fit of the monomial surface to a calibration grid. The
/// solve runs over box-normalized coordinates (the raw millimeter-scale
/// monomials span seven decades) and the coefficients are rescaled back to
/// the raw basis afterwards, which is exact.
inline ActuatorModel fit_model(const CalibrationGrid& grid, int order) {
  if (order < 1 || order > 5) throw Config("fit order must be in 1..5");
  const int n = static_cast<int>(grid.samples.size());
  const int m = basis_size(order);
  if (n < m) throw RankDeficientFit("fewer samples than coefficients");

  const double hy = grid.half_extent_y > 0.0 ? grid.half_extent_y : 1.0;
  const double hz = grid.half_extent_z > 0.0 ? grid.half_extent_z : 1.0;
  Eigen::MatrixXd design(n, m);
  Eigen::VectorXd target(n);
  for (int i = 0; i < n; ++i) {
    const auto& s = grid.samples[static_cast<size_t>(i)];
    design.row(i) = monomial_basis(order, s.y / hy, s.z / hz).transpose();
    target(i) = s.gain;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < m)
    throw RankDeficientFit("degenerate sample placement for requested order");
  const Eigen::VectorXd scaled = qr.solve(target);

  const Eigen::VectorXd residual = target - design * scaled;
  const double ss_res = residual.squaredNorm();
  const double mean = target.mean();
  const double ss_tot = (target.array() - mean).square().sum();
  const double r2 = ss_tot > 1e-300 ? 1.0 - ss_res / ss_tot : 1.0;
  const double rmse = std::sqrt(ss_res / n);

  Eigen::VectorXd coeffs(m);
  for (int k = 0; k < m; ++k) {
    const auto [py, pz] = basis_exponents(order, k);
    coeffs(k) = scaled(k) / (std::pow(hy, py) * std::pow(hz, pz));
  }
  return ActuatorModel(std::move(coeffs), order, grid.half_extent_y,
                       grid.half_extent_z, r2, rmse);
}

struct CurrentCommand {
  double current = 0.0;  // A
  bool saturated = false;
};

/// Inverts the gain map: I = F / Q(y, z), clamped to +/- i_max.
inline CurrentCommand current_for_force(const ActuatorModel& model,
                                        double desired_force, double y,
                                        double z, double i_max) {
  const double q = model.force_per_ampere(y, z);
  if (q < kMinGain)
    throw DegenerateGain("force gain below minimum for inversion");
  CurrentCommand cmd;
  cmd.current = desired_force / q;
  if (std::abs(cmd.current) > i_max) {
    cmd.current = std::copysign(i_max, cmd.current);
    cmd.saturated = true;
  }
  return cmd;
}

/// Small-motion local transverse displacement of coil i for a floater pose:
/// delta = p + euler x r_i projected on the actuator's calibration axes.
inline Eigen::Vector2d coil_local_displacement(const ActuatorLayout& layout,
                                               const RigidState& state,
                                               int actuator_index) {
  const ActuatorInfo& a = layout.actuators[static_cast<size_t>(actuator_index)];
  const Vec3 delta = state.position + state.euler.cross(a.position);
  return {delta.dot(a.local_y), delta.dot(a.local_z)};
}

/// Delimited-text calibration export: header row, y_mm, z_mm, N_per_A with
/// 12 significant digits.
inline void save_calibration(const CalibrationGrid& grid, std::ostream& out) {
  out << "y_mm,z_mm,N_per_A\n";
  char buf[128];
  for (const auto& s : grid.samples) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", s.y * 1e3, s.z * 1e3,
                  s.gain);
    out << buf;
  }
}

inline void save_calibration(const CalibrationGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Config("cannot open calibration file for writing: " + path);
  save_calibration(grid, out);
}

inline CalibrationGrid load_calibration(std::istream& in) {
  CalibrationGrid grid;
  std::string line;
  if (!std::getline(in, line) || line.rfind("y_mm", 0) != 0)
    throw Config("calibration file missing y_mm,z_mm,N_per_A header");
  double max_y = 0.0, max_z = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CalibrationSample s;
    double y_mm, z_mm;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &y_mm, &z_mm, &s.gain) != 3)
      throw Config("malformed calibration row: " + line);
    s.y = y_mm * 1e-3;
    s.z = z_mm * 1e-3;
    max_y = std::max(max_y, std::abs(s.y));
    max_z = std::max(max_z, std::abs(s.z));
    grid.samples.push_back(s);
  }
  if (grid.samples.empty()) throw EmptyRegion("calibration file has no samples");
  grid.half_extent_y = max_y;
  grid.half_extent_z = max_z;
  if (grid.samples.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < grid.samples.size(); ++i) {
      const double dy = std::abs(grid.samples[i].y - grid.samples[0].y);
      const double dz = std::abs(grid.samples[i].z - grid.samples[0].z);
      for (double d : {dy, dz})
        if (d > 1e-12 && d < best) best = d;
    }
    if (std::isfinite(best)) grid.spacing = best;
  }
  return grid;
}

inline CalibrationGrid load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Config("cannot open calibration file: " + path);
  return load_calibration(in);
}

}  // namespace mvip
