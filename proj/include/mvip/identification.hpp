#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <string>

#include "mvip/core.hpp"
#include "mvip/errors.hpp"

namespace mvip {

/// Row-wise recursive least squares for the 6x6 cross-coupling matrix in
///   R_cp * w = diag(M, J) * a.
/// Each output row regresses on the commanded wrench independently; the
/// covariance is symmetrized every update.
class RlsEstimator {
 public:
  explicit RlsEstimator(double forgetting = 1.0, double initial_covariance = 1e4)
      : lambda_(forgetting) {
    if (!(lambda_ > 0.0 && lambda_ <= 1.0))
      throw Config("forgetting factor must be in (0, 1]");
    if (!(initial_covariance > 0.0))
      throw Config("initial covariance must be positive");
    for (int r = 0; r < 6; ++r) {
      theta_[r].setZero();
      cov_[r] = Mat6::Identity() * initial_covariance;
    }
  }

  int sample_count() const { return count_; }
  double forgetting() const { return lambda_; }

  /// One update from a commanded wrench and the measured accelerations,
  /// given the known inertia block diag(m*I, J).
  void update(const Vec6& wrench, const Vec6& accel, double mass, const Mat3& inertia) {
    Vec6 target;
    target.head<3>() = mass * accel.head<3>();
    target.tail<3>() = inertia * accel.tail<3>();
    update_target(wrench, target);
  }

  /// Update against an already inertia-weighted regression target.
  void update_target(const Vec6& wrench, const Vec6& target) {
    for (int r = 0; r < 6; ++r) {
      const Vec6 pw = cov_[r] * wrench;
      const double denom = lambda_ + wrench.dot(pw);
      const Vec6 gain = pw / denom;
      theta_[r] += gain * (target(r) - theta_[r].dot(wrench));
      cov_[r] = (cov_[r] - gain * pw.transpose()) / lambda_;
      cov_[r] = 0.5 * (cov_[r] + cov_[r].transpose());
    }
    ++count_;
  }

  /// Current estimate of the coupling matrix (rows are regression rows).
  Mat6 estimate() const {
    Mat6 m;
    for (int r = 0; r < 6; ++r) m.row(r) = theta_[r].transpose();
    return m;
  }

  const Mat6& covariance(int row) const { return cov_[row]; }

  /// Largest covariance trace across rows; large values flag poor
  /// excitation rather than raising an error.
  double excitation_figure() const {
    double worst = 0.0;
    for (int r = 0; r < 6; ++r) worst = std::max(worst, cov_[r].trace());
    return worst;
  }

 private:
  double lambda_;
  std::array<Vec6, 6> theta_;
  std::array<Mat6, 6> cov_;
  int count_ = 0;
};

/// Rectifier R_rt = inverse of the estimated coupling.
inline Mat6 rectifier(const Mat6& coupling_estimate) {
  Eigen::JacobiSVD<Mat6> svd(coupling_estimate,
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0) || smax / smin >= 1e6)
    throw SingularEstimate("coupling estimate condition number at or above 1e6");
  return coupling_estimate.inverse();
}

inline Mat6 rectifier(const RlsEstimator& est) { return rectifier(est.estimate()); }

/// 6x6 delimited-text export with 12 significant digits.
inline void save_matrix(const Mat6& m, std::ostream& out) {
  char buf[64];
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) {
      std::snprintf(buf, sizeof(buf), "%.12g", m(r, c));
      out << buf << (c == 5 ? "\n" : ",");
    }
  }
}

inline void save_matrix(const Mat6& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Config("cannot open matrix file for writing: " + path);
  save_matrix(m, out);
}

inline Mat6 load_matrix(std::istream& in) {
  Mat6 m;
  std::string line;
  for (int r = 0; r < 6; ++r) {
    if (!std::getline(in, line)) throw Config("matrix file truncated");
    double v[6];
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2],
                    &v[3], &v[4], &v[5]) != 6)
      throw Config("malformed matrix row: " + line);
    for (int c = 0; c < 6; ++c) m(r, c) = v[c];
  }
  return m;
}

inline Mat6 load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Config("cannot open matrix file: " + path);
  return load_matrix(in);
}

}  // namespace mvip
