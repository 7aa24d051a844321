#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <vector>

#include "mvip/core.hpp"
#include "mvip/errors.hpp"

namespace mvip {

using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat14 = Eigen::Matrix<double, 14, 14>;
using Vec14 = Eigen::Matrix<double, 14, 1>;

/// Distribution outcome for one commanded wrench.
struct AllocationResult {
  Vec8 motor_forces = Vec8::Zero();   // N
  Vec8 motor_currents = Vec8::Zero(); // A
  double cost = 0.0;                  // sum of squared currents, A^2
  std::array<bool, kNumActuators> saturated{};
  bool any_saturated = false;
};

/// Allocator working state: mixing matrix, live per-actuator gains and the
/// failure mask. Gains are refreshed every control cycle from the coil
/// positions; failures persist until reconfigured.
class AllocatorState {
 public:
  AllocatorState() : AllocatorState(build_mixing_matrix(PlatformGeometry{})) {}
  explicit AllocatorState(const Mat68& mixing, double current_limit = 2.0)
      : mixing_(mixing), current_limit_(current_limit) {
    active_.fill(true);
    gains_ = Vec8::Constant(12.0);
  }

  const Mat68& mixing() const { return mixing_; }
  double current_limit() const { return current_limit_; }
  const Vec8& gains() const { return gains_; }
  bool security_mode() const { return security_mode_; }
  const std::array<bool, kNumActuators>& active() const { return active_; }

  /// Per-actuator force gains Q_i at the current coil positions.
  void set_gains(const Vec8& gains) {
    for (int i = 0; i < kNumActuators; ++i)
      if (!(gains(i) >= kMinGain))
        throw DegenerateGain("actuator gain below minimum");
    gains_ = gains;
  }

  /// Mixing matrix with failed columns zeroed.
  Mat68 active_mixing() const {
    Mat68 c = mixing_;
    for (int i = 0; i < kNumActuators; ++i)
      if (!active_[static_cast<size_t>(i)]) c.col(i).setZero();
    return c;
  }

  int active_count() const {
    int n = 0;
    for (bool a : active_) n += a ? 1 : 0;
    return n;
  }

  int rank() const { return numeric_rank(active_mixing()); }

  /// Marks the given actuators (0-based) failed. More than two failures, or
  /// any failure set that breaks the 6-DOF wrench span, locks the system
  /// into security mode. Security mode is a state, not an error.
  bool reconfigure(const std::set<int>& failed) {
    active_.fill(true);
    for (int i : failed) {
      if (i < 0 || i >= kNumActuators) throw Config("failed actuator index out of range");
      active_[static_cast<size_t>(i)] = false;
    }
    security_mode_ = failed.size() > 2 || rank() < 6;
    return !security_mode_;
  }

 private:
  Mat68 mixing_;
  double current_limit_;
  Vec8 gains_;
  std::array<bool, kNumActuators> active_{};
  bool security_mode_ = false;
};

namespace detail {

inline Vec8 currents_from_forces(const AllocatorState& state, const Vec8& forces) {
  Vec8 currents = Vec8::Zero();
  for (int i = 0; i < kNumActuators; ++i)
    if (state.active()[static_cast<size_t>(i)]) currents(i) = forces(i) / state.gains()(i);
  return currents;
}

inline void apply_saturation(const AllocatorState& state, AllocationResult& r) {
  for (int i = 0; i < kNumActuators; ++i) {
    if (std::abs(r.motor_currents(i)) > state.current_limit()) {
      r.motor_currents(i) = std::copysign(state.current_limit(), r.motor_currents(i));
      r.motor_forces(i) = r.motor_currents(i) * state.gains()(i);
      r.saturated[static_cast<size_t>(i)] = true;
      r.any_saturated = true;
    }
  }
  r.cost = r.motor_currents.squaredNorm();
}

}  // namespace detail

/// Minimum-energy allocation: solves the symmetric indefinite KKT system
///   [ H  -C^T ] [f]   [0 ]
///   [ C   0   ] [l] = [F]
/// with H = diag(1/Q_i^2). Failed columns stay in the system zeroed; their
/// optimal force is zero. Currents exceeding the limit are clamped and
/// flagged without re-optimization.
inline AllocationResult allocate_qp(const AllocatorState& state, const Wrench& target) {
  if (state.security_mode() || state.rank() < 6)
    throw RankDeficient("active actuator set cannot span 6-DOF wrench space");

  const Mat68 c = state.active_mixing();
  Mat14 kkt = Mat14::Zero();
  for (int i = 0; i < kNumActuators; ++i) {
    const double q = state.gains()(i);
    kkt(i, i) = 1.0 / (q * q);
  }
  kkt.block<8, 6>(0, 8) = -c.transpose();
  kkt.block<6, 8>(8, 0) = c;

  Vec14 rhs = Vec14::Zero();
  rhs.tail<6>() = target.as_vector();

  Eigen::PartialPivLU<Mat14> lu(kkt);
  const auto& u = lu.matrixLU();
  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 14; ++i) {
    const double d = std::abs(u(i, i));
    dmax = std::max(dmax, d);
    dmin = std::min(dmin, d);
  }
  if (!(dmin > 0.0) || dmax / dmin > 1e12)
    throw IllConditioned("allocation KKT system condition estimate above 1e12");

  const Vec14 sol = lu.solve(rhs);
  AllocationResult r;
  r.motor_forces = sol.head<8>();
  for (int i = 0; i < kNumActuators; ++i)
    if (!state.active()[static_cast<size_t>(i)]) r.motor_forces(i) = 0.0;
  r.motor_currents = detail::currents_from_forces(state, r.motor_forces);
  detail::apply_saturation(state, r);
  return r;
}

/// Minimax allocation: minimize max_i |I_i| subject to the wrench equality.
/// The problem reduces to a linear program in the null-space coordinates of
/// the current-to-wrench map plus the bound t; with at most two free
/// null-space directions the optimum is found exactly by enumerating vertex
/// candidates of the constraint arrangement.
inline AllocationResult allocate_minimax(const AllocatorState& state, const Wrench& target) {
  if (state.security_mode() || state.rank() < 6)
    throw RankDeficient("active actuator set cannot span 6-DOF wrench space");

  std::vector<int> active;
  for (int i = 0; i < kNumActuators; ++i)
    if (state.active()[static_cast<size_t>(i)]) active.push_back(i);
  const int m = static_cast<int>(active.size());

  // Wrench per ampere for each active actuator.
  Eigen::MatrixXd a(6, m);
  for (int j = 0; j < m; ++j)
    a.col(j) = state.mixing().col(active[static_cast<size_t>(j)]) *
               state.gains()(active[static_cast<size_t>(j)]);

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  const Eigen::VectorXd particular = cod.solve(target.as_vector());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-10);
  const Eigen::MatrixXd null_basis = lu.kernel();
  const int d = (null_basis.cols() == 1 && null_basis.col(0).norm() < 1e-14)
                    ? 0
                    : static_cast<int>(null_basis.cols());

  Eigen::VectorXd best = particular;
  double best_t = particular.cwiseAbs().maxCoeff();

  if (d > 0) {
    // Constraints in x = (alpha, t):  s * (p_i + n_i^T alpha) - t <= 0.
    const int nvar = d + 1;
    const int ncon = 2 * m;
    Eigen::MatrixXd con(ncon, nvar);
    Eigen::VectorXd off(ncon);
    for (int i = 0; i < m; ++i) {
      for (int s = 0; s < 2; ++s) {
        const double sign = s == 0 ? 1.0 : -1.0;
        const int row = 2 * i + s;
        for (int k = 0; k < d; ++k) con(row, k) = sign * null_basis(i, k);
        con(row, d) = -1.0;
        off(row) = sign * particular(i);
      }
    }
    const double scale = 1.0 + particular.cwiseAbs().maxCoeff();
    std::vector<int> pick(static_cast<size_t>(nvar));
    std::function<void(int, int)> enumerate = [&](int start, int chosen) {
      if (chosen == nvar) {
        Eigen::MatrixXd sys(nvar, nvar);
        Eigen::VectorXd rhs(nvar);
        for (int r = 0; r < nvar; ++r) {
          sys.row(r) = con.row(pick[static_cast<size_t>(r)]);
          rhs(r) = -off(pick[static_cast<size_t>(r)]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> solver(sys);
        if (!solver.isInvertible()) return;
        const Eigen::VectorXd x = solver.solve(rhs);
        const double t = x(d);
        if (!(t >= -1e-12 * scale) || t >= best_t - 1e-14 * scale) return;
        const Eigen::VectorXd residual = con * x + off;
        if (residual.maxCoeff() > 1e-9 * scale) return;
        best = particular + null_basis * x.head(d);
        best_t = t;
        return;
      }
      for (int i = start; i <= ncon - (nvar - chosen); ++i) {
        pick[static_cast<size_t>(chosen)] = i;
        enumerate(i + 1, chosen + 1);
      }
    };
    enumerate(0, 0);
  }

  AllocationResult r;
  for (int j = 0; j < m; ++j) {
    const int i = active[static_cast<size_t>(j)];
    r.motor_currents(i) = best(j);
    r.motor_forces(i) = best(j) * state.gains()(i);
  }
  detail::apply_saturation(state, r);
  return r;
}

}  // namespace mvip
