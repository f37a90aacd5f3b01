#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hoimtrack/geometry.hpp"

namespace hoimtrack {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateCovariance = Eigen::Matrix<double, 8, 8>;
using MeasurementVector = Eigen::Matrix<double, 4, 1>;
using MeasurementCovariance = Eigen::Matrix<double, 4, 4>;

/// Mean (cx, cy, aspect, height, vx, vy, va, vh) and covariance.
struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateCovariance covariance = StateCovariance::Zero();

  BoxXYAH box() const { return {mean(0), mean(1), mean(2), mean(3)}; }
};

/// Height-proportional noise. Standard deviations of position-like terms are
/// `position_weight * height`, of velocity terms `velocity_weight * height`.
/// The scale factors multiply the resulting variances and exist for limit
/// analysis (0 disables the term).
struct MotionNoise {
  double position_weight = 1.0 / 20.0;
  double velocity_weight = 1.0 / 160.0;
  double process_scale = 1.0;
  double measurement_scale = 1.0;
};

/// Constant-velocity Kalman filter over BoxXYAH measurements with a unit
/// frame step. All operations are pure and return new states.
class KalmanFilter {
 public:
  explicit KalmanFilter(MotionNoise noise = {}) : noise_(noise) {}

  const MotionNoise& noise() const { return noise_; }

  KalmanState initiate(const BoxXYAH& measurement) const;

  KalmanState predict(const KalmanState& state) const;
  KalmanState predict(const KalmanState& state, const StateCovariance& process_noise) const;

  KalmanState update(const KalmanState& state, const BoxXYAH& measurement) const;
  KalmanState update(const KalmanState& state, const BoxXYAH& measurement,
                     const MeasurementCovariance& measurement_noise) const;

  /// Squared Mahalanobis distance of each measurement under the projected
  /// measurement distribution of `state`.
  std::vector<double> gating_distance(const KalmanState& state,
                                      std::span<const BoxXYAH> measurements) const;

  StateCovariance process_noise(const KalmanState& state) const;
  MeasurementCovariance measurement_noise(const KalmanState& state) const;

 private:
  MotionNoise noise_;
};

/// Chi-square 0.95 quantile for 4 degrees of freedom.
inline constexpr double kChi2Gate4Dof = 9.4877;

}  // namespace hoimtrack
