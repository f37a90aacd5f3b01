#include "hoimtrack/motion.hpp"

#include "hoimtrack/errors.hpp"

namespace hoimtrack {
namespace {

StateCovariance transition() {
  StateCovariance f = StateCovariance::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
  return f;
}

MeasurementVector as_vector(const BoxXYAH& box) {
  return {box.center_x, box.center_y, box.aspect, box.height};
}

StateCovariance symmetrized(const StateCovariance& p) { return 0.5 * (p + p.transpose()); }

Eigen::LLT<MeasurementCovariance> factor(const MeasurementCovariance& s) {
  Eigen::LLT<MeasurementCovariance> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("innovation covariance is not positive definite");
  }
  return llt;
}

}  // namespace

KalmanState KalmanFilter::initiate(const BoxXYAH& measurement) const {
  KalmanState state;
  state.mean.head<4>() = as_vector(measurement);
  const double h = measurement.height;
  const double pos = noise_.position_weight * h;
  const double vel = noise_.velocity_weight * h;
  StateVector stddev;
  stddev << 2 * pos, 2 * pos, 1e-2, 2 * pos, 10 * vel, 10 * vel, 1e-5, 10 * vel;
  state.covariance = stddev.array().square().matrix().asDiagonal();
  return state;
}

StateCovariance KalmanFilter::process_noise(const KalmanState& state) const {
  const double h = state.mean(3);
  const double pos = noise_.position_weight * h;
  const double vel = noise_.velocity_weight * h;
  StateVector stddev;
  stddev << pos, pos, 1e-2, pos, vel, vel, 1e-5, vel;
  return noise_.process_scale * StateCovariance(stddev.array().square().matrix().asDiagonal());
}

MeasurementCovariance KalmanFilter::measurement_noise(const KalmanState& state) const {
  const double pos = noise_.position_weight * state.mean(3);
  MeasurementVector stddev(pos, pos, 1e-1, pos);
  return noise_.measurement_scale *
         MeasurementCovariance(stddev.array().square().matrix().asDiagonal());
}

KalmanState KalmanFilter::predict(const KalmanState& state) const {
  return predict(state, process_noise(state));
}

KalmanState KalmanFilter::predict(const KalmanState& state,
                                  const StateCovariance& process_noise) const {
  static const StateCovariance f = transition();
  KalmanState out;
  out.mean = f * state.mean;
  out.covariance = symmetrized(f * state.covariance * f.transpose() + process_noise);
  return out;
}

KalmanState KalmanFilter::update(const KalmanState& state, const BoxXYAH& measurement) const {
  return update(state, measurement, measurement_noise(state));
}

KalmanState KalmanFilter::update(const KalmanState& state, const BoxXYAH& measurement,
                                 const MeasurementCovariance& measurement_noise) const {
  const MeasurementCovariance innovation_cov =
      state.covariance.topLeftCorner<4, 4>() + measurement_noise;
  const auto llt = factor(innovation_cov);
  // Gain K = P H^T S^-1; P H^T is the left 8x4 block of P.
  const Eigen::Matrix<double, 8, 4> pht = state.covariance.leftCols<4>();
  const Eigen::Matrix<double, 8, 4> gain = llt.solve(pht.transpose()).transpose();
  const MeasurementVector innovation = as_vector(measurement) - state.mean.head<4>();

  KalmanState out;
  out.mean = state.mean + gain * innovation;
  out.covariance = symmetrized(state.covariance - gain * innovation_cov * gain.transpose());
  return out;
}

std::vector<double> KalmanFilter::gating_distance(const KalmanState& state,
                                                  std::span<const BoxXYAH> measurements) const {
  const MeasurementCovariance innovation_cov =
      state.covariance.topLeftCorner<4, 4>() + measurement_noise(state);
  const auto llt = factor(innovation_cov);
  const MeasurementCovariance lower = llt.matrixL();
  std::vector<double> out;
  out.reserve(measurements.size());
  for (const auto& m : measurements) {
    const MeasurementVector d = as_vector(m) - state.mean.head<4>();
    const MeasurementVector z = lower.triangularView<Eigen::Lower>().solve(d);
    out.push_back(z.squaredNorm());
  }
  return out;
}

}  // namespace hoimtrack
