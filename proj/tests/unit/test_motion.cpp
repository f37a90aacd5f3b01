#include "hoimtrack/motion.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hoimtrack/errors.hpp"
#include "hoimtrack/random.hpp"

namespace hoimtrack {
namespace {

KalmanState random_state(RandomStream& rng) {
  KalmanState s;
  s.mean << rng.uniform(0, 500), rng.uniform(0, 500), rng.uniform(0.3, 0.7), rng.uniform(20, 200),
      rng.normal(), rng.normal(), rng.normal(0, 0.01), rng.normal();
  Eigen::Matrix<double, 8, 8> a;
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.normal();
  s.covariance = a * a.transpose() + StateCovariance::Identity();
  return s;
}

void expect_symmetric_psd(const StateCovariance& p) {
  EXPECT_LE((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-9);
  const Eigen::SelfAdjointEigenSolver<StateCovariance> eig(p);
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9 * std::max(1.0, p.norm()));
  EXPECT_TRUE((p.diagonal().array() >= 0.0).all());
}

TEST(Kalman, InitiateMean) {
  const KalmanFilter kf;
  const KalmanState s = kf.initiate({10, 20, 0.5, 40});
  StateVector expected;
  expected << 10, 20, 0.5, 40, 0, 0, 0, 0;
  EXPECT_EQ(s.mean, expected);
  EXPECT_TRUE(StateCovariance(s.covariance.diagonal().asDiagonal()) == s.covariance);
  EXPECT_TRUE((s.covariance.diagonal().array() > 0.0).all());
  EXPECT_EQ(kf.initiate({10, 20, 0.5, 40}).covariance, s.covariance);
}

TEST(Kalman, PredictAdvancesByVelocity) {
  const KalmanFilter kf;
  KalmanState s;
  s.mean << 10, 20, 0.5, 40, 1, 2, 0, 0;
  const KalmanState p = kf.predict(s, StateCovariance::Zero());
  EXPECT_EQ(p.mean(0), 11);
  EXPECT_EQ(p.mean(1), 22);
  EXPECT_EQ(p.mean.tail<4>(), s.mean.tail<4>());
}

TEST(Kalman, PredictFixedPointWithoutVelocityOrNoise) {
  const KalmanFilter kf(MotionNoise{1.0 / 20, 1.0 / 160, 0.0, 1.0});
  KalmanState s = kf.initiate({10, 20, 0.5, 40});
  s.covariance.topRightCorner<4, 4>().setZero();
  s.covariance.bottomRightCorner<4, 4>().setZero();
  const KalmanState p = kf.predict(s);
  EXPECT_EQ(p.mean, s.mean);
  EXPECT_EQ(p.covariance, s.covariance);
}

TEST(Kalman, PredictGrowsTraceWithProcessNoise) {
  RandomStream rng(51, 1);
  const KalmanFilter kf;
  for (int i = 0; i < 200; ++i) {
    const KalmanState s = random_state(rng);
    EXPECT_GT(kf.predict(s).covariance.trace(), s.covariance.trace());
  }
}

TEST(Kalman, ScalarHandAlgebra) {
  // Prior mean 0 variance 1, measurement 1 variance 1 on the first coordinate.
  const KalmanFilter kf;
  KalmanState s;
  s.mean << 0, 5, 0.5, 40, 0, 0, 0, 0;
  s.covariance = StateCovariance::Identity();
  const KalmanState post = kf.update(s, {1, 5, 0.5, 40}, MeasurementCovariance::Identity());
  EXPECT_NEAR(post.mean(0), 0.5, 1e-9);
  EXPECT_NEAR(post.covariance(0, 0), 0.5, 1e-9);
  EXPECT_NEAR(post.mean(1), 5.0, 1e-9);
  EXPECT_NEAR(post.covariance(4, 4), 1.0, 1e-9);
}

TEST(Kalman, PerfectMeasurementLimit) {
  RandomStream rng(52, 1);
  const KalmanFilter kf;
  const KalmanState s = random_state(rng);
  const BoxXYAH z{s.mean(0) + 3, s.mean(1) - 2, s.mean(2), s.mean(3) + 1};
  const KalmanState post = kf.update(s, z, MeasurementCovariance::Identity() * 1e-12);
  EXPECT_NEAR(post.mean(0), z.center_x, 1e-6);
  EXPECT_NEAR(post.mean(1), z.center_y, 1e-6);
  EXPECT_NEAR(post.mean(3), z.height, 1e-6);
}

TEST(Kalman, UninformativeMeasurementLimit) {
  RandomStream rng(53, 1);
  const KalmanFilter kf;
  const KalmanState s = random_state(rng);
  const KalmanState post =
      kf.update(s, {s.mean(0) + 50, s.mean(1), s.mean(2), s.mean(3)}, MeasurementCovariance::Identity() * 1e12);
  EXPECT_LT((post.mean - s.mean).norm(), 1e-6);
  EXPECT_LT((post.covariance - s.covariance).norm(), 1e-6);
}

TEST(Kalman, SingularInnovationIsNumericalError) {
  const KalmanFilter kf(MotionNoise{1.0 / 20, 1.0 / 160, 1.0, 0.0});
  KalmanState s;
  s.mean << 0, 0, 0.5, 40, 0, 0, 0, 0;
  EXPECT_THROW(kf.update(s, {1, 1, 0.5, 40}), NumericalError);
  const std::vector<BoxXYAH> m{{1, 1, 0.5, 40}};
  EXPECT_THROW(kf.gating_distance(s, m), NumericalError);
}

TEST(Kalman, CovarianceStaysSymmetricPsd) {
  RandomStream rng(54, 1);
  const KalmanFilter kf;
  for (int run = 0; run < 50; ++run) {
    KalmanState s = kf.initiate({rng.uniform(0, 500), rng.uniform(0, 500), 0.5, rng.uniform(20, 200)});
    for (int step = 0; step < 40; ++step) {
      if (rng.bernoulli(0.5)) {
        s = kf.predict(s);
      } else {
        const BoxXYAH z{s.mean(0) + rng.normal(0, 5), s.mean(1) + rng.normal(0, 5),
                        s.mean(2) + rng.normal(0, 0.01), std::max(5.0, s.mean(3) + rng.normal(0, 2))};
        s = kf.update(s, z);
      }
      expect_symmetric_psd(s.covariance);
    }
  }
}

BoxXYAH constant_velocity_truth(int t) { return {100 + 3.0 * t, 50 - 1.5 * t, 0.5, 80 + 0.5 * t}; }

// With no process noise and vanishing measurement noise the one-step
// prediction itself must lock on.
TEST(Kalman, NoiselessConstantVelocityConverges) {
  const KalmanFilter kf(MotionNoise{1.0 / 20, 1.0 / 160, 0.0, 1e-12});
  KalmanState s = kf.initiate(constant_velocity_truth(0));
  double error = 0.0;
  for (int t = 1; t <= 20; ++t) {
    s = kf.predict(s);
    const BoxXYAH want = constant_velocity_truth(t);
    error = std::hypot(s.mean(0) - want.center_x, s.mean(1) - want.center_y);
    s = kf.update(s, want);
  }
  EXPECT_LT(error, 1e-6);
}

TEST(Kalman, ZeroMeasurementNoiseFiltersExactly) {
  const KalmanFilter kf(MotionNoise{1.0 / 20, 1.0 / 160, 1.0, 0.0});
  KalmanState s = kf.initiate(constant_velocity_truth(0));
  double previous = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= 20; ++t) {
    s = kf.predict(s);
    const BoxXYAH want = constant_velocity_truth(t);
    const double predicted = std::hypot(s.mean(0) - want.center_x, s.mean(1) - want.center_y);
    if (t > 2) {
      EXPECT_LT(predicted, previous);
    }
    previous = predicted;
    s = kf.update(s, want);
    EXPECT_LT(std::hypot(s.mean(0) - want.center_x, s.mean(1) - want.center_y), 1e-6);
  }
}

TEST(Kalman, GatingZeroAtMean) {
  const KalmanFilter kf;
  const KalmanState s = kf.predict(kf.initiate({10, 20, 0.5, 40}));
  const std::vector<BoxXYAH> m{s.box()};
  EXPECT_EQ(kf.gating_distance(s, m)[0], 0.0);
}

TEST(Kalman, GatingWithIdentityInnovation) {
  const KalmanFilter kf(MotionNoise{1.0 / 20, 1.0 / 160, 1.0, 0.0});
  KalmanState s;
  s.mean << 10, 20, 0.5, 40, 0, 0, 0, 0;
  s.covariance = StateCovariance::Identity();
  const std::vector<BoxXYAH> m{{13, 20, 0.5, 40}, {11.8, 22.4, 0.5, 40}};
  const std::vector<double> d = kf.gating_distance(s, m);
  EXPECT_NEAR(d[0], 9.0, 1e-12);
  EXPECT_NEAR(d[1], 9.0, 1e-12);
}

TEST(Kalman, GatingNonNegativeAndTranslationInvariant) {
  RandomStream rng(55, 1);
  const KalmanFilter kf;
  for (int i = 0; i < 200; ++i) {
    const KalmanState s = random_state(rng);
    std::vector<BoxXYAH> m;
    for (int k = 0; k < 5; ++k) {
      m.push_back({rng.uniform(0, 500), rng.uniform(0, 500), rng.uniform(0.3, 0.7), s.mean(3) + rng.normal(0, 5)});
    }
    const double dx = rng.uniform(-100, 100), dy = rng.uniform(-100, 100);
    KalmanState shifted = s;
    shifted.mean(0) += dx;
    shifted.mean(1) += dy;
    std::vector<BoxXYAH> moved = m;
    for (BoxXYAH& b : moved) {
      b.center_x += dx;
      b.center_y += dy;
    }
    const std::vector<double> a = kf.gating_distance(s, m);
    const std::vector<double> b = kf.gating_distance(shifted, moved);
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_GE(a[k], 0.0);
      EXPECT_NEAR(a[k], b[k], 1e-9 * std::max(1.0, a[k]));
    }
  }
}

}  // namespace
}  // namespace hoimtrack
