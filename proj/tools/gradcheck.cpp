#include "gradcheck.hpp"

#include <algorithm>

#include "hoimtrack/loss.hpp"
#include "hoimtrack/random.hpp"

namespace hoimtrack::tools {
namespace {

constexpr double kStep = 1e-5;

// Each term is differenced on its own so a large flat OIM value does not swamp
// a tiny detection slope.
double term_difference(const LossBreakdown& plus, const LossBreakdown& minus, double lambda) {
  double diff = plus.detection_loss - minus.detection_loss;
  if (plus.oim_loss) diff += lambda * (*plus.oim_loss - *minus.oim_loss);
  return diff;
}

}  // namespace

GradcheckSummary run_gradcheck(std::size_t trials, std::uint64_t seed) {
  RandomStream rng(seed, 0x6772616463686bULL);
  GradcheckSummary summary;
  summary.trials = trials;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t n = 1 + rng.index(8);
    const std::size_t b = 1 + rng.index(8);
    const std::size_t d = 2 + rng.index(63);
    const double tau = rng.bernoulli(0.5) ? 1.0 : 1.0 / 30.0;

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + b),
                                              static_cast<Eigen::Index>(d));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      if (!rng.bernoulli(0.15)) w.row(r) = rng.unit_vector(d).transpose();
    }
    const Eigen::VectorXd x = rng.unit_vector(d);
    SampleLabel label;
    switch (rng.index(3)) {
      case 0: label = SampleLabel::background(); break;
      case 1: label = SampleLabel::unlabeled_person(); break;
      default: label = SampleLabel::person(rng.index(n)); break;
    }

    const double lambda = ihoim_loss(w, n, tau, x, label).lambda;
    const Eigen::VectorXd analytic = ihoim_gradient(w, n, tau, x, label);
    Eigen::VectorXd numeric(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Eigen::VectorXd plus = x, minus = x;
      plus(i) += kStep;
      minus(i) -= kStep;
      numeric(i) = term_difference(ihoim_loss(w, n, tau, plus, label),
                                   ihoim_loss(w, n, tau, minus, label), lambda) /
                   (2 * kStep);
    }
    const double scale = std::max({analytic.norm(), numeric.norm(), 1e-8});
    const double rel = (analytic - numeric).norm() / scale;
    if (rel > summary.max_relative_error) {
      summary.max_relative_error = rel;
      summary.worst_trial = trial;
    }
  }
  return summary;
}

}  // namespace hoimtrack::tools
