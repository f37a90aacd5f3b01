#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "hoimtrack/memory.hpp"

namespace hoimtrack {

/// Probabilities are clamped to [kProbabilityFloor, 1 - kProbabilityFloor]
/// before any logarithm.
inline constexpr double kProbabilityFloor = 1e-12;

/// Supervision for one proposal embedding. A person may carry a zero-based
/// identity index; unlabeled persons only supervise the detection level.
struct SampleLabel {
  bool is_person = false;
  std::optional<std::size_t> identity;

  static SampleLabel background() { return {false, std::nullopt}; }
  static SampleLabel person(std::size_t identity) { return {true, identity}; }
  static SampleLabel unlabeled_person() { return {true, std::nullopt}; }
};

struct LossBreakdown {
  double detection_loss = 0.0;
  std::optional<double> oim_loss;  ///< absent without an identity label
  double lambda = 0.0;
  double total = 0.0;
  double person_prob = 0.0;
};

/// Tempered softmax over all stored rows, computed with max subtraction.
Eigen::VectorXd class_probabilities(const Eigen::VectorXd& scores, double temperature);

/// Total probability of the first `n_identities` classes (any person).
double person_probability(const Eigen::VectorXd& probs, std::size_t n_identities);
/// Total probability of the remaining classes (background).
double background_probability(const Eigen::VectorXd& probs, std::size_t n_identities);

/// Binary cross entropy between person and background levels.
double detection_loss(double person_prob, bool is_person);

/// Softmax restricted to the identity rows, evaluated at `identity`.
double identity_probability(const Eigen::VectorXd& scores, double temperature,
                            std::size_t identity, std::size_t n_identities);

/// Negative log of identity_probability.
double oim_loss(const Eigen::VectorXd& scores, double temperature,
                std::size_t identity, std::size_t n_identities);

/// Identity-loss weight 2 p(person)^2.
inline double dynamic_lambda(double person_prob) { return 2.0 * person_prob * person_prob; }

/// Hierarchical loss: detection BCE plus lambda-weighted identity NLL.
LossBreakdown ihoim_loss(const ProjectionMemory& memory, const Embedding& x,
                         const SampleLabel& label);
LossBreakdown ihoim_loss(const Eigen::MatrixXd& weights, std::size_t n_identities,
                         double temperature, const Embedding& x, const SampleLabel& label);

/// Gradient of the hierarchical loss with respect to x. Lambda is held at its
/// forward value (no gradient flows through it).
Eigen::VectorXd ihoim_gradient(const ProjectionMemory& memory, const Embedding& x,
                               const SampleLabel& label);
Eigen::VectorXd ihoim_gradient(const Eigen::MatrixXd& weights, std::size_t n_identities,
                               double temperature, const Embedding& x,
                               const SampleLabel& label);

/// Ablation baseline: the same detection BCE plus a plain cross entropy over
/// all N+B classes for labeled persons, both with weight 1.
LossBreakdown baseline_loss(const ProjectionMemory& memory, const Embedding& x,
                            const SampleLabel& label);
Eigen::VectorXd baseline_gradient(const ProjectionMemory& memory, const Embedding& x,
                                  const SampleLabel& label);

}  // namespace hoimtrack
