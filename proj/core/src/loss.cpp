#include "hoimtrack/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hoimtrack/errors.hpp"

namespace hoimtrack {
namespace {

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
}

bool is_clamped(double p) {
  return p < kProbabilityFloor || p > 1.0 - kProbabilityFloor;
}

void check_temperature(double temperature) {
  if (!(temperature > 0.0)) throw InputError("temperature must be positive");
}

Eigen::VectorXd stable_softmax(const Eigen::VectorXd& logits) {
  const double peak = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - peak).exp().matrix();
  return e / e.sum();
}

void check_label(const SampleLabel& label, std::size_t n_identities) {
  if (!label.is_person && label.identity) {
    throw InputError("background sample cannot carry an identity");
  }
  if (label.identity && *label.identity >= n_identities) {
    throw InputError("identity " + std::to_string(*label.identity) +
                     " out of range [0, " + std::to_string(n_identities) + ")");
  }
}

void check_shapes(const Eigen::MatrixXd& weights, std::size_t n_identities,
                  const Embedding& x) {
  if (x.size() != weights.cols()) {
    throw InputError("embedding dimension " + std::to_string(x.size()) +
                     " does not match memory dimension " + std::to_string(weights.cols()));
  }
  if (n_identities == 0 || n_identities >= static_cast<std::size_t>(weights.rows())) {
    throw InputError("memory needs at least one identity row and one background row");
  }
}

// One forward pass shared by the loss values and their gradients.
struct Forward {
  Eigen::VectorXd probs;
  double person = 0.0;
  double background = 0.0;
  Eigen::VectorXd identity_probs;  // softmax over identity rows only
};

Forward forward(const Eigen::MatrixXd& weights, std::size_t n_identities,
                double temperature, const Embedding& x) {
  check_temperature(temperature);
  const Eigen::VectorXd scores = weights * x;
  Forward f;
  f.probs = class_probabilities(scores, temperature);
  const auto n = static_cast<Eigen::Index>(n_identities);
  f.person = f.probs.head(n).sum();
  f.background = f.probs.tail(f.probs.size() - n).sum();
  f.identity_probs = stable_softmax(scores.head(n) / temperature);
  return f;
}

// -ln probs(k), floored, computed from the remaining mass when probs(k) is near one.
double neg_log_prob(const Eigen::VectorXd& probs, Eigen::Index k) {
  const double p = probs(k);
  if (p <= 0.5) return -std::log(std::max(p, kProbabilityFloor));
  double rest = 0.0;
  for (Eigen::Index j = 0; j < probs.size(); ++j) {
    if (j != k) rest += probs(j);
  }
  return -std::log1p(-rest);
}

double det_loss(double person, double background, bool is_person) {
  const double target = is_person ? person : background;
  const double other = is_person ? background : person;
  // Near certainty, 1 - other keeps more digits than the summed target.
  if (!is_clamped(target) && other < 0.5) return -std::log1p(-other);
  return -std::log(clamp_probability(target));
}

// d L_det / d logits.
Eigen::VectorXd det_logit_gradient(const Forward& f, std::size_t n_identities,
                                   bool is_person) {
  const auto n = static_cast<Eigen::Index>(n_identities);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(f.probs.size());
  const double target = is_person ? f.person : f.background;
  if (is_clamped(target)) return g;
  const double other = is_person ? f.background : f.person;
  const double ratio = other / target;
  // Own level: -p_j * other / target; opposite level: +p_j.
  if (is_person) {
    g.head(n) = -ratio * f.probs.head(n);
    g.tail(g.size() - n) = f.probs.tail(g.size() - n);
  } else {
    g.head(n) = f.probs.head(n);
    g.tail(g.size() - n) = -ratio * f.probs.tail(g.size() - n);
  }
  return g;
}

}  // namespace

Eigen::VectorXd class_probabilities(const Eigen::VectorXd& scores, double temperature) {
  check_temperature(temperature);
  if (scores.size() == 0) throw InputError("class_probabilities: empty score vector");
  if (!scores.allFinite()) throw InputError("class_probabilities: non-finite score");
  return stable_softmax(scores / temperature);
}

double person_probability(const Eigen::VectorXd& probs, std::size_t n_identities) {
  if (n_identities > static_cast<std::size_t>(probs.size())) {
    throw InputError("person_probability: more identities than classes");
  }
  return probs.head(static_cast<Eigen::Index>(n_identities)).sum();
}

double background_probability(const Eigen::VectorXd& probs, std::size_t n_identities) {
  if (n_identities > static_cast<std::size_t>(probs.size())) {
    throw InputError("background_probability: more identities than classes");
  }
  return probs.tail(probs.size() - static_cast<Eigen::Index>(n_identities)).sum();
}

double detection_loss(double person_prob, bool is_person) {
  return det_loss(person_prob, 1.0 - person_prob, is_person);
}

namespace {

Eigen::VectorXd identity_softmax(const Eigen::VectorXd& scores, double temperature,
                                 std::size_t identity, std::size_t n_identities) {
  check_temperature(temperature);
  if (n_identities == 0 || n_identities > static_cast<std::size_t>(scores.size())) {
    throw InputError("identity_probability: bad identity count");
  }
  if (identity >= n_identities) {
    throw InputError("identity_probability: identity out of range");
  }
  return stable_softmax(scores.head(static_cast<Eigen::Index>(n_identities)) / temperature);
}

}  // namespace

double identity_probability(const Eigen::VectorXd& scores, double temperature,
                            std::size_t identity, std::size_t n_identities) {
  return identity_softmax(scores, temperature, identity, n_identities)(
      static_cast<Eigen::Index>(identity));
}

double oim_loss(const Eigen::VectorXd& scores, double temperature, std::size_t identity,
                std::size_t n_identities) {
  return neg_log_prob(identity_softmax(scores, temperature, identity, n_identities),
                      static_cast<Eigen::Index>(identity));
}

LossBreakdown ihoim_loss(const Eigen::MatrixXd& weights, std::size_t n_identities,
                         double temperature, const Embedding& x, const SampleLabel& label) {
  check_shapes(weights, n_identities, x);
  check_label(label, n_identities);
  const Forward f = forward(weights, n_identities, temperature, x);

  LossBreakdown out;
  out.person_prob = f.person;
  out.lambda = dynamic_lambda(f.person);
  out.detection_loss = det_loss(f.person, f.background, label.is_person);
  out.total = out.detection_loss;
  if (label.identity) {
    out.oim_loss = neg_log_prob(f.identity_probs, static_cast<Eigen::Index>(*label.identity));
    out.total += out.lambda * *out.oim_loss;
  }
  return out;
}

LossBreakdown ihoim_loss(const ProjectionMemory& memory, const Embedding& x,
                         const SampleLabel& label) {
  return ihoim_loss(memory.matrix(), memory.n_identities(), memory.temperature(), x, label);
}

Eigen::VectorXd ihoim_gradient(const Eigen::MatrixXd& weights, std::size_t n_identities,
                               double temperature, const Embedding& x,
                               const SampleLabel& label) {
  check_shapes(weights, n_identities, x);
  check_label(label, n_identities);
  const Forward f = forward(weights, n_identities, temperature, x);

  Eigen::VectorXd logit_grad = det_logit_gradient(f, n_identities, label.is_person);
  if (label.identity) {
    const auto k = static_cast<Eigen::Index>(*label.identity);
    if (f.identity_probs(k) >= kProbabilityFloor) {
      const auto n = static_cast<Eigen::Index>(n_identities);
      Eigen::VectorXd oim_grad = f.identity_probs;
      oim_grad(k) -= 1.0;
      logit_grad.head(n) += dynamic_lambda(f.person) * oim_grad;
    }
  }
  return weights.transpose() * (logit_grad / temperature);
}

Eigen::VectorXd ihoim_gradient(const ProjectionMemory& memory, const Embedding& x,
                               const SampleLabel& label) {
  return ihoim_gradient(memory.matrix(), memory.n_identities(), memory.temperature(), x,
                        label);
}

LossBreakdown baseline_loss(const ProjectionMemory& memory, const Embedding& x,
                            const SampleLabel& label) {
  const auto& weights = memory.matrix();
  check_shapes(weights, memory.n_identities(), x);
  check_label(label, memory.n_identities());
  const Forward f = forward(weights, memory.n_identities(), memory.temperature(), x);

  LossBreakdown out;
  out.person_prob = f.person;
  out.lambda = 1.0;
  out.detection_loss = det_loss(f.person, f.background, label.is_person);
  out.total = out.detection_loss;
  if (label.identity) {
    out.oim_loss = neg_log_prob(f.probs, static_cast<Eigen::Index>(*label.identity));
    out.total += *out.oim_loss;
  }
  return out;
}

Eigen::VectorXd baseline_gradient(const ProjectionMemory& memory, const Embedding& x,
                                  const SampleLabel& label) {
  const auto& weights = memory.matrix();
  check_shapes(weights, memory.n_identities(), x);
  check_label(label, memory.n_identities());
  const Forward f = forward(weights, memory.n_identities(), memory.temperature(), x);

  Eigen::VectorXd logit_grad = det_logit_gradient(f, memory.n_identities(), label.is_person);
  if (label.identity) {
    const auto k = static_cast<Eigen::Index>(*label.identity);
    if (f.probs(k) >= kProbabilityFloor) {
      logit_grad += f.probs;
      logit_grad(k) -= 1.0;
    }
  }
  return weights.transpose() * (logit_grad / memory.temperature());
}

}  // namespace hoimtrack
