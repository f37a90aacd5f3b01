#include "hoimtrack/learn.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "hoimtrack/errors.hpp"
#include "hoimtrack/random.hpp"
#include "text_format.hpp"

namespace hoimtrack {
namespace {

void check_sample(const TrainSample& sample, const LinearEmbedder& model,
                  const ProjectionMemory& memory) {
  if (static_cast<std::size_t>(sample.feature.size()) != model.input_dim()) {
    throw InputError("train sample feature has dimension " +
                     std::to_string(sample.feature.size()) + ", embedder expects " +
                     std::to_string(model.input_dim()));
  }
  if (!sample.label.is_person && sample.label.identity) {
    throw InputError("background sample cannot carry an identity");
  }
  if (sample.label.identity && *sample.label.identity >= memory.n_identities()) {
    throw InputError("train sample identity " + std::to_string(*sample.label.identity) +
                     " out of range [0, " + std::to_string(memory.n_identities()) + ")");
  }
}

Eigen::VectorXd embedding_gradient(Objective objective, const ProjectionMemory& memory,
                                   const Embedding& e, const SampleLabel& label) {
  return objective == Objective::kIhoim ? ihoim_gradient(memory, e, label)
                                        : baseline_gradient(memory, e, label);
}

}  // namespace

LinearEmbedder::LinearEmbedder(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() == 0 || weights_.cols() == 0) {
    throw InputError("LinearEmbedder: empty weight matrix");
  }
}

LinearEmbedder LinearEmbedder::random(std::size_t output_dim, std::size_t input_dim,
                                      std::uint64_t seed) {
  if (output_dim == 0 || input_dim == 0) throw InputError("LinearEmbedder: zero dimension");
  RandomStream rng = make_stream(seed, Stream::kEmbedderInit);
  const double scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
  Eigen::MatrixXd w(static_cast<Eigen::Index>(output_dim), static_cast<Eigen::Index>(input_dim));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = scale * rng.normal();
  }
  return LinearEmbedder(std::move(w));
}

Embedding LinearEmbedder::embed(const Eigen::VectorXd& feature) const {
  if (static_cast<std::size_t>(feature.size()) != input_dim()) {
    throw InputError("embed: feature has dimension " + std::to_string(feature.size()) +
                     ", expected " + std::to_string(input_dim()));
  }
  const Eigen::VectorXd v = weights_ * feature;
  const double norm = v.norm();
  if (!(norm > 0.0)) throw DegenerateInputError("embed: linear image is zero");
  return v / norm;
}

LossBreakdown sample_loss(Objective objective, const LinearEmbedder& model,
                          const ProjectionMemory& memory, const TrainSample& sample) {
  check_sample(sample, model, memory);
  const Embedding e = model.embed(sample.feature);
  return objective == Objective::kIhoim ? ihoim_loss(memory, e, sample.label)
                                        : baseline_loss(memory, e, sample.label);
}

Eigen::MatrixXd weight_gradient(Objective objective, const LinearEmbedder& model,
                                const ProjectionMemory& memory, const TrainSample& sample) {
  check_sample(sample, model, memory);
  const Eigen::VectorXd v = model.weights() * sample.feature;
  const double norm = v.norm();
  if (!(norm > 0.0)) throw DegenerateInputError("weight_gradient: linear image is zero");
  const Embedding e = v / norm;
  const Eigen::VectorXd g = embedding_gradient(objective, memory, e, sample.label);
  // Jacobian of v -> v/|v| is (I - e e^T) / |v|.
  const Eigen::VectorXd dv = (g - e * e.dot(g)) / norm;
  return dv * sample.feature.transpose();
}

TrainResult train(Objective objective, LinearEmbedder model, std::span<const TrainSample> data,
                  ProjectionMemory& memory, const TrainConfig& config,
                  std::span<const TrainSample> eval) {
  if (!(config.learning_rate >= 0.0)) throw InputError("train: negative learning rate");
  if (config.epochs == 0) throw InputError("train: epochs must be at least 1");
  if (config.batch_size == 0) throw InputError("train: batch_size must be at least 1");
  if (model.output_dim() != memory.dim()) {
    throw InputError("train: embedder output dimension does not match memory");
  }
  if (config.momentum != memory.momentum() || config.temperature != memory.temperature()) {
    throw InputError("train: momentum and temperature must match the memory");
  }
  for (const auto& sample : data) check_sample(sample, model, memory);

  RandomStream rng = make_stream(config.seed, Stream::kTrainShuffle);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{model, {}};
  LinearEmbedder& current = result.model;
  const std::span<const TrainSample> accuracy_set = eval.empty() ? data : eval;

  struct Pending {
    const TrainSample* sample;
    Embedding embedding;
  };

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    double lambda_sum = 0.0;
    std::size_t person_count = 0;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(current.weights().rows(),
                                                   current.weights().cols());
      std::vector<Pending> pending;
      pending.reserve(stop - start);

      for (std::size_t i = start; i < stop; ++i) {
        const TrainSample& sample = data[order[i]];
        const Eigen::VectorXd v = current.weights() * sample.feature;
        const double norm = v.norm();
        if (!(norm > 0.0)) throw DegenerateInputError("train: linear image is zero");
        Embedding e = v / norm;

        const LossBreakdown loss = objective == Objective::kIhoim
                                       ? ihoim_loss(memory, e, sample.label)
                                       : baseline_loss(memory, e, sample.label);
        loss_sum += loss.total;
        if (sample.label.is_person) {
          lambda_sum += dynamic_lambda(loss.person_prob);
          ++person_count;
        }
        const Eigen::VectorXd g = embedding_gradient(objective, memory, e, sample.label);
        const Eigen::VectorXd dv = (g - e * e.dot(g)) / norm;
        grad.noalias() += dv * sample.feature.transpose();
        pending.push_back({&sample, std::move(e)});
      }

      current.weights() -=
          (config.learning_rate / static_cast<double>(stop - start)) * grad;

      for (const auto& p : pending) {
        if (p.sample->label.identity) {
          memory.update_labeled(*p.sample->label.identity, p.embedding);
        } else if (!p.sample->label.is_person) {
          memory.push_background(p.embedding);
        }
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = data.empty() ? 0.0 : loss_sum / static_cast<double>(data.size());
    stats.mean_lambda = person_count == 0 ? 0.0 : lambda_sum / static_cast<double>(person_count);
    stats.accuracy = identity_accuracy(current, memory, accuracy_set);
    result.history.push_back(stats);
  }
  return result;
}

double identity_accuracy(const LinearEmbedder& model, const ProjectionMemory& memory,
                         std::span<const TrainSample> samples) {
  std::size_t labeled = 0;
  std::size_t correct = 0;
  const auto lut = memory.lut();
  for (const auto& sample : samples) {
    if (!sample.label.identity) continue;
    ++labeled;
    const Eigen::VectorXd scores = lut * model.embed(sample.feature);
    Eigen::Index best = 0;
    scores.maxCoeff(&best);
    if (static_cast<std::size_t>(best) == *sample.label.identity) ++correct;
  }
  return labeled == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(labeled);
}

void write_history_csv(const std::filesystem::path& path, std::span<const EpochStats> history) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << "epoch,mean_loss,mean_lambda,accuracy\n";
  for (const auto& s : history) {
    out << s.epoch << ',' << format_double(s.mean_loss) << ',' << format_double(s.mean_lambda)
        << ',' << format_double(s.accuracy) << '\n';
  }
}

}  // namespace hoimtrack
