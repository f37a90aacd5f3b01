#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hoimtrack/loss.hpp"
#include "hoimtrack/memory.hpp"

namespace hoimtrack {

/// Single L2-normalized linear layer mapping raw f-dim features to d-dim
/// embeddings.
class LinearEmbedder {
 public:
  explicit LinearEmbedder(Eigen::MatrixXd weights);

  /// Gaussian init with entries N(0, 1/f), drawn from the embedder-init stream.
  static LinearEmbedder random(std::size_t output_dim, std::size_t input_dim,
                               std::uint64_t seed);

  std::size_t input_dim() const { return static_cast<std::size_t>(weights_.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  Eigen::MatrixXd& weights() { return weights_; }

  /// normalize(weights * feature); throws DegenerateInputError on a zero image.
  Embedding embed(const Eigen::VectorXd& feature) const;

 private:
  Eigen::MatrixXd weights_;
};

struct TrainSample {
  Eigen::VectorXd feature;
  SampleLabel label;
};

struct TrainConfig {
  double learning_rate = 0.003;
  std::size_t epochs = 10;
  std::size_t batch_size = 8;
  double momentum = 0.5;
  double temperature = 1.0 / 30.0;
  std::uint64_t seed = 0;
};

enum class Objective { kIhoim, kOimBaseline };

struct EpochStats {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  /// Mean lambda over person samples (background lambdas are never applied).
  double mean_lambda = 0.0;
  /// Identity-classification accuracy at the end of the epoch.
  double accuracy = 0.0;
};

struct TrainResult {
  LinearEmbedder model;
  std::vector<EpochStats> history;
};

/// Loss of one sample under the chosen objective.
LossBreakdown sample_loss(Objective objective, const LinearEmbedder& model,
                          const ProjectionMemory& memory, const TrainSample& sample);

/// d loss / d weights for one sample: the objective's embedding gradient
/// pulled back through the normalization and the linear map.
Eigen::MatrixXd weight_gradient(Objective objective, const LinearEmbedder& model,
                                const ProjectionMemory& memory, const TrainSample& sample);

/// Mini-batch SGD on the embedder. Per batch, in order: forward every sample
/// against the current memory, step the weights by the batch-mean gradient,
/// then apply memory writes in data order using the forward embeddings
/// (momentum update for labeled persons, queue push for backgrounds).
/// Accuracy is measured on `eval` when non-empty, else on `data`. The
/// config's momentum and temperature must equal the memory's.
TrainResult train(Objective objective, LinearEmbedder model, std::span<const TrainSample> data,
                  ProjectionMemory& memory, const TrainConfig& config,
                  std::span<const TrainSample> eval = {});

inline TrainResult train(LinearEmbedder model, std::span<const TrainSample> data,
                         ProjectionMemory& memory, const TrainConfig& config,
                         std::span<const TrainSample> eval = {}) {
  return train(Objective::kIhoim, std::move(model), data, memory, config, eval);
}

inline TrainResult train_oim_baseline(LinearEmbedder model, std::span<const TrainSample> data,
                                      ProjectionMemory& memory, const TrainConfig& config,
                                      std::span<const TrainSample> eval = {}) {
  return train(Objective::kOimBaseline, std::move(model), data, memory, config, eval);
}

/// Fraction of labeled samples whose embedding scores highest against its own
/// look-up-table row (lowest index wins ties). Zero when no labeled samples.
double identity_accuracy(const LinearEmbedder& model, const ProjectionMemory& memory,
                         std::span<const TrainSample> samples);

/// CSV with header epoch,mean_loss,mean_lambda,accuracy.
void write_history_csv(const std::filesystem::path& path, std::span<const EpochStats> history);

}  // namespace hoimtrack
