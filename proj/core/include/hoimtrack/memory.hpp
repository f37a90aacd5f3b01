#pragma once

#include <cstddef>
#include <filesystem>

#include <Eigen/Dense>

namespace hoimtrack {

/// d-dimensional appearance vector, unit norm by convention.
using Embedding = Eigen::VectorXd;

struct MemoryConfig {
  std::size_t n_identities = 517;
  std::size_t n_background = 500;
  std::size_t dim = 256;
  double momentum = 0.5;
  double temperature = 1.0 / 30.0;
};

/// Projection matrix over stored embeddings: rows [0, N) form the labeled
/// identity look-up table, rows [N, N+B) a circular queue of background
/// embeddings. Rows start at zero and hold unit vectors once written.
///
/// Identity indices are zero-based. Reads may run concurrently; writers need
/// exclusive access.
class ProjectionMemory {
 public:
  explicit ProjectionMemory(const MemoryConfig& config);

  std::size_t n_identities() const { return n_identities_; }
  std::size_t n_background() const { return n_background_; }
  std::size_t dim() const { return static_cast<std::size_t>(rows_.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(rows_.rows()); }
  double momentum() const { return momentum_; }
  double temperature() const { return temperature_; }
  std::size_t queue_head() const { return queue_head_; }

  /// Full (N+B)×d matrix.
  const Eigen::MatrixXd& matrix() const { return rows_; }
  auto lut() const { return rows_.topRows(static_cast<Eigen::Index>(n_identities_)); }
  auto queue() const { return rows_.bottomRows(static_cast<Eigen::Index>(n_background_)); }

  /// Cosine scores s = W x against every stored row.
  Eigen::VectorXd project(const Embedding& x) const;

  /// Momentum blend w_k <- m w_k + (1 - m) x followed by renormalization.
  /// When the blend vanishes (w_k = -x at m = 0.5) the row takes x.
  void update_labeled(std::size_t identity, const Embedding& x);

  /// Overwrites the oldest queue slot with x and advances the head.
  void push_background(const Embedding& x);

  /// Binary checkpoint; layout documented in docs/formats.md.
  void save(const std::filesystem::path& path) const;
  static ProjectionMemory load(const std::filesystem::path& path);

 private:
  void check_dim(const Embedding& x, const char* op) const;

  std::size_t n_identities_;
  std::size_t n_background_;
  double momentum_;
  double temperature_;
  std::size_t queue_head_ = 0;
  Eigen::MatrixXd rows_;
};

}  // namespace hoimtrack
