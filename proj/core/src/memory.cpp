#include "hoimtrack/memory.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <cmath>
#include <fstream>
#include <string>

#include "hoimtrack/errors.hpp"

namespace hoimtrack {
namespace {

constexpr std::array<char, 8> kMagic = {'H', 'O', 'I', 'M', 'M', 'E', 'M', '1'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw InputError("memory checkpoint truncated");
  return value;
}

}  // namespace

ProjectionMemory::ProjectionMemory(const MemoryConfig& config)
    : n_identities_(config.n_identities),
      n_background_(config.n_background),
      momentum_(config.momentum),
      temperature_(config.temperature) {
  if (config.n_identities == 0 || config.n_background == 0 || config.dim == 0) {
    throw InputError("ProjectionMemory: sizes must be positive");
  }
  if (!(config.momentum >= 0.0 && config.momentum <= 1.0)) {
    throw InputError("ProjectionMemory: momentum must lie in [0, 1]");
  }
  if (!(config.temperature > 0.0)) {
    throw InputError("ProjectionMemory: temperature must be positive");
  }
  rows_ = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(n_identities_ + n_background_),
      static_cast<Eigen::Index>(config.dim));
}

void ProjectionMemory::check_dim(const Embedding& x, const char* op) const {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw InputError(std::string(op) + ": embedding has dimension " +
                     std::to_string(x.size()) + ", memory expects " +
                     std::to_string(dim()));
  }
}

Eigen::VectorXd ProjectionMemory::project(const Embedding& x) const {
  check_dim(x, "project");
  return rows_ * x;
}

void ProjectionMemory::update_labeled(std::size_t identity, const Embedding& x) {
  check_dim(x, "update_labeled");
  if (identity >= n_identities_) {
    throw InputError("update_labeled: identity " + std::to_string(identity) +
                     " out of range [0, " + std::to_string(n_identities_) + ")");
  }
  auto row = rows_.row(static_cast<Eigen::Index>(identity));
  Eigen::RowVectorXd blended = momentum_ * row + (1.0 - momentum_) * x.transpose();
  // Summed in index order so stored rows do not depend on SIMD width.
  double norm2 = 0.0;
  for (Eigen::Index i = 0; i < blended.size(); ++i) norm2 += blended(i) * blended(i);
  if (norm2 > 0.0) {
    row = blended / std::sqrt(norm2);
  } else {
    row = x.transpose();
  }
}

void ProjectionMemory::push_background(const Embedding& x) {
  check_dim(x, "push_background");
  rows_.row(static_cast<Eigen::Index>(n_identities_ + queue_head_)) = x.transpose();
  queue_head_ = (queue_head_ + 1) % n_background_;
}

void ProjectionMemory::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  write_pod<std::uint64_t>(out, n_identities_);
  write_pod<std::uint64_t>(out, n_background_);
  write_pod<std::uint64_t>(out, dim());
  write_pod<std::uint64_t>(out, queue_head_);
  write_pod<double>(out, momentum_);
  write_pod<double>(out, temperature_);
  for (Eigen::Index r = 0; r < rows_.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows_.cols(); ++c) write_pod<double>(out, rows_(r, c));
  }
  if (!out) throw InputError("failed writing " + path.string());
}

ProjectionMemory ProjectionMemory::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw InputError(path.string() + " is not a memory checkpoint");
  MemoryConfig config;
  config.n_identities = read_pod<std::uint64_t>(in);
  config.n_background = read_pod<std::uint64_t>(in);
  config.dim = read_pod<std::uint64_t>(in);
  const auto head = read_pod<std::uint64_t>(in);
  config.momentum = read_pod<double>(in);
  config.temperature = read_pod<double>(in);
  ProjectionMemory memory(config);
  if (head >= config.n_background) throw InputError("memory checkpoint: queue head out of range");
  memory.queue_head_ = head;
  for (Eigen::Index r = 0; r < memory.rows_.rows(); ++r) {
    for (Eigen::Index c = 0; c < memory.rows_.cols(); ++c) memory.rows_(r, c) = read_pod<double>(in);
  }
  return memory;
}

}  // namespace hoimtrack
