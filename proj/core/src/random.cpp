#include "hoimtrack/random.hpp"

#include <cmath>
#include <numbers>

#include "hoimtrack/errors.hpp"

namespace hoimtrack {
namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(seeded_engine(seed, stream)) {}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::size_t RandomStream::index(std::size_t n) {
  if (n == 0) throw InputError("RandomStream::index: empty range");
  const std::uint64_t bound = n;
  // Largest multiple of bound that fits; reject the tail to stay unbiased.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t draw = engine_();
  while (draw > limit) draw = engine_();
  return static_cast<std::size_t>(draw % bound);
}

Eigen::VectorXd RandomStream::unit_vector(std::size_t dim) {
  if (dim == 0) throw InputError("unit_vector: zero dimension");
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  do {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal();
  } while (v.norm() == 0.0);
  return v.normalized();
}

}  // namespace hoimtrack
