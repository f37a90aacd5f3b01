#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace hoimtrack {

/// Portable seeded random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. It is seeded through std::seed_seq with the words
/// {seed_low32, seed_high32, stream_low32, stream_high32}, so each
/// (seed, stream) pair names an independent, reproducible stream. The
/// standard library distributions are implementation-defined, so every
/// transform below is written out explicitly:
///   uniform()    53 high bits of one draw scaled into [0, 1)
///   normal()     Box-Muller on two uniforms, both outputs used in order
///   index(n)     draw modulo n, rejecting the biased tail
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  bool bernoulli(double p) { return uniform() < p; }
  std::size_t index(std::size_t n);

  /// Uniformly distributed unit vector.
  Eigen::VectorXd unit_vector(std::size_t dim);

  template <typename Container>
  void shuffle(Container& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      using std::swap;
      swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Named stream identifiers. Adding a stream never perturbs existing ones.
enum class Stream : std::uint64_t {
  kPrototypes = 1,
  kTrajectories = 2,
  kOcclusions = 3,
  kDetections = 4,
  kFalsePositives = 5,
  kTrainSamples = 6,
  kTrainShuffle = 7,
  kEmbedderInit = 8,
};

inline RandomStream make_stream(std::uint64_t seed, Stream stream) {
  return RandomStream(seed, static_cast<std::uint64_t>(stream));
}

}  // namespace hoimtrack
