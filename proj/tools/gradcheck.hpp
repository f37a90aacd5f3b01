#pragma once

#include <cstddef>
#include <cstdint>

namespace hoimtrack::tools {

struct GradcheckSummary {
  std::size_t trials = 0;
  double max_relative_error = 0.0;
  std::size_t worst_trial = 0;
};

/// Compares the analytic loss gradient against central differences
/// (step 1e-5, lambda frozen) on random memories and embeddings.
GradcheckSummary run_gradcheck(std::size_t trials, std::uint64_t seed);

}  // namespace hoimtrack::tools
