#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace hoimtrack {

/// Cost reserved for disallowed pairs. Any solution pair at or above this
/// cost is treated as unmatched by callers.
inline constexpr double kInfeasibleCost = 1e5;

struct Assignment {
  /// column for each row, or nullopt when the row is left unassigned.
  std::vector<std::optional<std::size_t>> row_to_col;
  /// Sum of assigned entries, accumulated in ascending row order.
  double total_cost = 0.0;
};

/// Minimum-cost matching of min(rows, cols) pairs on a rectangular matrix.
/// Among optimal solutions the lexicographically smallest row-major one is
/// returned (rows in order, smaller column first, unassigned last).
Assignment hungarian(const Eigen::MatrixXd& cost);

}  // namespace hoimtrack
