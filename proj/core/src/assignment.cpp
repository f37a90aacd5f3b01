#include "hoimtrack/assignment.hpp"

#include <cstddef>
#include <limits>

#include "hoimtrack/errors.hpp"

namespace hoimtrack {
namespace {

// Primal solution plus feasible duals: cost(r, c) - row_dual[r] - col_dual[c]
// >= 0 everywhere, with equality on matched pairs and zero column duals on
// unmatched columns of the wide side.
struct Solution {
  std::vector<std::optional<std::size_t>> row_to_col;
  std::vector<double> row_dual;
  std::vector<double> col_dual;
  double cost = 0.0;
};

// Shortest augmenting path with potentials; requires rows <= cols.
Solution solve_wide(const Eigen::MatrixXd& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  const auto m = static_cast<std::size_t>(cost.cols());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based arrays; index 0 is the virtual source column.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> match_col(m + 1, 0), way(m + 1, 0);

  for (std::size_t row = 1; row <= n; ++row) {
    match_col[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[col0] = true;
      const std::size_t row0 = match_col[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double reduced = cost(static_cast<Eigen::Index>(row0 - 1),
                                    static_cast<Eigen::Index>(j - 1)) - u[row0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = col0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          col1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      col0 = col1;
    } while (match_col[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match_col[col0] = match_col[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  Solution out;
  out.row_to_col.assign(n, std::nullopt);
  for (std::size_t j = 1; j <= m; ++j) {
    if (match_col[j] != 0) out.row_to_col[match_col[j] - 1] = j - 1;
  }
  out.row_dual.assign(u.begin() + 1, u.end());
  out.col_dual.assign(v.begin() + 1, v.end());
  return out;
}

Solution solve(const Eigen::MatrixXd& cost) {
  const auto rows = static_cast<std::size_t>(cost.rows());
  Solution out;
  if (cost.rows() == 0 || cost.cols() == 0) {
    out.row_to_col.assign(rows, std::nullopt);
    out.row_dual.assign(rows, 0.0);
    out.col_dual.assign(static_cast<std::size_t>(cost.cols()), 0.0);
    return out;
  }
  if (cost.rows() <= cost.cols()) {
    out = solve_wide(cost);
  } else {
    Solution t = solve_wide(cost.transpose());
    out.row_to_col.assign(rows, std::nullopt);
    for (std::size_t c = 0; c < t.row_to_col.size(); ++c) out.row_to_col[*t.row_to_col[c]] = c;
    out.row_dual = std::move(t.col_dual);
    out.col_dual = std::move(t.row_dual);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (out.row_to_col[r]) {
      out.cost += cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(*out.row_to_col[r]));
    }
  }
  return out;
}

Eigen::MatrixXd without(const Eigen::MatrixXd& cost, Eigen::Index row,
                        std::optional<Eigen::Index> col) {
  const Eigen::Index out_cols = col ? cost.cols() - 1 : cost.cols();
  Eigen::MatrixXd out(cost.rows() - 1, out_cols);
  for (Eigen::Index r = 0, rr = 0; r < cost.rows(); ++r) {
    if (r == row) continue;
    for (Eigen::Index c = 0, cc = 0; c < cost.cols(); ++c) {
      if (col && c == *col) continue;
      out(rr, cc++) = cost(r, c);
    }
    ++rr;
  }
  return out;
}

}  // namespace

Assignment hungarian(const Eigen::MatrixXd& cost) {
  if (!cost.allFinite()) throw InputError("hungarian: cost matrix has non-finite entries");
  Assignment result;
  result.row_to_col.assign(static_cast<std::size_t>(cost.rows()), std::nullopt);
  if (cost.rows() == 0 || cost.cols() == 0) return result;

  const double scale = 1.0 + cost.cwiseAbs().maxCoeff() * static_cast<double>(cost.rows());
  const double tolerance = 1e-12 * scale;

  // Fix rows in order to the smallest column that still admits an optimal
  // completion. Only columns with zero reduced cost can do so.
  Eigen::MatrixXd remaining = cost;
  std::vector<std::size_t> col_ids(static_cast<std::size_t>(cost.cols()));
  for (std::size_t i = 0; i < col_ids.size(); ++i) col_ids[i] = i;

  for (std::size_t row = 0; row < result.row_to_col.size() && remaining.cols() > 0; ++row) {
    const Solution sol = solve(remaining);
    const std::optional<std::size_t> chosen_default = sol.row_to_col[0];
    std::optional<std::size_t> chosen = chosen_default;
    const std::size_t limit = chosen_default ? *chosen_default : col_ids.size();
    for (std::size_t c = 0; c < limit; ++c) {
      const auto ci = static_cast<Eigen::Index>(c);
      const double reduced = remaining(0, ci) - sol.row_dual[0] - sol.col_dual[c];
      if (reduced > tolerance) continue;
      const Eigen::MatrixXd rest = without(remaining, 0, ci);
      const double rest_cost = rest.rows() == 0 || rest.cols() == 0 ? 0.0 : solve(rest).cost;
      if (remaining(0, ci) + rest_cost <= sol.cost + tolerance) {
        chosen = c;
        break;
      }
    }
    if (chosen) {
      result.row_to_col[row] = col_ids[*chosen];
      remaining = without(remaining, 0, static_cast<Eigen::Index>(*chosen));
      col_ids.erase(col_ids.begin() + static_cast<std::ptrdiff_t>(*chosen));
    } else {
      remaining = without(remaining, 0, std::nullopt);
    }
    if (remaining.rows() == 0) break;
  }

  for (std::size_t r = 0; r < result.row_to_col.size(); ++r) {
    if (result.row_to_col[r]) {
      result.total_cost +=
          cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(*result.row_to_col[r]));
    }
  }
  return result;
}

}  // namespace hoimtrack
