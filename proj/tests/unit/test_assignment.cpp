#include "hoimtrack/assignment.hpp"

#include <gtest/gtest.h>

#include <limits>

#include "hoimtrack/random.hpp"
#include "oracles.hpp"

namespace hoimtrack {
namespace {

Eigen::MatrixXd matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

using Cols = std::vector<std::optional<std::size_t>>;

TEST(Hungarian, Singleton) {
  const Assignment a = hungarian(matrix({{0}}));
  EXPECT_EQ(a.row_to_col, Cols{0});
  EXPECT_EQ(a.total_cost, 0.0);
}

TEST(Hungarian, TwoByTwo) {
  const Assignment a = hungarian(matrix({{1, 2}, {3, 1}}));
  EXPECT_EQ(a.row_to_col, (Cols{0, 1}));
  EXPECT_EQ(a.total_cost, 2.0);
}

TEST(Hungarian, AllEqualPicksIdentity) {
  const Assignment a = hungarian(Eigen::MatrixXd::Constant(3, 3, 4.0));
  EXPECT_EQ(a.row_to_col, (Cols{0, 1, 2}));
}

TEST(Hungarian, EmptyMatrix) {
  EXPECT_TRUE(hungarian(Eigen::MatrixXd(0, 0)).row_to_col.empty());
  EXPECT_EQ(hungarian(Eigen::MatrixXd(3, 0)).row_to_col, (Cols{std::nullopt, std::nullopt, std::nullopt}));
  EXPECT_TRUE(hungarian(Eigen::MatrixXd(0, 2)).row_to_col.empty());
}

TEST(Hungarian, RectangularLeavesRowsUnassigned) {
  const Assignment tall = hungarian(matrix({{5}, {1}, {3}}));
  EXPECT_EQ(tall.row_to_col, (Cols{std::nullopt, 0, std::nullopt}));
  const Assignment wide = hungarian(matrix({{5, 1, 3}}));
  EXPECT_EQ(wide.row_to_col, Cols{1});
}

TEST(Hungarian, NonFiniteRejected) {
  EXPECT_THROW(hungarian(matrix({{1, std::numeric_limits<double>::infinity()}})), std::invalid_argument);
  EXPECT_THROW(hungarian(matrix({{std::nan("")}})), std::invalid_argument);
}

// Small integer costs produce many ties, so the tie-break is checked exactly.
TEST(Hungarian, MatchesBruteForceOnIntegerMatrices) {
  RandomStream rng(61, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const auto rows = static_cast<Eigen::Index>(1 + rng.index(7));
    const auto cols = static_cast<Eigen::Index>(1 + rng.index(7));
    Eigen::MatrixXd cost(rows, cols);
    for (Eigen::Index i = 0; i < cost.size(); ++i) {
      cost(i) = rng.bernoulli(0.1) ? kInfeasibleCost : static_cast<double>(rng.index(4));
    }
    const Assignment got = hungarian(cost);
    const testing::BruteForceAssignment want = testing::brute_force_assignment(cost);
    ASSERT_EQ(got.total_cost, want.cost) << cost;
    ASSERT_EQ(got.row_to_col, want.row_to_col) << cost;
  }
}

TEST(Hungarian, MatchesBruteForceOnContinuousMatrices) {
  RandomStream rng(62, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const auto rows = static_cast<Eigen::Index>(1 + rng.index(7));
    const auto cols = static_cast<Eigen::Index>(1 + rng.index(7));
    Eigen::MatrixXd cost(rows, cols);
    for (Eigen::Index i = 0; i < cost.size(); ++i) cost(i) = rng.uniform(-10, 10);
    const Assignment got = hungarian(cost);
    const testing::BruteForceAssignment want = testing::brute_force_assignment(cost);
    ASSERT_EQ(got.total_cost, want.cost) << cost;
    ASSERT_EQ(got.row_to_col, want.row_to_col) << cost;
  }
}

TEST(Hungarian, OneToOne) {
  RandomStream rng(63, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rows = static_cast<Eigen::Index>(1 + rng.index(12));
    const auto cols = static_cast<Eigen::Index>(1 + rng.index(12));
    Eigen::MatrixXd cost(rows, cols);
    for (Eigen::Index i = 0; i < cost.size(); ++i) cost(i) = rng.uniform();
    const Assignment a = hungarian(cost);
    std::vector<bool> used(static_cast<std::size_t>(cols), false);
    std::size_t assigned = 0;
    for (const auto& c : a.row_to_col) {
      if (!c) continue;
      ASSERT_FALSE(used[*c]);
      used[*c] = true;
      ++assigned;
    }
    EXPECT_EQ(assigned, static_cast<std::size_t>(std::min(rows, cols)));
  }
}

}  // namespace
}  // namespace hoimtrack
