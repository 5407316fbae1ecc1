#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "lanemap/assignment.hpp"
#include "lanemap/error.hpp"
#include "support/oracles.hpp"

namespace lanemap {
namespace {

WeightMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, bool integer) {
  WeightMatrix w(r, c);
  std::uniform_real_distribution<double> real(-50, 50);
  std::uniform_int_distribution<int> small(0, 4);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) w(i, j) = integer ? small(rng) : real(rng);
  }
  return w;
}

void expect_valid(const Assignment& a, const WeightMatrix& w) {
  EXPECT_EQ(a.pairs.size(), std::min(w.rows(), w.cols()));
  std::set<std::size_t> rows, cols;
  double total = 0.0;
  for (std::size_t k = 0; k < a.pairs.size(); ++k) {
    const auto [r, c] = a.pairs[k];
    ASSERT_LT(r, w.rows());
    ASSERT_LT(c, w.cols());
    EXPECT_TRUE(rows.insert(r).second);
    EXPECT_TRUE(cols.insert(c).second);
    if (k) EXPECT_LT(a.pairs[k - 1].first, r);
    total += w(r, c);
  }
  EXPECT_NEAR(total, a.total, 1e-9);
}

TEST(Assignment, DiagonalDominant) {
  WeightMatrix w(3, 3, 1.0);
  for (std::size_t i = 0; i < 3; ++i) w(i, i) = 10.0;
  const auto a = max_assignment(w);
  EXPECT_DOUBLE_EQ(a.total, 30.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.pairs[i], (std::pair<std::size_t, std::size_t>{i, i}));
}

TEST(Assignment, AllZero) {
  const WeightMatrix w(4, 4, 0.0);
  const auto a = max_assignment(w);
  expect_valid(a, w);
  EXPECT_DOUBLE_EQ(a.total, 0.0);
  // Lexicographic tie-break picks the identity.
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.pairs[i].second, i);
}

TEST(Assignment, IdentityCostMin) {
  WeightMatrix w(5, 5, 3.0);
  for (std::size_t i = 0; i < 5; ++i) w(i, i) = 0.0;
  const auto a = min_assignment(w);
  EXPECT_DOUBLE_EQ(a.total, 0.0);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(a.pairs[i].second, i);
}

TEST(Assignment, BruteForceAgreement) {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t r = std::uniform_int_distribution<std::size_t>(1, 7)(rng);
    const std::size_t c = trial % 4 == 0 ? std::uniform_int_distribution<std::size_t>(1, 7)(rng) : r;
    const auto w = random_matrix(rng, r, c, trial % 2 == 0);
    const auto mx = max_assignment(w);
    const auto mn = min_assignment(w);
    expect_valid(mx, w);
    expect_valid(mn, w);
    EXPECT_NEAR(mx.total, oracle::brute_force_optimum(w, true), 1e-9);
    EXPECT_NEAR(mn.total, oracle::brute_force_optimum(w, false), 1e-9);
  }
}

TEST(Assignment, SignSymmetry) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 7)(rng);
    const auto w = random_matrix(rng, n, n, false);
    EXPECT_NEAR(max_assignment(w).total, -min_assignment(w.negated()).total, 1e-9);
  }
}

TEST(Assignment, ConstantShiftKeepsPairing) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 7)(rng);
    WeightMatrix w = random_matrix(rng, n, n, false);
    WeightMatrix shifted = w;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) shifted(i, j) += 17.0;
    }
    const auto a = max_assignment(w);
    const auto b = max_assignment(shifted);
    EXPECT_EQ(a.pairs, b.pairs);
    EXPECT_NEAR(b.total, a.total + 17.0 * n, 1e-9);
  }
}

// Lexicographically smallest optimal column vector by brute force; rows left
// unmatched compare greater than every column.
std::vector<std::size_t> lexicographic_optimum(const WeightMatrix& w) {
  const std::size_t r = w.rows(), c = w.cols();
  const std::size_t n = std::max(r, c);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_cols;
  do {
    double total = 0.0;
    std::vector<std::size_t> cols(r);
    for (std::size_t i = 0; i < r; ++i) {
      cols[i] = perm[i] < c ? perm[i] : c;  // c encodes "unmatched"
      if (perm[i] < c) total += w(i, perm[i]);
    }
    if (total > best + 1e-9 || (std::abs(total - best) <= 1e-9 && cols < best_cols)) {
      best = std::max(best, total);
      best_cols = cols;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best_cols;
}

TEST(Assignment, LexicographicTieBreak) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t r = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::size_t c = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const auto w = random_matrix(rng, r, c, true);
    const auto a = max_assignment(w);
    std::vector<std::size_t> cols(r, c);
    for (const auto& [i, j] : a.pairs) cols[i] = j;
    EXPECT_EQ(cols, lexicographic_optimum(w)) << "trial " << trial;
  }
}

TEST(Assignment, EmptyAndInvalid) {
  EXPECT_TRUE(max_assignment(WeightMatrix()).pairs.empty());
  EXPECT_TRUE(min_assignment(WeightMatrix(0, 3)).pairs.empty());
  WeightMatrix w(2, 2, 1.0);
  w(1, 0) = std::numeric_limits<double>::quiet_NaN();
  try {
    max_assignment(w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInputDomain);
  }
}

}  // namespace
}  // namespace lanemap
