#include "lanemap/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lanemap/error.hpp"

namespace lanemap {
namespace {

struct Solution {
  std::vector<std::size_t> col_of_row;
  std::vector<double> u;
  std::vector<double> v;
  double total = 0.0;
};

// Square min-cost assignment with potentials (u, v): u[i] + v[j] <= a(i, j),
// equality on the chosen pairs.
Solution hungarian(const std::vector<double>& a, std::size_t n) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0);
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Solution s;
  s.col_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) s.col_of_row[p[j] - 1] = j - 1;
  s.u.assign(u.begin() + 1, u.end());
  s.v.assign(v.begin() + 1, v.end());
  for (std::size_t i = 0; i < n; ++i) s.total += a[i * n + s.col_of_row[i]];
  return s;
}

class Solver {
 public:
  explicit Solver(const WeightMatrix& w)
      : rows_(w.rows()), cols_(w.cols()), n_(std::max(rows_, cols_)), cost_(n_ * n_, 0.0) {
    double max_abs = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        const double x = w(r, c);
        if (!std::isfinite(x)) throw Error(ErrorKind::kInputDomain, "weight matrix entry is not finite");
        cost_[r * n_ + c] = x;
        max_abs = std::max(max_abs, std::abs(x));
      }
    }
    tol_ = 1e-9 * (1.0 + max_abs) * static_cast<double>(rows_ + cols_);
  }

  Assignment solve() {
    Solution best = hungarian(cost_, n_);
    const double optimum = best.total;
    std::vector<std::size_t> sigma = best.col_of_row;

    // Walk the rows, moving each to the smallest column that still admits an
    // optimal completion.  Only edges tight under the optimal potentials can
    // appear in any optimal assignment.
    for (std::size_t i = 0; i < rows_; ++i) {
      const std::size_t current = rank(sigma[i]);
      for (std::size_t c = 0; c < cols_ && c < current; ++c) {
        if (cost_[i * n_ + c] - best.u[i] - best.v[c] > tol_) continue;
        if (std::find(sigma.begin(), sigma.begin() + static_cast<std::ptrdiff_t>(i), c) !=
            sigma.begin() + static_cast<std::ptrdiff_t>(i)) {
          continue;
        }
        std::vector<std::size_t> trial;
        if (completes_optimally(sigma, i, c, optimum, trial)) {
          sigma = std::move(trial);
          break;
        }
      }
    }

    Assignment out;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (sigma[r] < cols_) {
        out.pairs.emplace_back(r, sigma[r]);
        out.total += cost_[r * n_ + sigma[r]];
      }
    }
    return out;
  }

 private:
  // Padding columns all rank after every real column and equal to each other.
  std::size_t rank(std::size_t col) const { return col < cols_ ? col : cols_; }

  // Fixes rows [0, i) to sigma and row i to column c, solves the rest, and
  // reports whether the total is still optimal.
  bool completes_optimally(const std::vector<std::size_t>& sigma, std::size_t i, std::size_t c,
                           double optimum, std::vector<std::size_t>& result) const {
    std::vector<char> col_used(n_, 0);
    double fixed = 0.0;
    for (std::size_t r = 0; r < i; ++r) {
      col_used[sigma[r]] = 1;
      fixed += cost_[r * n_ + sigma[r]];
    }
    col_used[c] = 1;
    fixed += cost_[i * n_ + c];

    std::vector<std::size_t> free_cols;
    for (std::size_t col = 0; col < n_; ++col) {
      if (!col_used[col]) free_cols.push_back(col);
    }
    const std::size_t m = n_ - i - 1;
    std::vector<double> sub(m * m);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t k = 0; k < m; ++k) sub[r * m + k] = cost_[(i + 1 + r) * n_ + free_cols[k]];
    }
    const Solution s = m > 0 ? hungarian(sub, m) : Solution{};
    if (std::abs(fixed + s.total - optimum) > tol_) return false;
    result.assign(sigma.begin(), sigma.begin() + static_cast<std::ptrdiff_t>(i));
    result.push_back(c);
    for (std::size_t r = 0; r < m; ++r) result.push_back(free_cols[s.col_of_row[r]]);
    return true;
  }

  std::size_t rows_;
  std::size_t cols_;
  std::size_t n_;
  std::vector<double> cost_;
  double tol_ = 0.0;
};

}  // namespace

WeightMatrix WeightMatrix::negated() const {
  WeightMatrix out = *this;
  for (double& x : out.data_) x = -x;
  return out;
}

Assignment min_assignment(const WeightMatrix& w) {
  if (w.empty()) return {};
  return Solver(w).solve();
}

Assignment max_assignment(const WeightMatrix& w) {
  if (w.empty()) return {};
  Assignment a = Solver(w.negated()).solve();
  a.total = -a.total;
  return a;
}

}  // namespace lanemap
