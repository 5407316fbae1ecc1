#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace lanemap {

// Dense rows x cols matrix of finite reals, row-major.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  WeightMatrix negated() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), ascending row
  double total = 0.0;
};

// Hungarian method.  Rectangular inputs are padded to square internally;
// padding pairs are never reported, so |pairs| == min(rows, cols).  Among
// optimal assignments the one whose per-row column vector is lexicographically
// smallest is returned (an unmatched row compares greater than any column).
Assignment max_assignment(const WeightMatrix& w);
Assignment min_assignment(const WeightMatrix& w);

}  // namespace lanemap
