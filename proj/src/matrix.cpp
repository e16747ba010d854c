#include "lif/matrix.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace lif {

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {}

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("RealMatrix: data length does not match rows x cols");
  }
}

std::vector<double> RealMatrix::row_as_double(std::size_t i) const {
  auto r = row(i);
  return {r.begin(), r.end()};
}

void RealMatrix::set_row(std::size_t i, std::span<const double> values) {
  if (values.size() != cols_) {
    throw std::invalid_argument("RealMatrix::set_row: length mismatch");
  }
  std::transform(values.begin(), values.end(), row(i).begin(), [](double v) { return static_cast<float>(v); });
}

bool bitwise_equal(const RealMatrix& a, const RealMatrix& b) noexcept {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.empty()) return true;
  return std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(float)) == 0;
}

}  // namespace lif
