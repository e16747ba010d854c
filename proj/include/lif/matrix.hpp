#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lif {

/// Dense row-major matrix of 32-bit reals.
///
/// This is the interchange type: latent codes, embeddings and boundaries all
/// travel as RealMatrix. Arithmetic on the contents is done in double and
/// rounded back to float only when stored.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols);
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<float> data);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] std::span<float> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  [[nodiscard]] std::span<const float> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  float& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  float operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  [[nodiscard]] std::span<const float> data() const noexcept { return data_; }
  [[nodiscard]] std::span<float> data() noexcept { return data_; }

  /// Copies row i into a double vector.
  [[nodiscard]] std::vector<double> row_as_double(std::size_t i) const;

  /// Rounds `values` to float and stores them as row i.
  void set_row(std::size_t i, std::span<const double> values);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

/// True when shapes match and every element has the same bit pattern.
[[nodiscard]] bool bitwise_equal(const RealMatrix& a, const RealMatrix& b) noexcept;

}  // namespace lif
