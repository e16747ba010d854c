#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "lif/matrix.hpp"

namespace lif {

// LIDM layout, all little-endian:
//   "LIDM" | u16 version (=1) | u32 rows | u32 cols | rows*cols f32, row-major
inline constexpr std::uint16_t kLidmVersion = 1;
inline constexpr std::size_t kLidmHeaderSize = 14;

[[nodiscard]] std::vector<std::uint8_t> encode_matrix(const RealMatrix& mat);
[[nodiscard]] RealMatrix decode_matrix(const std::vector<std::uint8_t>& bytes);

/// Throws FormatError(EmptyMatrix) for a matrix with no elements, IoError on write failure.
void write_matrix(const std::filesystem::path& path, const RealMatrix& mat);

/// Validates magic, version, size and finiteness. Each failure has its own FormatFault.
[[nodiscard]] RealMatrix read_matrix(const std::filesystem::path& path);

/// Debug dump: one line per row, comma separated.
void write_matrix_csv(const std::filesystem::path& path, const RealMatrix& mat);

}  // namespace lif
