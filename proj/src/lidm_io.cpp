#include "lif/lidm_io.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "lif/error.hpp"

namespace lif {

namespace {

constexpr std::uint8_t kMagic[4] = {'L', 'I', 'D', 'M'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFFu));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFFu));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> encode_matrix(const RealMatrix& mat) {
  if (mat.empty()) {
    throw FormatError(FormatFault::EmptyMatrix, "empty matrix");
  }
  if (mat.rows() > UINT32_MAX || mat.cols() > UINT32_MAX) {
    throw ValidationError("matrix too large for LIDM");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kLidmHeaderSize + 4 * mat.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u16(out, kLidmVersion);
  put_u32(out, static_cast<std::uint32_t>(mat.rows()));
  put_u32(out, static_cast<std::uint32_t>(mat.cols()));
  for (float v : mat.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

RealMatrix decode_matrix(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw FormatError(FormatFault::BadMagic, "bad magic");
  }
  if (bytes.size() < kLidmHeaderSize) {
    throw FormatError(FormatFault::Truncated, "truncated header");
  }
  const std::uint16_t version = static_cast<std::uint16_t>(bytes[4] | (bytes[5] << 8));
  if (version != kLidmVersion) {
    throw FormatError(FormatFault::BadVersion, "unsupported version " + std::to_string(version));
  }
  const std::size_t rows = get_u32(&bytes[6]);
  const std::size_t cols = get_u32(&bytes[10]);
  if (rows == 0 || cols == 0) {
    throw FormatError(FormatFault::EmptyMatrix, "empty matrix");
  }
  const std::size_t expected = kLidmHeaderSize + 4 * rows * cols;
  if (bytes.size() < expected) {
    throw FormatError(FormatFault::Truncated, "truncated: declared " + std::to_string(rows) + "x" +
                                                  std::to_string(cols) + " but payload carries " +
                                                  std::to_string((bytes.size() - kLidmHeaderSize) / 4) +
                                                  " floats");
  }
  if (bytes.size() > expected) {
    throw FormatError(FormatFault::TrailingBytes, "trailing bytes after payload");
  }
  std::vector<float> data(rows * cols);
  const std::uint8_t* p = bytes.data() + kLidmHeaderSize;
  for (std::size_t k = 0; k < data.size(); ++k, p += 4) {
    const float v = std::bit_cast<float>(get_u32(p));
    if (!std::isfinite(v)) {
      throw FormatError(FormatFault::NonFinite, "non-finite element at row " + std::to_string(k / cols) +
                                                    ", col " + std::to_string(k % cols));
    }
    data[k] = v;
  }
  return RealMatrix(rows, cols, std::move(data));
}

void write_matrix(const std::filesystem::path& path, const RealMatrix& mat) {
  const auto bytes = encode_matrix(mat);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

RealMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_matrix(bytes);
  } catch (const FormatError& e) {
    throw FormatError(e.fault(), path.string() + ": " + e.what());
  }
}

void write_matrix_csv(const std::filesystem::path& path, const RealMatrix& mat) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.precision(9);
  for (std::size_t i = 0; i < mat.rows(); ++i) {
    auto r = mat.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out << ',';
      out << r[j];
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace lif
