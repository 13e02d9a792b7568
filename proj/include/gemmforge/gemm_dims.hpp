#pragma once

#include <cstdint>
#include <string>

#include "gemmforge/errors.hpp"

namespace gemmforge {

using i64 = std::int64_t;

// Matrix dimensions of C = A·B where A is m×k and B is k×n.
struct GemmDims {
  i64 m = 0;
  i64 k = 0;
  i64 n = 0;

  i64 volume() const { return m * k * n; }
  i64 mac_ops() const { return 2 * m * k * n; }

  std::string str() const {
    return std::to_string(m) + "x" + std::to_string(k) + "x" + std::to_string(n);
  }

  friend bool operator==(const GemmDims& a, const GemmDims& b) {
    return a.m == b.m && a.k == b.k && a.n == b.n;
  }
};

void validate(const GemmDims& dims, const std::string& field = "dims");

// Parses "MxKxN" (also accepts 'X' as the separator).
GemmDims parse_gemm_dims(const std::string& text);

}  // namespace gemmforge
