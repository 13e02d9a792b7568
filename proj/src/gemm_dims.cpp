#include "gemmforge/gemm_dims.hpp"

#include <cstdlib>

namespace gemmforge {

void validate(const GemmDims& dims, const std::string& field) {
  if (dims.m < 1) throw ValidationError(field + ".m", "must be >= 1");
  if (dims.k < 1) throw ValidationError(field + ".k", "must be >= 1");
  if (dims.n < 1) throw ValidationError(field + ".n", "must be >= 1");
}

GemmDims parse_gemm_dims(const std::string& text) {
  i64 parts[3] = {0, 0, 0};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    std::size_t used = 0;
    try {
      parts[i] = std::stoll(text.substr(pos), &used);
    } catch (const std::exception&) {
      throw ParseError("bad dimension string '" + text + "': expected MxKxN");
    }
    pos += used;
    if (i < 2) {
      if (pos >= text.size() || (text[pos] != 'x' && text[pos] != 'X'))
        throw ParseError("bad dimension string '" + text + "': expected MxKxN");
      ++pos;
    }
  }
  if (pos != text.size())
    throw ParseError("bad dimension string '" + text + "': trailing characters");
  GemmDims dims{parts[0], parts[1], parts[2]};
  validate(dims);
  return dims;
}

}  // namespace gemmforge
