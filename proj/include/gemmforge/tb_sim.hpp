#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gemmforge/stratix.hpp"

namespace gemmforge::sim {

struct MatrixI8 {
  i64 rows = 0;
  i64 cols = 0;
  std::vector<std::int8_t> data;  // row-major

  MatrixI8() = default;
  MatrixI8(i64 r, i64 c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c), 0) {}
  std::int8_t at(i64 r, i64 c) const { return data[static_cast<std::size_t>(r * cols + c)]; }
  std::int8_t& at(i64 r, i64 c) { return data[static_cast<std::size_t>(r * cols + c)]; }
};

struct MatrixI32 {
  i64 rows = 0;
  i64 cols = 0;
  std::vector<std::int32_t> data;  // row-major

  MatrixI32() = default;
  MatrixI32(i64 r, i64 c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c), 0) {}
  std::int32_t at(i64 r, i64 c) const {
    return data[static_cast<std::size_t>(r * cols + c)];
  }
  std::int32_t& at(i64 r, i64 c) { return data[static_cast<std::size_t>(r * cols + c)]; }

  friend bool operator==(const MatrixI32& a, const MatrixI32& b) {
    return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
  }
};

// Plain int8 GEMM oracle with wrapping two's-complement 32-bit accumulation.
MatrixI32 reference_gemm(const MatrixI8& a, const MatrixI8& b);

struct TraceEvent {
  i64 cycle = 0;
  std::string kind;  // load_start | bank_swap | array_out | group_out
  i64 tile = -1;
  i64 nblock = -1;
  i64 group = -1;
  i64 array = -1;
  i64 column = -1;
  std::array<std::int32_t, 3> values{0, 0, 0};
};

struct SimResult {
  MatrixI32 c;
  i64 cycles = 0;
  std::vector<TraceEvent> trace;
};

// Workloads above this element-volume are refused; this is a desk-scale tool.
inline constexpr i64 kMaxSimVolume = i64{1} << 32;

// Cycle-level functional simulation of the TB layout: ping-pong register
// banks, cascade loading, per-TB dot products, cascade accumulation, soft
// adder trees, and C-buffer accumulation. The event schedule is constructed
// so that the latency formula holds exactly; the numerical result equals
// reference_gemm elementwise.
SimResult simulate(const stratix::TbParams& params, const MatrixI8& a, const MatrixI8& b,
                   bool with_trace = false);

std::string trace_to_jsonl(const std::vector<TraceEvent>& trace);

}  // namespace gemmforge::sim
