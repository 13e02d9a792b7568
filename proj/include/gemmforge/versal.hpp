#pragma once

#include <string>
#include <vector>

#include "gemmforge/device.hpp"
#include "gemmforge/gemm_dims.hpp"

namespace gemmforge::versal {

// Per-buffer physical depth cap: partitioned buffers never exceed 4K entries.
inline constexpr i64 kMaxBufferDepth = 4096;

inline constexpr i64 kBram36Bits = 36864;    // 36 Kbit
inline constexpr i64 kUram288Bits = 294912;  // 288 Kbit
inline constexpr i64 kPlioBits = 128;        // AIE<->PL stream width

struct CalibrationPoint {
  double pl_freq_hz = 0.0;
  double tops = 0.0;
};

// One AIE-array GEMM solution: array tiling (x, y, z), single-kernel MatMul
// size (m, k, n), placement label, and measured throughput points.
struct AieSolution {
  std::string name;
  i64 x = 0, y = 0, z = 0;
  i64 m = 0, k = 0, n = 0;
  std::string placement;
  double kernel_efficiency = 0.0;
  std::vector<CalibrationPoint> calibration;

  GemmDims compute_dims() const { return {x * m, y * k, z * n}; }
  std::string label() const {
    return std::to_string(x) + "x" + std::to_string(y) + "x" + std::to_string(z) + " (" +
           placement + ")";
  }
};

// Divisibility invariants: m·k and k·n divisible by 16, m·n divisible by 4,
// so buffer depths are integral for any U, V, W >= 1.
void validate(const AieSolution& sol);
void check_against_device(const AieSolution& sol, const VersalDevice& dev);

std::vector<AieSolution> load_aie_solutions(const std::string& path);
std::vector<AieSolution> parse_aie_solutions(const std::string& json_text);
const std::vector<AieSolution>& default_aie_solutions();
const std::string& default_aie_solutions_json();
const AieSolution& find_aie_solution(const std::vector<AieSolution>& sols,
                                     const std::string& name);

// Measured throughput at a PL frequency; the model never predicts absolute
// Versal TOPs. Throws DomainError if the frequency has no calibration point.
double calibrated_tops(const AieSolution& sol, double pl_freq_hz);

enum class Ram : std::uint8_t { bram = 0, uram = 1 };

struct BufferMapping {
  Ram a = Ram::bram;
  Ram b = Ram::bram;
  Ram c = Ram::bram;

  // Lexicographic rank over (a, b, c) with BRAM < URAM; the enumeration and
  // tie-break order of the solver.
  int rank() const {
    return (static_cast<int>(a) << 2) | (static_cast<int>(b) << 1) | static_cast<int>(c);
  }
  std::string str() const;  // "{B,U,U}"

  friend bool operator==(const BufferMapping& x, const BufferMapping& y) {
    return x.rank() == y.rank();
  }
};

BufferMapping parse_mapping(const std::string& text);  // "BUU", "{B,U,U}", "buu"
std::vector<BufferMapping> all_mappings();             // all 8, in rank order

// Partition factors (number of physical sub-buffers, 128-bit wide each) and
// depth (entries) per logical buffer. Partition factors carry the ×2
// double-buffering factor.
struct BufferGeometry {
  i64 a_part = 0, b_part = 0, c_part = 0;
  i64 a_depth = 0, b_depth = 0, c_depth = 0;
};

BufferGeometry buffer_geometry(const AieSolution& sol, i64 u, i64 v, i64 w);

// BRAM cost of one 128-bit-wide partitioned buffer, in half-BRAM units
// (2K×2-bit remainders pack onto half a BRAM, so costs land on multiples of
// 0.5). Bands: ≤512 → 2, ≤1K → 4, ≤2K → 7.5, ≤4K → 15 BRAMs.
i64 bram_cost_half(i64 depth);
double bram_cost(i64 depth);

// URAMs are 4K×72 only: any legal depth costs 2 blocks per 128-bit buffer.
i64 uram_cost(i64 depth);

struct RamUsage {
  i64 brams = 0;
  i64 urams = 0;
};

// Sums part·cost per buffer under the given mapping. Half-BRAM units are
// summed exactly and rounded up once at the final total.
RamUsage mapping_resources(const BufferGeometry& g, const BufferMapping& mapping);

struct VersalDesign {
  AieSolution aie;
  i64 u = 0, v = 0, w = 0;
  BufferGeometry geometry;
  BufferMapping mapping;
  i64 brams_used = 0;
  i64 urams_used = 0;
  GemmDims compute;  // (X·M) × (Y·K) × (Z·N)
  GemmDims native;   // (U·X·M) × (V·Y·K) × (W·Z·N)

  i64 product() const { return u * v * w; }
  std::string label() const {
    return std::to_string(u) + "x" + std::to_string(v) + "x" + std::to_string(w) + " (" +
           aie.placement + ")";
  }
};

VersalDesign make_design(const AieSolution& sol, i64 u, i64 v, i64 w,
                         const BufferMapping& mapping);
bool fits_device(const VersalDesign& d, const VersalDevice& dev);

// Exhaustively enumerates (U, V, W) over the finite box implied by the depth
// caps and all buffer-to-RAM assignments, keeps candidates that fit the
// device, ranks by U·V·W descending with the deterministic tie-break
// (V desc, U desc, W desc, mapping rank asc), and returns the top_k designs.
// Throws InfeasibleError naming the binding constraint when nothing fits.
std::vector<VersalDesign> solve_uvw(const AieSolution& sol, const VersalDevice& dev,
                                    int top_k);

// Logical buffer bits over physical bits of the blocks used.
double ram_efficiency(const VersalDesign& d);

// Worst-case concurrent A/B loads plus C stores, all 8-bit, over the time to
// compute the native GEMM at the given throughput. GiB/s = 2^30 bytes/s.
double bandwidth_gib(const GemmDims& native, double tops);

struct AieUsage {
  i64 matmul_cores = 0;
  i64 add_cores = 0;
  i64 total_cores = 0;
  i64 plio_in_a = 0;
  i64 plio_in_b = 0;
  i64 plio_out = 0;
};

AieUsage aie_usage(const AieSolution& sol);

// Effective throughput for an s×s×s workload zero-padded up to the next
// multiple of each compute-GEMM dimension.
double scalability_tops(double native_peak_tops, const GemmDims& compute, i64 s);

// HLS array-partition and storage-binding directives, line-ordered A, B, C.
std::string emit_hls_directives(const VersalDesign& d);

}  // namespace gemmforge::versal
