#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gemmforge/device.hpp"
#include "gemmforge/gemm_dims.hpp"
#include "gemmforge/rational.hpp"

namespace gemmforge::stratix {

inline constexpr i64 kChainLength = 36;   // TBs per physical chain
inline constexpr i64 kM20kBits = 20480;   // 20 Kbit
inline constexpr i64 kM20kDepthUnit = 512;

// TB layout parameters: array length, arrays per reduction group, reduction
// groups per N-block, N-blocks.
struct TbParams {
  i64 l_a = 0;
  i64 e_k = 0;
  i64 e_n = 0;
  i64 e_m = 0;

  std::string label() const {
    return std::to_string(l_a) + "x" + std::to_string(e_k) + "x" + std::to_string(e_n) +
           "x" + std::to_string(e_m);
  }
  friend bool operator==(const TbParams& a, const TbParams& b) {
    return a.l_a == b.l_a && a.e_k == b.e_k && a.e_n == b.e_n && a.e_m == b.e_m;
  }
  friend bool operator<(const TbParams& a, const TbParams& b) {
    if (a.l_a != b.l_a) return a.l_a < b.l_a;
    if (a.e_k != b.e_k) return a.e_k < b.e_k;
    if (a.e_n != b.e_n) return a.e_n < b.e_n;
    return a.e_m < b.e_m;
  }
};

// l_a must divide 36 and be >= 2 (the first TB of an array is a pure loading
// port); expansions must be >= 1.
void validate(const TbParams& p);
TbParams parse_tb_params(const std::string& text);  // "18x16x4x3"

// Smallest GEMM tile the layout processes natively:
// (E_M·3) × ([L_A−1]·E_K·10) × E_N.
struct ComputeDims {
  i64 d_m = 0;
  i64 d_k = 0;
  i64 d_n = 0;
  std::string str() const {
    return std::to_string(d_m) + "x" + std::to_string(d_k) + "x" + std::to_string(d_n);
  }
};

ComputeDims compute_dims(const TbParams& p);

i64 tb_count(const TbParams& p);  // l_a·e_k·e_n·e_m
i64 n_minimum(const TbParams& p);  // l_a·3·e_n, hides register loading

struct TbUsage {
  i64 used = 0;
  i64 wasted = 0;  // one loading port per array
  double utilization = 0.0;
};

TbUsage tb_usage(const TbParams& p, const StratixDevice& dev);

// Native dims must be multiples of the compute dims, with n >= n_minimum.
// strict enforces that; relaxed evaluates the cost and latency formulas
// exactly (rationally) for dims that break the multiple-of constraints.
enum class DimPolicy { strict, relaxed };

// Named violations ("m", "k", "n"), empty when dims conform.
std::vector<std::string> dim_violations(const TbParams& p, const GemmDims& native);

struct BufferShape {
  i64 a_part = 0, b_part = 0, c_part = 0;
  Rat64 a_depth, b_depth, c_depth;  // 80/80/32-bit-wide entries
};

BufferShape buffer_partitioning(const TbParams& p, const GemmDims& native,
                                DimPolicy policy = DimPolicy::strict);

// M20Ks per 80-bit buffer (pairs of 512×40) and per 32-bit buffer (512×32):
// 2·ceil(depth/512) and ceil(depth/512).
i64 m20k_cost_80(const Rat64& depth);
i64 m20k_cost_32(const Rat64& depth);

i64 total_m20k(const TbParams& p, const GemmDims& native,
               DimPolicy policy = DimPolicy::strict);

// Cycles to process an m×k×n GEMM: initial register load, cascade
// propagation, adder-tree fill, then one result set per cycle per group.
struct LatencyBreakdown {
  i64 t_load = 0;   // l_a·3
  i64 t_prop = 0;   // (l_a−1)·2
  i64 t_adder = 0;  // ceil(log2(e_k))
  Rat64 tiles;      // (m·k)/(d_k·d_m)
  Rat64 t_n;        // n/e_n
  Rat64 t_total;    // t_load + t_prop + t_adder + tiles·t_n
};

LatencyBreakdown latency(const TbParams& p, const GemmDims& dims,
                         DimPolicy policy = DimPolicy::strict);

double throughput_tops(const TbParams& p, const GemmDims& dims, double freq_hz,
                       DimPolicy policy = DimPolicy::strict);

// Worst-case concurrent A/B loads plus C stores (8-bit) over the run time.
double bandwidth_gib(const GemmDims& dims, const Rat64& t_total, double freq_hz);

// Logical buffer bits over physical bits of the M20Ks used (20480 per block).
double ram_efficiency(const TbParams& p, const GemmDims& native,
                      DimPolicy policy = DimPolicy::strict);

// M20K budget for the native-size solver: a fraction of the device total
// (default 0.90) or an absolute block count.
struct M20kBudget {
  double fraction = 0.90;
  std::optional<i64> absolute;

  static M20kBudget from_fraction(double f) { return {f, std::nullopt}; }
  static M20kBudget from_absolute(i64 blocks) { return {0.0, blocks}; }
  i64 resolve(const StratixDevice& dev) const;
};

// Exhaustively maximizes m'·k'·n' over multiples of the compute dims subject
// to the M20K budget and the n' minimum. Ties break toward larger n', then
// k', then m'. Throws InfeasibleError naming the binding constraint.
GemmDims solve_native(const TbParams& p, const StratixDevice& dev,
                      const M20kBudget& budget = {});

struct StratixDesign {
  TbParams params;
  GemmDims native;
  BufferShape shape;
  i64 m20ks_used = 0;
  i64 tbs_used = 0;
  i64 wasted_tbs = 0;
  double freq_hz = 0.0;
  std::optional<double> power_w;
  LatencyBreakdown lat;
  double tops = 0.0;
  double bw_gib = 0.0;
  double ram_eff = 0.0;
  std::optional<double> energy_eff;  // TOPs/W
};

StratixDesign make_design(const TbParams& p, const GemmDims& native, double freq_hz,
                          std::optional<double> power_w,
                          DimPolicy policy = DimPolicy::strict);

struct GridEntry {
  TbParams params;
  double freq_hz = 0.0;
  std::optional<double> power_w;
  std::optional<GemmDims> native;  // overrides solve_native when present
};

std::vector<GridEntry> load_grid(const std::string& path);
std::vector<GridEntry> parse_grid(const std::string& json_text);
const std::string& default_grid_json();
const std::vector<GridEntry>& default_grid();

struct DseResult {
  std::vector<StratixDesign> ranked;  // throughput desc, params lexicographic
  std::vector<std::pair<std::size_t, std::string>> errors;  // grid index, message
};

// Entries with an explicit native size are evaluated with the relaxed policy
// (published design points include non-conforming natives); solver-derived
// natives are conforming by construction.
DseResult dse(const std::vector<GridEntry>& grid, const StratixDevice& dev,
              const M20kBudget& budget = {});

// Effective throughput for an s×s×s workload zero-padded up to multiples of
// (d_m, d_k, max(d_n, n_minimum)).
double scalability_tops(const TbParams& p, double native_peak_tops, i64 s);

}  // namespace gemmforge::stratix
