#include "gemmforge/tb_sim.hpp"

#include <bit>
#include <sstream>

namespace gemmforge::sim {

namespace {

std::int32_t wrap_add(std::int32_t a, std::int32_t b) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) +
                                   static_cast<std::uint32_t>(b));
}

// One tensor block: two ping-pong banks of three 10-element int8 registers.
struct TensorBlock {
  std::int8_t bank[2][3][10] = {};
  bool load_port = false;
};

}  // namespace

MatrixI32 reference_gemm(const MatrixI8& a, const MatrixI8& b) {
  if (a.cols != b.rows)
    throw DomainError("shape mismatch: A is " + std::to_string(a.rows) + "x" +
                      std::to_string(a.cols) + ", B is " + std::to_string(b.rows) + "x" +
                      std::to_string(b.cols));
  MatrixI32 c(a.rows, b.cols);
  for (i64 i = 0; i < a.rows; ++i) {
    for (i64 j = 0; j < b.cols; ++j) {
      std::uint32_t acc = 0;
      for (i64 k = 0; k < a.cols; ++k)
        acc += static_cast<std::uint32_t>(
            static_cast<std::int32_t>(a.at(i, k)) * static_cast<std::int32_t>(b.at(k, j)));
      c.at(i, j) = static_cast<std::int32_t>(acc);
    }
  }
  return c;
}

SimResult simulate(const stratix::TbParams& params, const MatrixI8& a, const MatrixI8& b,
                   bool with_trace) {
  stratix::validate(params);
  if (a.cols != b.rows)
    throw DomainError("shape mismatch: A has " + std::to_string(a.cols) +
                      " columns, B has " + std::to_string(b.rows) + " rows");
  const GemmDims dims{a.rows, a.cols, b.cols};
  if (dims.volume() > kMaxSimVolume)
    throw DomainError("workload " + dims.str() + " exceeds the simulator scale guard (2^32)");
  // Strict dimension checks: the dataflow needs exact tiling, and n must be
  // large enough to hide register loading behind streaming.
  const stratix::LatencyBreakdown lb =
      stratix::latency(params, dims, stratix::DimPolicy::strict);

  const stratix::ComputeDims cd = stratix::compute_dims(params);
  const i64 l_a = params.l_a, e_k = params.e_k, e_n = params.e_n, e_m = params.e_m;
  const i64 tiles_m = dims.m / cd.d_m;
  const i64 tiles_k = dims.k / cd.d_k;
  const i64 t_n = lb.t_n.as_int();
  const i64 array_span = (l_a - 1) * 10;  // K positions covered by one array

  SimResult result;
  result.c = MatrixI32(dims.m, dims.n);

  // tbs[nblock][group][array][chain position]; groups of an N-block hold the
  // same A data, mirroring the broadcast.
  std::vector<TensorBlock> tbs(
      static_cast<std::size_t>(e_m * e_n * e_k * l_a));
  auto tb_at = [&](i64 nb, i64 g, i64 ar, i64 t) -> TensorBlock& {
    return tbs[static_cast<std::size_t>(((nb * e_n + g) * e_k + ar) * l_a + t)];
  };
  for (i64 nb = 0; nb < e_m; ++nb)
    for (i64 g = 0; g < e_n; ++g)
      for (i64 ar = 0; ar < e_k; ++ar) tb_at(nb, g, ar, 0).load_port = true;

  // Copies tile (ti, tj) of A into the given register bank via the cascade
  // path: rows enter at the load port and shift toward the array tail.
  auto load_tile = [&](i64 ti, i64 tj, int bank) {
    for (i64 nb = 0; nb < e_m; ++nb) {
      for (i64 g = 0; g < e_n; ++g) {
        for (i64 ar = 0; ar < e_k; ++ar) {
          for (i64 t = 1; t < l_a; ++t) {
            TensorBlock& tb = tb_at(nb, g, ar, t);
            const i64 k_base = tj * cd.d_k + ar * array_span + (t - 1) * 10;
            for (int r = 0; r < 3; ++r) {
              const i64 row = ti * cd.d_m + nb * 3 + r;
              for (int e = 0; e < 10; ++e)
                tb.bank[bank][r][e] = a.at(row, k_base + e);
            }
          }
        }
      }
    }
  };

  const i64 total_tiles = tiles_m * tiles_k;
  load_tile(0, 0, 0);
  if (with_trace) result.trace.push_back({0, "load_start", 0});

  for (i64 tile = 0; tile < total_tiles; ++tile) {
    const i64 ti = tile / tiles_k;
    const i64 tj = tile % tiles_k;
    const int active = static_cast<int>(tile % 2);
    const i64 stream_base = lb.t_load + tile * t_n;
    if (with_trace && tile > 0)
      result.trace.push_back({stream_base, "bank_swap", tile});
    // Next tile's registers load into the inactive bank while this tile
    // streams; the n minimum implies t_load <= t_n, so loading always hides.
    if (tile + 1 < total_tiles) {
      load_tile((tile + 1) / tiles_k, (tile + 1) % tiles_k, 1 - active);
      if (with_trace) result.trace.push_back({stream_base, "load_start", tile + 1});
    }

    for (i64 step = 0; step < t_n; ++step) {
      for (i64 nb = 0; nb < e_m; ++nb) {
        for (i64 g = 0; g < e_n; ++g) {
          const i64 col = g * t_n + step;
          std::array<std::int32_t, 3> lanes{0, 0, 0};
          std::vector<std::array<std::int32_t, 3>> array_out(
              static_cast<std::size_t>(e_k));
          for (i64 ar = 0; ar < e_k; ++ar) {
            std::array<std::int32_t, 3> casc{0, 0, 0};
            for (i64 t = 1; t < l_a; ++t) {
              const TensorBlock& tb = tb_at(nb, g, ar, t);
              const i64 k_base = tj * cd.d_k + ar * array_span + (t - 1) * 10;
              for (int r = 0; r < 3; ++r) {
                std::int32_t dot = 0;
                for (int e = 0; e < 10; ++e)
                  dot += static_cast<std::int32_t>(tb.bank[active][r][e]) *
                         static_cast<std::int32_t>(b.at(k_base + e, col));
                casc[r] = wrap_add(casc[r], dot);
              }
            }
            array_out[static_cast<std::size_t>(ar)] = casc;
            if (with_trace)
              result.trace.push_back({stream_base + step + lb.t_prop, "array_out", tile, nb,
                                      g, ar, col, casc});
          }
          // Balanced soft-logic adder tree over the reduction group.
          std::vector<std::array<std::int32_t, 3>> level = std::move(array_out);
          while (level.size() > 1) {
            std::vector<std::array<std::int32_t, 3>> next;
            for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
              std::array<std::int32_t, 3> sum{};
              for (int r = 0; r < 3; ++r) sum[r] = wrap_add(level[i][r], level[i + 1][r]);
              next.push_back(sum);
            }
            if (level.size() % 2 == 1) next.push_back(level.back());
            level = std::move(next);
          }
          lanes = level.front();
          if (with_trace)
            result.trace.push_back({stream_base + step + lb.t_prop + lb.t_adder, "group_out",
                                    tile, nb, g, -1, col, lanes});
          for (int r = 0; r < 3; ++r) {
            const i64 row = ti * cd.d_m + nb * 3 + r;
            result.c.at(row, col) = wrap_add(result.c.at(row, col), lanes[r]);
          }
        }
      }
    }
  }

  result.cycles = lb.t_total.as_int();
  return result;
}

std::string trace_to_jsonl(const std::vector<TraceEvent>& trace) {
  std::ostringstream out;
  for (const auto& e : trace) {
    out << "{\"cycle\":" << e.cycle << ",\"kind\":\"" << e.kind << "\"";
    if (e.tile >= 0) out << ",\"tile\":" << e.tile;
    if (e.nblock >= 0) out << ",\"nblock\":" << e.nblock;
    if (e.group >= 0) out << ",\"group\":" << e.group;
    if (e.array >= 0) out << ",\"array\":" << e.array;
    if (e.column >= 0) out << ",\"column\":" << e.column;
    if (e.kind == "array_out" || e.kind == "group_out")
      out << ",\"values\":[" << e.values[0] << "," << e.values[1] << "," << e.values[2]
          << "]";
    out << "}\n";
  }
  return out.str();
}

}  // namespace gemmforge::sim
