#include "gemmforge/stratix.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gemmforge::stratix {

using nlohmann::json;

void validate(const TbParams& p) {
  if (p.l_a < 2)
    throw ValidationError("l_a", "array length must be >= 2 (first TB is a loading port)");
  if (kChainLength % p.l_a != 0)
    throw ValidationError("l_a", "array length must divide 36");
  if (p.e_k < 1) throw ValidationError("e_k", "must be >= 1");
  if (p.e_n < 1) throw ValidationError("e_n", "must be >= 1");
  if (p.e_m < 1) throw ValidationError("e_m", "must be >= 1");
}

TbParams parse_tb_params(const std::string& text) {
  i64 parts[4] = {0, 0, 0, 0};
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    std::size_t used = 0;
    try {
      parts[i] = std::stoll(text.substr(pos), &used);
    } catch (const std::exception&) {
      throw ParseError("bad TB config '" + text + "': expected LAxEKxENxEM");
    }
    pos += used;
    if (i < 3) {
      if (pos >= text.size() || (text[pos] != 'x' && text[pos] != 'X'))
        throw ParseError("bad TB config '" + text + "': expected LAxEKxENxEM");
      ++pos;
    }
  }
  if (pos != text.size())
    throw ParseError("bad TB config '" + text + "': trailing characters");
  TbParams p{parts[0], parts[1], parts[2], parts[3]};
  validate(p);
  return p;
}

ComputeDims compute_dims(const TbParams& p) {
  return {p.e_m * 3, (p.l_a - 1) * p.e_k * 10, p.e_n};
}

i64 tb_count(const TbParams& p) { return p.l_a * p.e_k * p.e_n * p.e_m; }

i64 n_minimum(const TbParams& p) { return p.l_a * 3 * p.e_n; }

TbUsage tb_usage(const TbParams& p, const StratixDevice& dev) {
  TbUsage usage;
  usage.used = tb_count(p);
  usage.wasted = p.e_k * p.e_n * p.e_m;
  if (usage.used > dev.tb_total)
    throw InfeasibleError("TB layout " + p.label() + " needs " + std::to_string(usage.used) +
                          " tensor blocks, device " + dev.name + " has " +
                          std::to_string(dev.tb_total));
  usage.utilization =
      static_cast<double>(usage.used) / static_cast<double>(dev.tb_total);
  return usage;
}

std::vector<std::string> dim_violations(const TbParams& p, const GemmDims& native) {
  const ComputeDims cd = compute_dims(p);
  std::vector<std::string> out;
  if (native.m % cd.d_m != 0)
    out.push_back("m: " + std::to_string(native.m) + " is not a multiple of D_M' = " +
                  std::to_string(cd.d_m));
  if (native.k % cd.d_k != 0)
    out.push_back("k: " + std::to_string(native.k) + " is not a multiple of D_K' = " +
                  std::to_string(cd.d_k));
  if (native.n % cd.d_n != 0)
    out.push_back("n: " + std::to_string(native.n) + " is not a multiple of E_N = " +
                  std::to_string(cd.d_n));
  return out;
}

namespace {

void check_dims(const TbParams& p, const GemmDims& dims, DimPolicy policy) {
  validate(p);
  validate(dims);
  // Keeps every product in the cost and latency formulas exact in int64.
  if (dims.m > 1000000 || dims.k > 1000000 || dims.n > 1000000)
    throw DomainError("dimensions above 1e6 are outside this tool's scale");
  // The n minimum is load-latency hiding, not tiling granularity; it holds in
  // both policies.
  if (dims.n < n_minimum(p))
    throw ValidationError("n", std::to_string(dims.n) + " is too small to hide register " +
                                   "loading; need n >= L_A·3·E_N = " +
                                   std::to_string(n_minimum(p)));
  if (policy == DimPolicy::strict) {
    const auto violations = dim_violations(p, dims);
    if (!violations.empty()) throw ValidationError("dims", violations.front());
  }
}

}  // namespace

BufferShape buffer_partitioning(const TbParams& p, const GemmDims& native,
                                DimPolicy policy) {
  check_dims(p, native, policy);
  BufferShape s;
  s.b_part = (p.l_a - 1) * p.e_k * p.e_n;
  s.a_part = p.e_m * p.e_k;
  s.c_part = p.e_m * p.e_n * 3 * 2;
  s.b_depth = Rat64(2 * native.k * native.n, s.b_part * 10);
  s.a_depth = Rat64(2 * native.m * native.k, s.a_part * 10);
  s.c_depth = Rat64(native.m * native.n * 2, s.c_part);
  return s;
}

i64 m20k_cost_80(const Rat64& depth) {
  if (depth < Rat64(1)) throw DomainError("buffer depth must be >= 1");
  return 2 * ceil_div(depth, kM20kDepthUnit);
}

i64 m20k_cost_32(const Rat64& depth) {
  if (depth < Rat64(1)) throw DomainError("buffer depth must be >= 1");
  return ceil_div(depth, kM20kDepthUnit);
}

i64 total_m20k(const TbParams& p, const GemmDims& native, DimPolicy policy) {
  const BufferShape s = buffer_partitioning(p, native, policy);
  return s.a_part * m20k_cost_80(s.a_depth) + s.b_part * m20k_cost_80(s.b_depth) +
         s.c_part * m20k_cost_32(s.c_depth);
}

LatencyBreakdown latency(const TbParams& p, const GemmDims& dims, DimPolicy policy) {
  check_dims(p, dims, policy);
  const ComputeDims cd = compute_dims(p);
  LatencyBreakdown lb;
  lb.t_load = p.l_a * 3;
  lb.t_prop = (p.l_a - 1) * 2;
  lb.t_adder = p.e_k == 1 ? 0 : std::bit_width(static_cast<std::uint64_t>(p.e_k - 1));
  lb.tiles = Rat64(dims.m * dims.k, cd.d_k * cd.d_m);
  lb.t_n = Rat64(dims.n, p.e_n);
  lb.t_total = Rat64(lb.t_load + lb.t_prop + lb.t_adder) + lb.tiles * lb.t_n;
  return lb;
}

double throughput_tops(const TbParams& p, const GemmDims& dims, double freq_hz,
                       DimPolicy policy) {
  if (freq_hz <= 0.0) throw DomainError("frequency must be > 0");
  const LatencyBreakdown lb = latency(p, dims, policy);
  const double seconds = lb.t_total.to_double() / freq_hz;
  return static_cast<double>(dims.mac_ops()) / seconds / 1e12;
}

double bandwidth_gib(const GemmDims& dims, const Rat64& t_total, double freq_hz) {
  if (freq_hz <= 0.0) throw DomainError("frequency must be > 0");
  if (!(t_total > Rat64(0))) throw DomainError("t_total must be > 0");
  const double bytes =
      static_cast<double>(dims.m * dims.k + dims.k * dims.n + dims.m * dims.n);
  const double seconds = t_total.to_double() / freq_hz;
  return bytes / seconds / 1073741824.0;
}

double ram_efficiency(const TbParams& p, const GemmDims& native, DimPolicy policy) {
  const i64 blocks = total_m20k(p, native, policy);
  // part·depth·width collapses exactly: 16·m·k + 16·k·n + 64·m·n bits.
  const i64 logical_bits =
      16 * native.m * native.k + 16 * native.k * native.n + 64 * native.m * native.n;
  return static_cast<double>(logical_bits) / static_cast<double>(blocks * kM20kBits);
}

i64 M20kBudget::resolve(const StratixDevice& dev) const {
  if (absolute) {
    if (*absolute < 1) throw DomainError("absolute M20K budget must be >= 1");
    return *absolute;
  }
  if (fraction <= 0.0 || fraction > 1.0)
    throw DomainError("M20K budget fraction must be in (0, 1]");
  return static_cast<i64>(fraction * static_cast<double>(dev.m20k_total));
}

namespace {

// Cost of one dimension's own buffer with the other dimensions at their legal
// minimum; monotone in the dimension, used only to bound the search.
i64 min_cost_at(const TbParams& p, const GemmDims& dims) {
  return total_m20k(p, dims, DimPolicy::strict);
}

}  // namespace

GemmDims solve_native(const TbParams& p, const StratixDevice& dev, const M20kBudget& budget) {
  validate(p);
  tb_usage(p, dev);  // throws when the layout itself does not fit
  const ComputeDims cd = compute_dims(p);
  const i64 limit = budget.resolve(dev);
  const i64 n_min = round_up_multiple(n_minimum(p), cd.d_n);
  const GemmDims minimal{cd.d_m, cd.d_k, n_min};

  if (min_cost_at(p, minimal) > limit)
    throw InfeasibleError("minimum native size " + minimal.str() + " for " + p.label() +
                          " already needs " + std::to_string(min_cost_at(p, minimal)) +
                          " M20Ks, budget is " + std::to_string(limit));

  // Each dimension is bounded by the smallest multiple whose single-buffer
  // cost alone (others at minimum) exceeds the budget.
  auto bound_dim = [&](auto cost_of) {
    i64 steps = 1;
    while (cost_of(steps) <= limit) ++steps;
    return steps;
  };
  const i64 m_steps = bound_dim([&](i64 i) {
    const GemmDims d{i * cd.d_m, minimal.k, minimal.n};
    const BufferShape s = buffer_partitioning(p, d);
    return std::max(s.a_part * m20k_cost_80(s.a_depth), s.c_part * m20k_cost_32(s.c_depth));
  });
  const i64 k_steps = bound_dim([&](i64 j) {
    const GemmDims d{minimal.m, j * cd.d_k, minimal.n};
    const BufferShape s = buffer_partitioning(p, d);
    return std::max(s.a_part * m20k_cost_80(s.a_depth), s.b_part * m20k_cost_80(s.b_depth));
  });
  const i64 n_steps = bound_dim([&](i64 l) {
    const GemmDims d{minimal.m, minimal.k, n_min + (l - 1) * cd.d_n};
    const BufferShape s = buffer_partitioning(p, d);
    return std::max(s.b_part * m20k_cost_80(s.b_depth), s.c_part * m20k_cost_32(s.c_depth));
  });
  const i64 n_max_bound = n_min + (n_steps - 1) * cd.d_n;

  bool found = false;
  GemmDims best{};
  i64 best_volume = 0;
  for (i64 i = 1; i <= m_steps; ++i) {
    const i64 m = i * cd.d_m;
    bool any_k = false;
    for (i64 j = 1; j <= k_steps; ++j) {
      const i64 k = j * cd.d_k;
      if (min_cost_at(p, {m, k, n_min}) > limit) break;  // cost monotone in k
      any_k = true;
      // Cost is monotone in n: binary-search the largest feasible multiple.
      i64 lo = n_min, hi = n_max_bound;
      while (lo < hi) {
        const i64 mid = lo + (hi - lo) / 2 / cd.d_n * cd.d_n + cd.d_n;  // round toward hi
        if (total_m20k(p, {m, k, mid}) <= limit)
          lo = mid;
        else
          hi = mid - cd.d_n;
      }
      const GemmDims cand{m, k, lo};
      const i64 volume = cand.volume();
      if (!found || volume > best_volume ||
          (volume == best_volume &&
           (cand.n > best.n || (cand.n == best.n && (cand.k > best.k ||
                                (cand.k == best.k && cand.m > best.m)))))) {
        found = true;
        best = cand;
        best_volume = volume;
      }
    }
    if (!any_k) break;  // cost monotone in m as well
  }

  if (!found)
    throw InfeasibleError("no feasible native size for " + p.label() + " within " +
                          std::to_string(limit) + " M20Ks");
  return best;
}

StratixDesign make_design(const TbParams& p, const GemmDims& native, double freq_hz,
                          std::optional<double> power_w, DimPolicy policy) {
  if (freq_hz <= 0.0) throw DomainError("frequency must be > 0");
  StratixDesign d;
  d.params = p;
  d.native = native;
  d.shape = buffer_partitioning(p, native, policy);
  d.m20ks_used = total_m20k(p, native, policy);
  d.tbs_used = tb_count(p);
  d.wasted_tbs = p.e_k * p.e_n * p.e_m;
  d.freq_hz = freq_hz;
  d.power_w = power_w;
  d.lat = latency(p, native, policy);
  d.tops = throughput_tops(p, native, freq_hz, policy);
  d.bw_gib = bandwidth_gib(native, d.lat.t_total, freq_hz);
  d.ram_eff = ram_efficiency(p, native, policy);
  if (power_w) {
    if (*power_w <= 0.0) throw DomainError("power must be > 0");
    d.energy_eff = d.tops / *power_w;
  }
  return d;
}

std::vector<GridEntry> parse_grid(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("grid file is not valid JSON: ") + e.what());
  }
  if (!j.contains("entries") || !j["entries"].is_array())
    throw ValidationError("entries", "missing or not an array");
  std::vector<GridEntry> out;
  std::size_t idx = 0;
  for (const auto& e : j["entries"]) {
    const std::string path = "entries[" + std::to_string(idx++) + "]";
    GridEntry g;
    try {
      g.params.l_a = e.at("la").get<i64>();
      g.params.e_k = e.at("ek").get<i64>();
      g.params.e_n = e.at("en").get<i64>();
      g.params.e_m = e.at("em").get<i64>();
      g.freq_hz = e.at("freq_hz").get<double>();
      if (e.contains("power_w")) g.power_w = e.at("power_w").get<double>();
      if (e.contains("native")) g.native = parse_gemm_dims(e.at("native").get<std::string>());
    } catch (const json::exception& ex) {
      throw ValidationError(path, std::string("bad grid entry: ") + ex.what());
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<GridEntry> load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open grid file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid(buf.str());
}

const std::string& default_grid_json() {
  static const std::string text = R"({
  "entries": [
    { "la": 18, "ek": 16, "en": 4,  "em": 3, "freq_hz": 3.49e8, "power_w": 51.1, "native": "639x2720x1008" },
    { "la": 18, "ek": 8,  "en": 8,  "em": 3, "freq_hz": 3.45e8, "power_w": 50.2, "native": "675x2720x928" },
    { "la": 9,  "ek": 16, "en": 5,  "em": 5, "freq_hz": 3.50e8, "power_w": 52.5, "native": "900x1280x1000" },
    { "la": 12, "ek": 8,  "en": 6,  "em": 6, "freq_hz": 3.38e8, "power_w": 48.6, "native": "1152x1760x756" },
    { "la": 18, "ek": 16, "en": 3,  "em": 4, "freq_hz": 3.27e8, "power_w": 47.3, "native": "850x2720x750" },
    { "la": 9,  "ek": 16, "en": 6,  "em": 4, "freq_hz": 3.42e8, "power_w": 50.7, "native": "912x2560x756" },
    { "la": 18, "ek": 8,  "en": 3,  "em": 8, "freq_hz": 3.21e8, "power_w": 46.5, "native": "1600x1360x550" },
    { "la": 9,  "ek": 8,  "en": 10, "em": 5, "freq_hz": 3.20e8, "power_w": 48.7, "native": "900x1280x1000" },
    { "la": 18, "ek": 8,  "en": 5,  "em": 5, "freq_hz": 3.01e8, "power_w": 45.4, "native": "1020x2720x630" },
    { "la": 18, "ek": 4,  "en": 8,  "em": 6, "freq_hz": 3.12e8, "power_w": 46.2, "native": "1152x1360x832" }
  ]
}
)";
  return text;
}

const std::vector<GridEntry>& default_grid() {
  static const std::vector<GridEntry> grid = parse_grid(default_grid_json());
  return grid;
}

DseResult dse(const std::vector<GridEntry>& grid, const StratixDevice& dev,
              const M20kBudget& budget) {
  DseResult result;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const GridEntry& e = grid[i];
    try {
      validate(e.params);
      tb_usage(e.params, dev);
      GemmDims native;
      DimPolicy policy;
      if (e.native) {
        native = *e.native;
        policy = DimPolicy::relaxed;
      } else {
        native = solve_native(e.params, dev, budget);
        policy = DimPolicy::strict;
      }
      StratixDesign d = make_design(e.params, native, e.freq_hz, e.power_w, policy);
      if (d.m20ks_used > dev.m20k_total)
        throw InfeasibleError("native size " + native.str() + " needs " +
                              std::to_string(d.m20ks_used) + " M20Ks, device " + dev.name +
                              " has " + std::to_string(dev.m20k_total));
      result.ranked.push_back(std::move(d));
    } catch (const Error& err) {
      result.errors.emplace_back(i, err.what());
    }
  }
  std::sort(result.ranked.begin(), result.ranked.end(),
            [](const StratixDesign& a, const StratixDesign& b) {
              if (a.tops != b.tops) return a.tops > b.tops;
              return a.params < b.params;
            });
  return result;
}

double scalability_tops(const TbParams& p, double native_peak_tops, i64 s) {
  if (s < 1) throw DomainError("matrix size must be >= 1");
  validate(p);
  const ComputeDims cd = compute_dims(p);
  const i64 n_unit = std::max(cd.d_n, n_minimum(p));
  const double pm = static_cast<double>(round_up_multiple(s, cd.d_m));
  const double pk = static_cast<double>(round_up_multiple(s, cd.d_k));
  const double pn = static_cast<double>(round_up_multiple(s, n_unit));
  const double ss = static_cast<double>(s);
  return native_peak_tops * (ss * ss * ss) / (pm * pk * pn);
}

}  // namespace gemmforge::stratix
