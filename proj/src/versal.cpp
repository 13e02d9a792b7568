#include "gemmforge/versal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gemmforge/rational.hpp"

namespace gemmforge::versal {

using nlohmann::json;

void validate(const AieSolution& sol) {
  const std::string p = "aie_solution(" + sol.name + ")";
  if (sol.x < 1) throw ValidationError(p + ".x", "must be >= 1");
  if (sol.y < 1) throw ValidationError(p + ".y", "must be >= 1");
  if (sol.z < 1) throw ValidationError(p + ".z", "must be >= 1");
  if (sol.m < 1) throw ValidationError(p + ".m", "must be >= 1");
  if (sol.k < 1) throw ValidationError(p + ".k", "must be >= 1");
  if (sol.n < 1) throw ValidationError(p + ".n", "must be >= 1");
  if (sol.x > 1024 || sol.y > 1024 || sol.z > 1024 || sol.m > 65536 || sol.k > 65536 ||
      sol.n > 65536)
    throw ValidationError(p, "tiling parameters are outside this tool's scale");
  if ((sol.m * sol.k) % 16 != 0)
    throw ValidationError(p + ".m", "M·K must be divisible by 16 (128-bit A packing)");
  if ((sol.k * sol.n) % 16 != 0)
    throw ValidationError(p + ".k", "K·N must be divisible by 16 (128-bit B packing)");
  if ((sol.m * sol.n) % 4 != 0)
    throw ValidationError(p + ".m", "M·N must be divisible by 4 (128-bit C packing)");
  if (sol.kernel_efficiency <= 0.0 || sol.kernel_efficiency > 1.0)
    throw ValidationError(p + ".kernel_efficiency", "must be in (0, 1]");
}

void check_against_device(const AieSolution& sol, const VersalDevice& dev) {
  const AieUsage usage = aie_usage(sol);
  if (usage.total_cores > dev.aie_cores)
    throw ValidationError("aie_solution(" + sol.name + ")",
                          "needs " + std::to_string(usage.total_cores) + " AIE cores, device " +
                              dev.name + " has " + std::to_string(dev.aie_cores));
}

std::vector<AieSolution> parse_aie_solutions(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("AIE solution catalog is not valid JSON: ") + e.what());
  }
  if (!j.contains("solutions") || !j["solutions"].is_array())
    throw ValidationError("solutions", "missing or not an array");
  std::vector<AieSolution> out;
  std::size_t idx = 0;
  for (const auto& e : j["solutions"]) {
    const std::string path = "solutions[" + std::to_string(idx++) + "]";
    AieSolution s;
    try {
      s.name = e.at("name").get<std::string>();
      s.x = e.at("x").get<i64>();
      s.y = e.at("y").get<i64>();
      s.z = e.at("z").get<i64>();
      s.m = e.at("m").get<i64>();
      s.k = e.at("k").get<i64>();
      s.n = e.at("n").get<i64>();
      s.placement = e.at("placement").get<std::string>();
      s.kernel_efficiency = e.at("kernel_efficiency").get<double>();
      for (const auto& c : e.at("calibration"))
        s.calibration.push_back(
            {c.at("pl_freq_hz").get<double>(), c.at("tops").get<double>()});
    } catch (const json::exception& ex) {
      throw ValidationError(path, std::string("bad solution entry: ") + ex.what());
    }
    validate(s);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<AieSolution> load_aie_solutions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open AIE solution catalog: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_aie_solutions(buf.str());
}

const std::string& default_aie_solutions_json() {
  static const std::string text = R"({
  "solutions": [
    {
      "name": "P1",
      "x": 13, "y": 4, "z": 6,
      "m": 32, "k": 128, "n": 32,
      "placement": "P1",
      "kernel_efficiency": 0.95,
      "calibration": [
        { "pl_freq_hz": 3.00e8, "tops": 77.01 },
        { "pl_freq_hz": 2.90e8, "tops": 76.93 },
        { "pl_freq_hz": 2.78e8, "tops": 76.72 }
      ]
    },
    {
      "name": "P2",
      "x": 10, "y": 3, "z": 10,
      "m": 32, "k": 128, "n": 32,
      "placement": "P2",
      "kernel_efficiency": 0.95,
      "calibration": [
        { "pl_freq_hz": 3.00e8, "tops": 76.08 },
        { "pl_freq_hz": 2.75e8, "tops": 75.40 }
      ]
    }
  ]
}
)";
  return text;
}

const std::vector<AieSolution>& default_aie_solutions() {
  static const std::vector<AieSolution> sols = parse_aie_solutions(default_aie_solutions_json());
  return sols;
}

const AieSolution& find_aie_solution(const std::vector<AieSolution>& sols,
                                     const std::string& name) {
  for (const auto& s : sols)
    if (s.name == name) return s;
  throw DomainError("no AIE solution named '" + name + "'");
}

double calibrated_tops(const AieSolution& sol, double pl_freq_hz) {
  for (const auto& c : sol.calibration)
    if (std::abs(c.pl_freq_hz - pl_freq_hz) <= 1.0) return c.tops;
  std::string points;
  for (const auto& c : sol.calibration) {
    if (!points.empty()) points += ", ";
    points += std::to_string(static_cast<i64>(c.pl_freq_hz / 1e6)) + " MHz";
  }
  throw DomainError("no calibration point for " + sol.name + " at " +
                    std::to_string(pl_freq_hz / 1e6) + " MHz (have: " + points + ")");
}

std::string BufferMapping::str() const {
  auto letter = [](Ram r) { return r == Ram::bram ? 'B' : 'U'; };
  std::string s = "{";
  s += letter(a);
  s += ',';
  s += letter(b);
  s += ',';
  s += letter(c);
  s += '}';
  return s;
}

BufferMapping parse_mapping(const std::string& text) {
  std::string letters;
  for (char ch : text) {
    if (ch == 'B' || ch == 'b')
      letters += 'B';
    else if (ch == 'U' || ch == 'u')
      letters += 'U';
    else if (ch == '{' || ch == '}' || ch == ',' || ch == ' ')
      continue;
    else
      throw ParseError("bad mapping '" + text + "': expected three of B/U");
  }
  if (letters.size() != 3)
    throw ParseError("bad mapping '" + text + "': expected three of B/U");
  auto ram = [](char ch) { return ch == 'B' ? Ram::bram : Ram::uram; };
  return {ram(letters[0]), ram(letters[1]), ram(letters[2])};
}

std::vector<BufferMapping> all_mappings() {
  std::vector<BufferMapping> out;
  for (int bits = 0; bits < 8; ++bits)
    out.push_back({static_cast<Ram>((bits >> 2) & 1), static_cast<Ram>((bits >> 1) & 1),
                   static_cast<Ram>(bits & 1)});
  return out;
}

i64 bram_cost_half(i64 depth) {
  if (depth < 1) throw DomainError("buffer depth must be >= 1");
  if (depth > kMaxBufferDepth)
    throw DomainError("buffer depth " + std::to_string(depth) + " exceeds the 4K depth cap");
  if (depth <= 512) return 4;
  if (depth <= 1024) return 8;
  if (depth <= 2048) return 15;
  return 30;
}

double bram_cost(i64 depth) { return static_cast<double>(bram_cost_half(depth)) / 2.0; }

i64 uram_cost(i64 depth) {
  if (depth < 1) throw DomainError("buffer depth must be >= 1");
  if (depth > kMaxBufferDepth)
    throw DomainError("buffer depth " + std::to_string(depth) + " exceeds the 4K depth cap");
  return 2;
}

BufferGeometry buffer_geometry(const AieSolution& sol, i64 u, i64 v, i64 w) {
  if (u < 1 || v < 1 || w < 1) throw DomainError("U, V, W must be >= 1");
  BufferGeometry g;
  g.a_part = 2 * sol.x * sol.y;
  g.b_part = 2 * sol.y * sol.z;
  g.c_part = 2 * sol.x * sol.z;
  const i64 a_num = u * v * sol.m * sol.k;
  const i64 b_num = v * w * sol.k * sol.n;
  const i64 c_num = u * w * sol.m * sol.n;
  if (a_num % 16 != 0)
    throw ValidationError("a_depth", "U·V·M·K = " + std::to_string(a_num) +
                                         " is not divisible by 16");
  if (b_num % 16 != 0)
    throw ValidationError("b_depth", "V·W·K·N = " + std::to_string(b_num) +
                                         " is not divisible by 16");
  if (c_num % 4 != 0)
    throw ValidationError("c_depth",
                          "U·W·M·N = " + std::to_string(c_num) + " is not divisible by 4");
  g.a_depth = a_num / 16;
  g.b_depth = b_num / 16;
  g.c_depth = c_num / 4;
  return g;
}

RamUsage mapping_resources(const BufferGeometry& g, const BufferMapping& mapping) {
  i64 bram_half = 0;
  i64 urams = 0;
  auto add = [&](i64 part, i64 depth, Ram r) {
    if (r == Ram::bram)
      bram_half += part * bram_cost_half(depth);
    else
      urams += part * uram_cost(depth);
  };
  add(g.a_part, g.a_depth, mapping.a);
  add(g.b_part, g.b_depth, mapping.b);
  add(g.c_part, g.c_depth, mapping.c);
  // Partition factors are even, so half-unit sums are integral in practice;
  // the final total still rounds up rather than any per-buffer term.
  return {(bram_half + 1) / 2, urams};
}

VersalDesign make_design(const AieSolution& sol, i64 u, i64 v, i64 w,
                         const BufferMapping& mapping) {
  validate(sol);
  VersalDesign d;
  d.aie = sol;
  d.u = u;
  d.v = v;
  d.w = w;
  d.geometry = buffer_geometry(sol, u, v, w);
  const i64 max_depth =
      std::max({d.geometry.a_depth, d.geometry.b_depth, d.geometry.c_depth});
  if (max_depth > kMaxBufferDepth)
    throw DomainError("buffer depth " + std::to_string(max_depth) +
                      " exceeds the 4K depth cap for " + d.label());
  d.mapping = mapping;
  const RamUsage usage = mapping_resources(d.geometry, mapping);
  d.brams_used = usage.brams;
  d.urams_used = usage.urams;
  d.compute = sol.compute_dims();
  d.native = {u * d.compute.m, v * d.compute.k, w * d.compute.n};
  return d;
}

bool fits_device(const VersalDesign& d, const VersalDevice& dev) {
  return d.brams_used <= dev.bram36_total && d.urams_used <= dev.uram_total;
}

std::vector<VersalDesign> solve_uvw(const AieSolution& sol, const VersalDevice& dev,
                                    int top_k) {
  if (top_k < 1) throw DomainError("top_k must be >= 1");
  validate(sol);
  check_against_device(sol, dev);

  const i64 a_unit = sol.m * sol.k / 16;  // depth per U·V
  const i64 b_unit = sol.k * sol.n / 16;  // depth per V·W
  const i64 c_unit = sol.m * sol.n / 4;   // depth per U·W
  const auto mappings = all_mappings();

  std::vector<VersalDesign> candidates;
  for (i64 u = 1; u * a_unit <= kMaxBufferDepth && u * c_unit <= kMaxBufferDepth; ++u) {
    for (i64 v = 1; u * v * a_unit <= kMaxBufferDepth && v * b_unit <= kMaxBufferDepth; ++v) {
      for (i64 w = 1;
           v * w * b_unit <= kMaxBufferDepth && u * w * c_unit <= kMaxBufferDepth; ++w) {
        for (const auto& mapping : mappings) {
          VersalDesign d = make_design(sol, u, v, w, mapping);
          if (fits_device(d, dev)) candidates.push_back(std::move(d));
        }
      }
    }
  }

  if (candidates.empty()) {
    // Nothing fits even somewhere in the box; report what binds at (1,1,1).
    const BufferGeometry g = buffer_geometry(sol, 1, 1, 1);
    std::string detail;
    for (const auto& mapping : mappings) {
      const RamUsage usage = mapping_resources(g, mapping);
      if (usage.brams > dev.bram36_total) {
        detail = "BRAM demand " + std::to_string(usage.brams) + " > bram36_total " +
                 std::to_string(dev.bram36_total) + " at (1,1,1) with mapping " +
                 mapping.str();
      } else if (usage.urams > dev.uram_total) {
        detail = "URAM demand " + std::to_string(usage.urams) + " > uram_total " +
                 std::to_string(dev.uram_total) + " at (1,1,1) with mapping " +
                 mapping.str();
      }
      if (!detail.empty()) break;
    }
    throw InfeasibleError("no feasible (U,V,W,mapping) for " + sol.name + " on " + dev.name +
                          (detail.empty() ? "" : ": " + detail));
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const VersalDesign& a, const VersalDesign& b) {
              if (a.product() != b.product()) return a.product() > b.product();
              if (a.v != b.v) return a.v > b.v;
              if (a.u != b.u) return a.u > b.u;
              if (a.w != b.w) return a.w > b.w;
              return a.mapping.rank() < b.mapping.rank();
            });
  if (static_cast<int>(candidates.size()) > top_k) candidates.resize(top_k);
  return candidates;
}

double ram_efficiency(const VersalDesign& d) {
  const BufferGeometry& g = d.geometry;
  const i64 logical_bits = kPlioBits * (g.a_part * g.a_depth + g.b_part * g.b_depth +
                                        g.c_part * g.c_depth);
  const i64 physical_bits = d.brams_used * kBram36Bits + d.urams_used * kUram288Bits;
  return static_cast<double>(logical_bits) / static_cast<double>(physical_bits);
}

double bandwidth_gib(const GemmDims& native, double tops) {
  if (tops <= 0.0) throw DomainError("throughput must be > 0");
  validate(native, "native");
  const double bytes = static_cast<double>(native.m * native.k + native.k * native.n +
                                           native.m * native.n);
  const double seconds = static_cast<double>(native.mac_ops()) / (tops * 1e12);
  return bytes / seconds / 1073741824.0;
}

AieUsage aie_usage(const AieSolution& sol) {
  AieUsage usage;
  usage.matmul_cores = sol.x * sol.y * sol.z;
  usage.add_cores = sol.y > 1 ? sol.x * sol.z : 0;
  usage.total_cores = usage.matmul_cores + usage.add_cores;
  usage.plio_in_a = sol.x * sol.y;
  usage.plio_in_b = sol.y * sol.z;
  usage.plio_out = sol.x * sol.z;
  return usage;
}

double scalability_tops(double native_peak_tops, const GemmDims& compute, i64 s) {
  if (s < 1) throw DomainError("matrix size must be >= 1");
  validate(compute, "compute");
  const double pm = static_cast<double>(round_up_multiple(s, compute.m));
  const double pk = static_cast<double>(round_up_multiple(s, compute.k));
  const double pn = static_cast<double>(round_up_multiple(s, compute.n));
  const double ss = static_cast<double>(s);
  return native_peak_tops * (ss * ss * ss) / (pm * pk * pn);
}

std::string emit_hls_directives(const VersalDesign& d) {
  auto impl = [](Ram r) { return r == Ram::bram ? "bram" : "uram"; };
  std::ostringstream out;
  out << "#pragma HLS array_partition variable=a_buf type=cyclic factor=" << d.geometry.a_part
      << " dim=1\n";
  out << "#pragma HLS bind_storage variable=a_buf type=ram_1p impl=" << impl(d.mapping.a)
      << "\n";
  out << "#pragma HLS array_partition variable=b_buf type=cyclic factor=" << d.geometry.b_part
      << " dim=1\n";
  out << "#pragma HLS bind_storage variable=b_buf type=ram_1p impl=" << impl(d.mapping.b)
      << "\n";
  out << "#pragma HLS array_partition variable=c_buf type=cyclic factor=" << d.geometry.c_part
      << " dim=1\n";
  out << "#pragma HLS bind_storage variable=c_buf type=ram_s2p impl=" << impl(d.mapping.c)
      << "\n";
  return out.str();
}

}  // namespace gemmforge::versal
