#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "gemmforge/versal.hpp"

using namespace gemmforge;
using namespace gemmforge::versal;

namespace {

const AieSolution& p1() { return find_aie_solution(default_aie_solutions(), "P1"); }
const AieSolution& p2() { return find_aie_solution(default_aie_solutions(), "P2"); }
const VersalDevice& vc1902() { return default_catalog().versal("VC1902"); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Random AIE solutions satisfying the packing invariants, for property tests.
AieSolution random_solution(std::mt19937& rng) {
  std::uniform_int_distribution<i64> small(1, 6);
  std::uniform_int_distribution<i64> dim(1, 4);
  AieSolution s;
  s.name = "rand";
  s.placement = "PR";
  s.x = small(rng);
  s.y = small(rng);
  s.z = small(rng);
  s.m = 4 * dim(rng);
  s.k = 16 * dim(rng);
  s.n = 4 * dim(rng);
  s.kernel_efficiency = 0.95;
  return s;
}

}  // namespace

TEST_CASE("bram cost bands") {
  CHECK(bram_cost(1) == 2.0);
  CHECK(bram_cost(512) == 2.0);
  CHECK(bram_cost(513) == 4.0);
  CHECK(bram_cost(1024) == 4.0);
  CHECK(bram_cost(1025) == 7.5);
  CHECK(bram_cost(2048) == 7.5);
  CHECK(bram_cost(2049) == 15.0);
  CHECK(bram_cost(4096) == 15.0);
  CHECK_THROWS_AS(bram_cost(4097), DomainError);
  CHECK_THROWS_AS(bram_cost(0), DomainError);

  // Nondecreasing in depth.
  for (i64 d = 2; d <= 4096; ++d) CHECK(bram_cost_half(d) >= bram_cost_half(d - 1));
}

TEST_CASE("uram cost") {
  CHECK(uram_cost(4096) == 2);
  CHECK(uram_cost(1) == 2);
  CHECK_THROWS_AS(uram_cost(5000), DomainError);
}

TEST_CASE("buffer geometry") {
  SUBCASE("P1 2x2x8") {
    const BufferGeometry g = buffer_geometry(p1(), 2, 2, 8);
    CHECK(g.a_part == 104);
    CHECK(g.a_depth == 1024);
    CHECK(g.b_part == 48);
    CHECK(g.b_depth == 4096);
    CHECK(g.c_part == 156);
    CHECK(g.c_depth == 4096);
  }
  SUBCASE("P1 unit tiling") {
    const BufferGeometry g = buffer_geometry(p1(), 1, 1, 1);
    CHECK(g.a_depth == 256);
    CHECK(g.b_depth == 256);
    CHECK(g.c_depth == 256);
  }
  SUBCASE("P2 2x8x2") {
    const BufferGeometry g = buffer_geometry(p2(), 2, 8, 2);
    CHECK(g.a_part == 60);
    CHECK(g.a_depth == 4096);
    CHECK(g.b_part == 60);
    CHECK(g.b_depth == 4096);
    CHECK(g.c_part == 200);
    CHECK(g.c_depth == 1024);
  }
  SUBCASE("parts are even") {
    const BufferGeometry g = buffer_geometry(p2(), 3, 1, 2);
    CHECK(g.a_part % 2 == 0);
    CHECK(g.b_part % 2 == 0);
    CHECK(g.c_part % 2 == 0);
  }
  SUBCASE("non-integer depth is rejected") {
    AieSolution odd = p1();
    odd.m = 3;
    odd.k = 5;  // m·k = 15, not divisible by 16
    odd.n = 4;
    CHECK_THROWS_AS(buffer_geometry(odd, 1, 1, 1), ValidationError);
  }
}

TEST_CASE("mapping resources reproduce the published model estimation") {
  const BufferMapping buu = parse_mapping("BUU");
  const BufferMapping bbu = parse_mapping("BBU");
  const BufferMapping uub = parse_mapping("UUB");

  const RamUsage r1 = mapping_resources(buffer_geometry(p1(), 4, 2, 4), buu);
  CHECK(r1.brams == 780);
  CHECK(r1.urams == 408);

  const RamUsage r2 = mapping_resources(buffer_geometry(p2(), 4, 2, 4), bbu);
  CHECK(r2.brams == 900);
  CHECK(r2.urams == 400);

  const RamUsage r3 = mapping_resources(buffer_geometry(p1(), 2, 2, 8), buu);
  CHECK(r3.brams == 416);
  CHECK(r3.urams == 408);

  const RamUsage r4 = mapping_resources(buffer_geometry(p2(), 2, 8, 2), uub);
  CHECK(r4.brams == 800);
  CHECK(r4.urams == 240);
}

TEST_CASE("mapping resources are monotone in parts and depth bands") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<i64> part(1, 100);
  std::uniform_int_distribution<i64> depth(1, 4096);
  for (int i = 0; i < 200; ++i) {
    BufferGeometry g{2 * part(rng), 2 * part(rng), 2 * part(rng),
                     depth(rng),    depth(rng),    depth(rng)};
    BufferGeometry bigger = g;
    switch (i % 6) {
      case 0: bigger.a_part += 2; break;
      case 1: bigger.b_part += 2; break;
      case 2: bigger.c_part += 2; break;
      case 3: bigger.a_depth = std::min<i64>(4096, bigger.a_depth + 512); break;
      case 4: bigger.b_depth = std::min<i64>(4096, bigger.b_depth + 512); break;
      case 5: bigger.c_depth = std::min<i64>(4096, bigger.c_depth + 512); break;
    }
    for (const BufferMapping& m : all_mappings()) {
      const RamUsage u1 = mapping_resources(g, m);
      const RamUsage u2 = mapping_resources(bigger, m);
      CHECK(u2.brams >= u1.brams);
      CHECK(u2.urams >= u1.urams);
    }
  }
}

TEST_CASE("aie usage") {
  const AieUsage u1 = aie_usage(p1());
  CHECK(u1.matmul_cores == 312);
  CHECK(u1.add_cores == 78);
  CHECK(u1.total_cores == 390);
  CHECK(u1.plio_in_a == 52);
  CHECK(u1.plio_in_b == 24);
  CHECK(u1.plio_out == 78);

  const AieUsage u2 = aie_usage(p2());
  CHECK(u2.matmul_cores == 300);
  CHECK(u2.add_cores == 100);
  CHECK(u2.total_cores == 400);
  CHECK(u2.plio_in_a == 30);
  CHECK(u2.plio_in_b == 30);
  CHECK(u2.plio_out == 100);

  AieSolution unit = p1();
  unit.x = unit.y = unit.z = 1;
  const AieUsage u3 = aie_usage(unit);
  CHECK(u3.matmul_cores == 1);
  CHECK(u3.add_cores == 0);  // Y = 1 needs no adder tree
  CHECK(u3.total_cores == 1);
  CHECK(u3.plio_in_a == 1);
  CHECK(u3.plio_in_b == 1);
  CHECK(u3.plio_out == 1);
}

TEST_CASE("ram efficiency") {
  const VersalDesign d1 = make_design(p1(), 2, 2, 8, parse_mapping("BUU"));
  CHECK(ram_efficiency(d1) == doctest::Approx(0.889).epsilon(0.001));

  const VersalDesign d2 = make_design(p1(), 3, 2, 5, parse_mapping("BUU"));
  CHECK(d2.brams_used == 780);
  CHECK(d2.urams_used == 408);
  CHECK(ram_efficiency(d2) == doctest::Approx(0.757).epsilon(0.001));

  // Full-depth 4-block and 2-URAM bands give exactly 128/144.
  CHECK(ram_efficiency(d1) == doctest::Approx(128.0 / 144.0).epsilon(1e-9));

  // Bounded by 1 for arbitrary feasible designs.
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    const AieSolution s = random_solution(rng);
    const i64 a_unit = s.m * s.k / 16, b_unit = s.k * s.n / 16, c_unit = s.m * s.n / 4;
    std::uniform_int_distribution<i64> pick(1, 4);
    const i64 u = pick(rng), v = pick(rng), w = pick(rng);
    if (u * v * a_unit > kMaxBufferDepth || v * w * b_unit > kMaxBufferDepth ||
        u * w * c_unit > kMaxBufferDepth)
      continue;
    const auto& mappings = all_mappings();
    const VersalDesign d = make_design(s, u, v, w, mappings[i % mappings.size()]);
    const double eff = ram_efficiency(d);
    CHECK(eff > 0.0);
    CHECK(eff <= 1.0);
  }
}

TEST_CASE("bandwidth requirement") {
  CHECK(bandwidth_gib({832, 1024, 1536}, 76.93) == doctest::Approx(101.4).epsilon(0.001));
  CHECK(bandwidth_gib({1280, 768, 1280}, 75.40) == doctest::Approx(100.6).epsilon(0.001));

  // Linearity in throughput.
  const double one = bandwidth_gib({1, 1, 1}, 10.0);
  CHECK(bandwidth_gib({1, 1, 1}, 20.0) == doctest::Approx(2.0 * one));

  // Algebraic round-trip: bw · 2^30 · time == bytes.
  const GemmDims native{832, 1024, 1536};
  const double t = 76.93;
  const double bw = bandwidth_gib(native, t);
  const double seconds = static_cast<double>(native.mac_ops()) / (t * 1e12);
  const double bytes = bw * 1073741824.0 * seconds;
  CHECK(bytes == doctest::Approx(static_cast<double>(
                     native.m * native.k + native.k * native.n + native.m * native.n))
                     .epsilon(1e-12));

  CHECK_THROWS_AS(bandwidth_gib({1, 1, 1}, 0.0), DomainError);
}

TEST_CASE("swap symmetry: X<->Z, M<->N, U<->W with A/B mapping exchange") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<i64> pick(1, 4);
  int tested = 0;
  while (tested < 100) {
    const AieSolution s = random_solution(rng);
    const i64 u = pick(rng), v = pick(rng), w = pick(rng);
    const i64 a_unit = s.m * s.k / 16, b_unit = s.k * s.n / 16, c_unit = s.m * s.n / 4;
    if (u * v * a_unit > kMaxBufferDepth || v * w * b_unit > kMaxBufferDepth ||
        u * w * c_unit > kMaxBufferDepth)
      continue;
    AieSolution swapped = s;
    std::swap(swapped.x, swapped.z);
    std::swap(swapped.m, swapped.n);

    for (const BufferMapping& m : all_mappings()) {
      const BufferMapping exchanged{m.b, m.a, m.c};
      const VersalDesign d1 = make_design(s, u, v, w, m);
      const VersalDesign d2 = make_design(swapped, w, v, u, exchanged);
      CHECK(d1.brams_used == d2.brams_used);
      CHECK(d1.urams_used == d2.urams_used);
      CHECK(ram_efficiency(d1) == doctest::Approx(ram_efficiency(d2)).epsilon(1e-12));
    }
    ++tested;
  }
}

TEST_CASE("solve_uvw on the bundled device") {
  const auto designs = solve_uvw(p1(), vc1902(), 64);
  REQUIRE(!designs.empty());

  // Optimal data reuse product is 32.
  CHECK(designs.front().product() == 32);

  // (2,2,8) under {A:BRAM, B:URAM, C:URAM} is among the optima.
  const bool found = std::any_of(designs.begin(), designs.end(), [](const VersalDesign& d) {
    return d.product() == 32 && d.u == 2 && d.v == 2 && d.w == 8 &&
           d.mapping == parse_mapping("BUU") && d.brams_used == 416 && d.urams_used == 408;
  });
  CHECK(found);

  // Deterministic ranked output.
  const auto again = solve_uvw(p1(), vc1902(), 64);
  REQUIRE(designs.size() == again.size());
  for (std::size_t i = 0; i < designs.size(); ++i) {
    CHECK(designs[i].u == again[i].u);
    CHECK(designs[i].v == again[i].v);
    CHECK(designs[i].w == again[i].w);
    CHECK(designs[i].mapping == again[i].mapping);
  }

  // Declared tie-break: first design is (2,8,2) mapped {U,U,B}.
  CHECK(designs[0].u == 2);
  CHECK(designs[0].v == 8);
  CHECK(designs[0].w == 2);
  CHECK(designs[0].mapping == parse_mapping("UUB"));
  CHECK(designs[0].brams_used == 624);
  CHECK(designs[0].urams_used == 304);

  // Every returned design re-validates the depth and resource constraints.
  for (const auto& d : designs) {
    CHECK(d.geometry.a_depth <= kMaxBufferDepth);
    CHECK(d.geometry.b_depth <= kMaxBufferDepth);
    CHECK(d.geometry.c_depth <= kMaxBufferDepth);
    const RamUsage u = mapping_resources(d.geometry, d.mapping);
    CHECK(u.brams == d.brams_used);
    CHECK(u.urams == d.urams_used);
    CHECK(d.brams_used <= vc1902().bram36_total);
    CHECK(d.urams_used <= vc1902().uram_total);
    CHECK(d.native.m == d.u * d.compute.m);
    CHECK(d.native.k == d.v * d.compute.k);
    CHECK(d.native.n == d.w * d.compute.n);
  }

  // P2 keeps (4,2,4) with {B,B,U} at (900, 400) feasible.
  const auto p2_designs = solve_uvw(p2(), vc1902(), 64);
  const bool p2_found =
      std::any_of(p2_designs.begin(), p2_designs.end(), [](const VersalDesign& d) {
        return d.u == 4 && d.v == 2 && d.w == 4 && d.mapping == parse_mapping("BBU") &&
               d.brams_used == 900 && d.urams_used == 400;
      });
  CHECK(p2_found);
}

TEST_CASE("solve_uvw without URAMs falls back to all-BRAM mappings") {
  VersalDevice dev = vc1902();
  dev.uram_total = 1;  // catalog forbids 0; 1 still blocks every URAM mapping
  const auto designs = solve_uvw(p1(), dev, 16);
  REQUIRE(!designs.empty());
  CHECK(designs.front().product() < 32);
  for (const auto& d : designs) {
    CHECK(d.mapping == parse_mapping("BBB"));
    CHECK(d.urams_used == 0);
  }
}

TEST_CASE("solve_uvw infeasible device") {
  VersalDevice dev = vc1902();
  dev.bram36_total = 100;
  dev.uram_total = 100;
  CHECK_THROWS_AS(solve_uvw(p1(), dev, 5), InfeasibleError);
  try {
    solve_uvw(p1(), dev, 5);
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("(1,1,1)") != std::string::npos);
  }
}

TEST_CASE("scalability") {
  const GemmDims compute{416, 512, 192};

  // Aligned size: no padding, native peak exactly.
  const i64 aligned = 39936;  // lcm(416, 512, 192)
  CHECK(scalability_tops(76.93, compute, aligned) == doctest::Approx(76.93));

  // s = 512 pads to 832x512x576.
  const double expected = 76.93 * 512.0 * 512.0 * 512.0 / (832.0 * 512.0 * 576.0);
  CHECK(scalability_tops(76.93, compute, 512) == doctest::Approx(expected));
  CHECK(scalability_tops(76.93, compute, 512) == doctest::Approx(42.08).epsilon(0.001));

  // Fig. 5b trend: s = 2048 retains at least as much as s = 512.
  CHECK(scalability_tops(76.93, compute, 2048) >= scalability_tops(76.93, compute, 512));
}

TEST_CASE("hls directive emission") {
  const VersalDesign d1 = make_design(p1(), 2, 2, 8, parse_mapping("BUU"));
  const std::string text = emit_hls_directives(d1);
  CHECK(text.find("variable=a_buf type=ram_1p impl=bram") != std::string::npos);
  CHECK(text.find("variable=b_buf type=ram_1p impl=uram") != std::string::npos);
  CHECK(text.find("variable=c_buf type=ram_s2p impl=uram") != std::string::npos);
  CHECK(text.find("factor=104") != std::string::npos);

  const VersalDesign d2 = make_design(p2(), 4, 2, 4, parse_mapping("BBU"));
  const std::string text2 = emit_hls_directives(d2);
  CHECK(text2.find("variable=a_buf type=ram_1p impl=bram") != std::string::npos);
  CHECK(text2.find("variable=b_buf type=ram_1p impl=bram") != std::string::npos);
  CHECK(text2.find("variable=c_buf type=ram_s2p impl=uram") != std::string::npos);

  // Golden file for the bundled example design.
  const std::string golden =
      read_file(std::string(GEMMFORGE_SOURCE_DIR) + "/tests/golden/directives_2x2x8_p1.txt");
  CHECK(text == golden);
}

TEST_CASE("calibrated throughput lookup") {
  CHECK(calibrated_tops(p1(), 290e6) == doctest::Approx(76.93));
  CHECK(calibrated_tops(p1(), 300e6) == doctest::Approx(77.01));
  CHECK(calibrated_tops(p2(), 275e6) == doctest::Approx(75.40));
  CHECK_THROWS_AS(calibrated_tops(p1(), 123e6), DomainError);
}

TEST_CASE("bundled aie solution file matches the built-in defaults") {
  const auto from_file =
      load_aie_solutions(std::string(GEMMFORGE_SOURCE_DIR) + "/data/aie_solutions.json");
  const auto& builtin = default_aie_solutions();
  REQUIRE(from_file.size() == builtin.size());
  for (std::size_t i = 0; i < builtin.size(); ++i) {
    CHECK(from_file[i].name == builtin[i].name);
    CHECK(from_file[i].x == builtin[i].x);
    CHECK(from_file[i].y == builtin[i].y);
    CHECK(from_file[i].z == builtin[i].z);
    CHECK(from_file[i].m == builtin[i].m);
    CHECK(from_file[i].k == builtin[i].k);
    CHECK(from_file[i].n == builtin[i].n);
    CHECK(from_file[i].placement == builtin[i].placement);
    CHECK(from_file[i].kernel_efficiency == builtin[i].kernel_efficiency);
    REQUIRE(from_file[i].calibration.size() == builtin[i].calibration.size());
    for (std::size_t c = 0; c < builtin[i].calibration.size(); ++c) {
      CHECK(from_file[i].calibration[c].pl_freq_hz == builtin[i].calibration[c].pl_freq_hz);
      CHECK(from_file[i].calibration[c].tops == builtin[i].calibration[c].tops);
    }
  }
  CHECK_THROWS_AS(load_aie_solutions("/nonexistent/aie.json"), IoError);
}

TEST_CASE("aie solution invariants") {
  AieSolution bad = p1();
  bad.m = 3;
  bad.k = 5;
  CHECK_THROWS_AS(validate(bad), ValidationError);

  AieSolution big = p1();
  big.x = 20;  // 20·4·6 + 20·6 = 600 > 400 cores
  CHECK_THROWS_AS(check_against_device(big, vc1902()), ValidationError);
}
