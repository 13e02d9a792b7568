#include "gemmforge/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "gemmforge/device.hpp"
#include "gemmforge/netlist.hpp"
#include "gemmforge/report.hpp"
#include "gemmforge/stratix.hpp"
#include "gemmforge/tb_sim.hpp"
#include "gemmforge/versal.hpp"

namespace gemmforge::cli {

namespace {

namespace fs = std::filesystem;

// Bad flag values are usage errors (exit 2), not domain errors (exit 1).
struct UsageFailure {
  std::string message;
};

template <typename F>
auto as_usage(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw UsageFailure{e.what()};
  }
}

DeviceCatalog resolve_catalog(const std::string& flag_path) {
  if (!flag_path.empty()) return load_device_catalog(flag_path);
  if (const char* env = std::getenv("GEMMFORGE_CATALOG"); env && *env)
    return load_device_catalog(env);
  return default_catalog();
}

std::vector<versal::AieSolution> resolve_solutions(const std::string& flag_path) {
  if (!flag_path.empty()) return versal::load_aie_solutions(flag_path);
  return versal::default_aie_solutions();
}

const VersalDevice& pick_versal(const DeviceCatalog& catalog, const std::string& name) {
  if (!name.empty()) return catalog.versal(name);
  if (catalog.versal_devices.empty()) throw DomainError("catalog has no Versal devices");
  return catalog.versal_devices.front();
}

const StratixDevice& pick_stratix(const DeviceCatalog& catalog, const std::string& name) {
  if (!name.empty()) return catalog.stratix(name);
  if (catalog.stratix_devices.empty()) throw DomainError("catalog has no Stratix devices");
  return catalog.stratix_devices.front();
}

void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
}

std::vector<i64> parse_sizes(const std::string& text) {
  std::vector<i64> sizes;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t used = 0;
    i64 v = 0;
    try {
      v = std::stoll(text.substr(pos), &used);
    } catch (const std::exception&) {
      throw ParseError("bad size list '" + text + "'");
    }
    if (v < 1) throw ParseError("sizes must be >= 1");
    sizes.push_back(v);
    pos += used;
    if (pos < text.size()) {
      if (text[pos] != ',') throw ParseError("bad size list '" + text + "'");
      ++pos;
    }
  }
  if (sizes.empty()) throw ParseError("empty size list");
  return sizes;
}

struct TbFlags {
  i64 la = 0, ek = 0, en = 0, em = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--la", la, "TB array length (L_A)")->required();
    cmd->add_option("--ek", ek, "arrays per reduction group (E_K)")->required();
    cmd->add_option("--en", en, "reduction groups per N-block (E_N)")->required();
    cmd->add_option("--em", em, "N-blocks (E_M)")->required();
  }
  stratix::TbParams params() const {
    return as_usage([&] {
      stratix::TbParams p{la, ek, en, em};
      stratix::validate(p);
      return p;
    });
  }
};

std::vector<std::string> versal_report_headers(bool plio) {
  std::vector<std::string> h = {"UxVxW (P)",        "Compute GEMM size",
                                "Native buffer size", "BRAMs",
                                "URAMs",            "AIE cores",
                                "PL Fq. (MHz)",     "Thrpt. (TOPs)",
                                "Power (W)",        "En. Eff. (TOPs/W)",
                                "RAM Eff.",         "BW (GiB/s)"};
  if (plio) {
    h.push_back("PLIO in A");
    h.push_back("PLIO in B");
    h.push_back("PLIO out");
  }
  return h;
}

std::vector<std::string> versal_report_row(const versal::VersalDesign& d,
                                           const VersalDevice& dev, double pl_freq_hz,
                                           std::optional<double> power_w, bool plio) {
  const double tops = versal::calibrated_tops(d.aie, pl_freq_hz);
  const versal::AieUsage usage = versal::aie_usage(d.aie);
  std::vector<std::string> row = {
      d.label(),
      d.compute.str(),
      d.native.str(),
      report::count_with_pct(d.brams_used, dev.bram36_total),
      report::count_with_pct(d.urams_used, dev.uram_total),
      report::count_with_pct(usage.total_cores, dev.aie_cores),
      report::mhz(pl_freq_hz),
      report::tops(tops),
      power_w ? report::fixed(*power_w, 1) : "-",
      power_w ? report::tops_per_watt(tops / *power_w) : "-",
      report::pct(versal::ram_efficiency(d)),
      report::gib(versal::bandwidth_gib(d.native, tops)),
  };
  if (plio) {
    row.push_back(std::to_string(usage.plio_in_a));
    row.push_back(std::to_string(usage.plio_in_b));
    row.push_back(std::to_string(usage.plio_out));
  }
  return row;
}

const std::vector<std::string> kStratixHeaders = {
    "TB config.",  "Compute GEMM size", "Native buffer size", "M20Ks",
    "TBs",         "Freq. (MHz)",       "Thrpt. (TOPs)",      "Power (W)",
    "En. Eff. (TOPs/W)", "RAM Eff.",    "BW (GiB/s)"};

std::vector<std::string> stratix_row(const stratix::StratixDesign& d,
                                     const StratixDevice& dev) {
  return {
      d.params.label(),
      stratix::compute_dims(d.params).str(),
      d.native.str(),
      report::count_with_pct(d.m20ks_used, dev.m20k_total),
      report::count_with_pct(d.tbs_used, dev.tb_total),
      report::mhz(d.freq_hz),
      report::tops(d.tops),
      d.power_w ? report::fixed(*d.power_w, 1) : "-",
      d.energy_eff ? report::tops_per_watt(*d.energy_eff) : "-",
      report::pct(d.ram_eff),
      report::gib(d.bw_gib),
  };
}

sim::MatrixI8 read_matrix_i8(const std::string& path, i64 rows, i64 cols) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open matrix file " + path);
  sim::MatrixI8 m(rows, cols);
  f.read(reinterpret_cast<char*>(m.data.data()), static_cast<std::streamsize>(m.data.size()));
  if (f.gcount() != static_cast<std::streamsize>(m.data.size()))
    throw IoError("matrix file " + path + " is smaller than " + std::to_string(rows) + "x" +
                  std::to_string(cols));
  char extra;
  if (f.read(&extra, 1), f.gcount() != 0)
    throw IoError("matrix file " + path + " is larger than " + std::to_string(rows) + "x" +
                  std::to_string(cols));
  return m;
}

sim::MatrixI8 random_matrix_i8(i64 rows, i64 cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(-128, 127);
  sim::MatrixI8 m(rows, cols);
  for (auto& v : m.data) v = static_cast<std::int8_t>(dist(rng));
  return m;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GEMM accelerator design-space exploration toolkit"};
  app.name("gemmforge");
  app.require_subcommand(1);

  std::string catalog_path;
  app.add_option("--catalog", catalog_path,
                 "device catalog JSON (default: $GEMMFORGE_CATALOG or built-in)");

  std::string format = "md";
  app.add_option("--format", format, "report format: csv, json or md")
      ->check(CLI::IsMember({"csv", "json", "md"}));

  std::string out_path;
  app.add_option("--out", out_path, "write the report to a file instead of stdout");

  // ---- catalog ----
  auto* catalog_cmd = app.add_subcommand("catalog", "device catalog operations");
  catalog_cmd->require_subcommand(1);
  auto* catalog_validate = catalog_cmd->add_subcommand("validate", "load and validate");
  catalog_validate->callback([&] {
    const DeviceCatalog catalog = resolve_catalog(catalog_path);
    for (const auto& d : catalog.versal_devices)
      out << "versal " << d.name << ": bram36=" << d.bram36_total
          << " uram=" << d.uram_total << " aie_cores=" << d.aie_cores << "\n";
    for (const auto& d : catalog.stratix_devices)
      out << "stratix " << d.name << ": m20k=" << d.m20k_total << " tb=" << d.tb_total
          << "\n";
    out << "catalog OK\n";
  });

  // ---- versal ----
  auto* versal_cmd = app.add_subcommand("versal", "out-of-fabric vector-engine device model");
  versal_cmd->require_subcommand(1);
  std::string aie_name;
  std::string solutions_path;
  std::string device_name;
  versal_cmd->add_option("--aie", aie_name, "AIE solution name (e.g. P1)");
  versal_cmd->add_option("--solutions", solutions_path, "AIE solution catalog JSON");
  versal_cmd->add_option("--device", device_name, "Versal device name");

  auto* versal_solve = versal_cmd->add_subcommand("solve", "maximize U·V·W data reuse");
  int top_k = 5;
  versal_solve->add_option("--top", top_k, "number of ranked designs to keep");
  versal_solve->callback([&] {
    if (aie_name.empty()) throw UsageFailure{"--aie is required"};
    if (top_k < 1) throw UsageFailure{"--top must be >= 1"};
    const auto solutions = resolve_solutions(solutions_path);
    const auto& sol = versal::find_aie_solution(solutions, aie_name);
    const DeviceCatalog catalog = resolve_catalog(catalog_path);
    const VersalDevice& dev = pick_versal(catalog, device_name);
    const auto designs = versal::solve_uvw(sol, dev, top_k);
    report::Table t;
    t.headers = {"UxVxW (P)", "Native buffer size", "{A,B,C}", "BRAMs", "URAMs",
                 "RAM Eff."};
    for (const auto& d : designs)
      t.rows.push_back({d.label(), d.native.str(), d.mapping.str(),
                        report::count_with_pct(d.brams_used, dev.bram36_total),
                        report::count_with_pct(d.urams_used, dev.uram_total),
                        report::pct(versal::ram_efficiency(d))});
    write_text(report::render(t, format), out_path, out);
  });

  auto* versal_report = versal_cmd->add_subcommand("report", "metrics for one design");
  std::string uvw_text;
  std::string mapping_text;
  double pl_freq = 0.0;
  double power_w = 0.0;
  bool with_plio = false;
  std::string directives_out;
  versal_report->add_option("--uvw", uvw_text, "PL tiling, e.g. 2x2x8")->required();
  versal_report->add_option("--mapping", mapping_text, "buffer mapping, e.g. BUU")
      ->required();
  versal_report->add_option("--pl-freq", pl_freq, "PL frequency in Hz (e.g. 290e6)")
      ->required();
  versal_report->add_option("--power", power_w, "measured power in W");
  versal_report->add_flag("--plio", with_plio, "include PLIO port columns");
  versal_report->add_option("--directives-out", directives_out,
                            "also write HLS directives to this file");
  versal_report->callback([&] {
    if (aie_name.empty()) throw UsageFailure{"--aie is required"};
    const auto uvw = as_usage([&] { return parse_gemm_dims(uvw_text); });
    const auto mapping = as_usage([&] { return versal::parse_mapping(mapping_text); });
    if (pl_freq <= 0) throw UsageFailure{"--pl-freq must be > 0"};
    const auto solutions = resolve_solutions(solutions_path);
    const auto& sol = versal::find_aie_solution(solutions, aie_name);
    const DeviceCatalog catalog = resolve_catalog(catalog_path);
    const VersalDevice& dev = pick_versal(catalog, device_name);
    const auto design = versal::make_design(sol, uvw.m, uvw.k, uvw.n, mapping);
    if (!versal::fits_device(design, dev))
      throw InfeasibleError("design " + design.label() + " does not fit " + dev.name +
                            ": needs " + std::to_string(design.brams_used) + " BRAMs / " +
                            std::to_string(design.urams_used) + " URAMs");
    report::Table t;
    t.headers = versal_report_headers(with_plio);
    t.rows.push_back(versal_report_row(
        design, dev, pl_freq,
        power_w > 0 ? std::optional<double>(power_w) : std::nullopt, with_plio));
    write_text(report::render(t, format), out_path, out);
    if (!directives_out.empty())
      write_text(versal::emit_hls_directives(design), directives_out, out);
  });

  auto* versal_sweep =
      versal_cmd->add_subcommand("sweep", "throughput vs. square matrix size");
  std::string sizes_text = "512,1024,2048,4096,8192,16384,32768";
  versal_sweep->add_option("--pl-freq", pl_freq, "PL frequency in Hz")->required();
  versal_sweep->add_option("--sizes", sizes_text, "comma-separated square sizes");
  versal_sweep->callback([&] {
    if (aie_name.empty()) throw UsageFailure{"--aie is required"};
    const auto sizes = as_usage([&] { return parse_sizes(sizes_text); });
    if (pl_freq <= 0) throw UsageFailure{"--pl-freq must be > 0"};
    const auto solutions = resolve_solutions(solutions_path);
    const auto& sol = versal::find_aie_solution(solutions, aie_name);
    const double peak = versal::calibrated_tops(sol, pl_freq);
    const GemmDims compute = sol.compute_dims();
    report::Table t;
    t.headers = {"s", "Padded size", "Effective TOPs", "Retained"};
    for (i64 s : sizes) {
      const GemmDims padded{round_up_multiple(s, compute.m),
                            round_up_multiple(s, compute.k),
                            round_up_multiple(s, compute.n)};
      const double eff = versal::scalability_tops(peak, compute, s);
      t.rows.push_back(
          {std::to_string(s), padded.str(), report::tops(eff), report::pct(eff / peak)});
    }
    write_text(report::render(t, format), out_path, out);
  });

  // ---- stratix ----
  auto* stratix_cmd = app.add_subcommand("stratix", "in-fabric tensor-block device model");
  stratix_cmd->require_subcommand(1);
  std::string stratix_device_name;
  stratix_cmd->add_option("--device", stratix_device_name, "Stratix device name");

  auto* stratix_solve =
      stratix_cmd->add_subcommand("solve", "maximize the native buffer size");
  TbFlags solve_flags;
  solve_flags.attach(stratix_solve);
  double budget_fraction = 0.90;
  i64 budget_abs = 0;
  double freq = 0.0;
  double stratix_power = 0.0;
  stratix_solve->add_option("--budget", budget_fraction, "M20K budget fraction (default 0.90)");
  stratix_solve->add_option("--budget-abs", budget_abs, "absolute M20K budget");
  stratix_solve->add_option("--freq", freq, "frequency in Hz for the metrics table");
  stratix_solve->add_option("--power", stratix_power, "measured power in W");
  stratix_solve->callback([&] {
    const auto params = solve_flags.params();
    const DeviceCatalog catalog = resolve_catalog(catalog_path);
    const StratixDevice& dev = pick_stratix(catalog, stratix_device_name);
    const stratix::M20kBudget budget = budget_abs > 0
                                           ? stratix::M20kBudget::from_absolute(budget_abs)
                                           : stratix::M20kBudget::from_fraction(budget_fraction);
    const GemmDims native = stratix::solve_native(params, dev, budget);
    out << "native buffer size: " << native.str() << "\n";
    out << "total M20Ks: "
        << report::count_with_pct(stratix::total_m20k(params, native), dev.m20k_total)
        << "\n";
    if (freq > 0) {
      const auto design = stratix::make_design(
          params, native, freq,
          stratix_power > 0 ? std::optional<double>(stratix_power) : std::nullopt);
      report::Table t;
      t.headers = kStratixHeaders;
      t.rows.push_back(stratix_row(design, dev));
      write_text(report::render(t, format), out_path, out);
    }
  });

  auto* stratix_dse = stratix_cmd->add_subcommand("dse", "rank a grid of TB configurations");
  std::string grid_path;
  stratix_dse->add_option("--grid", grid_path, "grid JSON (default: bundled grid)");
  stratix_dse->add_option("--budget", budget_fraction, "M20K budget fraction");
  stratix_dse->add_option("--budget-abs", budget_abs, "absolute M20K budget");
  stratix_dse->callback([&] {
    const DeviceCatalog catalog = resolve_catalog(catalog_path);
    const StratixDevice& dev = pick_stratix(catalog, stratix_device_name);
    const auto grid = grid_path.empty() ? stratix::default_grid() : stratix::load_grid(grid_path);
    const stratix::M20kBudget budget = budget_abs > 0
                                           ? stratix::M20kBudget::from_absolute(budget_abs)
                                           : stratix::M20kBudget::from_fraction(budget_fraction);
    const auto result = stratix::dse(grid, dev, budget);
    report::Table t;
    t.headers = kStratixHeaders;
    for (const auto& d : result.ranked) t.rows.push_back(stratix_row(d, dev));
    write_text(report::render(t, format), out_path, out);
    for (const auto& [idx, msg] : result.errors)
      err << "entry " << idx << " skipped: " << msg << "\n";
  });

  auto* stratix_latency = stratix_cmd->add_subcommand("latency", "latency breakdown");
  TbFlags latency_flags;
  latency_flags.attach(stratix_latency);
  std::string dims_text;
  bool relaxed = false;
  stratix_latency->add_option("--dims", dims_text, "native GEMM size MxKxN")->required();
  stratix_latency->add_option("--freq", freq, "frequency in Hz (e.g. 349e6)")->required();
  stratix_latency->add_flag("--relaxed", relaxed,
                            "evaluate dims that are not compute-size multiples");
  stratix_latency->callback([&] {
    const auto params = latency_flags.params();
    const auto dims = as_usage([&] { return parse_gemm_dims(dims_text); });
    if (freq <= 0) throw UsageFailure{"--freq must be > 0"};
    const auto policy = relaxed ? stratix::DimPolicy::relaxed : stratix::DimPolicy::strict;
    const auto lb = stratix::latency(params, dims, policy);
    out << "t_load=" << lb.t_load << " t_prop=" << lb.t_prop << " t_adder=" << lb.t_adder
        << " tiles=" << lb.tiles.str() << " t_n=" << lb.t_n.str()
        << " t_total=" << lb.t_total.str() << "\n";
    out << "throughput: " << report::tops(stratix::throughput_tops(params, dims, freq, policy))
        << " TOPs @ " << report::mhz(freq) << " MHz\n";
    out << "bandwidth: " << report::gib(stratix::bandwidth_gib(dims, lb.t_total, freq))
        << " GiB/s\n";
  });

  auto* stratix_sweep =
      stratix_cmd->add_subcommand("sweep", "throughput vs. square matrix size");
  TbFlags sweep_flags;
  sweep_flags.attach(stratix_sweep);
  std::string stratix_sizes = "512,1024,2048,4096,8192,16384,32768";
  stratix_sweep->add_option("--dims", dims_text, "native GEMM size MxKxN")->required();
  stratix_sweep->add_option("--freq", freq, "frequency in Hz")->required();
  stratix_sweep->add_option("--sizes", stratix_sizes, "comma-separated square sizes");
  stratix_sweep->add_flag("--relaxed", relaxed,
                          "evaluate dims that are not compute-size multiples");
  stratix_sweep->callback([&] {
    const auto params = sweep_flags.params();
    const auto dims = as_usage([&] { return parse_gemm_dims(dims_text); });
    const auto sizes = as_usage([&] { return parse_sizes(stratix_sizes); });
    if (freq <= 0) throw UsageFailure{"--freq must be > 0"};
    const auto policy = relaxed ? stratix::DimPolicy::relaxed : stratix::DimPolicy::strict;
    const double peak = stratix::throughput_tops(params, dims, freq, policy);
    report::Table t;
    t.headers = {"s", "Effective TOPs", "Retained"};
    for (i64 s : sizes) {
      const double eff = stratix::scalability_tops(params, peak, s);
      t.rows.push_back({std::to_string(s), report::tops(eff), report::pct(eff / peak)});
    }
    write_text(report::render(t, format), out_path, out);
  });

  // ---- sim ----
  auto* sim_cmd = app.add_subcommand("sim", "tensor-block functional simulator");
  sim_cmd->require_subcommand(1);
  auto* sim_run = sim_cmd->add_subcommand("run", "simulate an int8 GEMM");
  TbFlags sim_flags;
  sim_flags.attach(sim_run);
  std::string sim_dims_text;
  std::uint64_t seed = 1;
  std::string a_path, b_path, c_path, trace_path;
  sim_run->add_option("--dims", sim_dims_text, "GEMM size MxKxN")->required();
  sim_run->add_option("--seed", seed, "seed for random matrices (default 1)");
  sim_run->add_option("--a", a_path, "A matrix file (int8, row-major)");
  sim_run->add_option("--b", b_path, "B matrix file (int8, row-major)");
  sim_run->add_option("--c-out", c_path, "write C (int32, row-major, native endian)");
  sim_run->add_option("--trace", trace_path, "write trace events as JSON lines");
  sim_run->callback([&] {
    const auto params = sim_flags.params();
    const auto dims = as_usage([&] { return parse_gemm_dims(sim_dims_text); });
    if (a_path.empty() != b_path.empty())
      throw UsageFailure{"--a and --b must be given together"};
    const sim::MatrixI8 a = a_path.empty() ? random_matrix_i8(dims.m, dims.k, seed)
                                           : read_matrix_i8(a_path, dims.m, dims.k);
    const sim::MatrixI8 b = b_path.empty() ? random_matrix_i8(dims.k, dims.n, seed + 1)
                                           : read_matrix_i8(b_path, dims.k, dims.n);
    const sim::SimResult result = sim::simulate(params, a, b, !trace_path.empty());
    const auto lb = stratix::latency(params, dims);
    const bool match = result.c == sim::reference_gemm(a, b);
    out << "dims " << dims.str() << ", params " << params.label() << "\n";
    out << "cycles=" << result.cycles << " formula_cycles=" << lb.t_total.str() << "\n";
    out << "result matches reference: " << (match ? "yes" : "NO") << "\n";
    if (!c_path.empty()) {
      std::ofstream f(c_path, std::ios::binary);
      if (!f) throw IoError("cannot write " + c_path);
      f.write(reinterpret_cast<const char*>(result.c.data.data()),
              static_cast<std::streamsize>(result.c.data.size() * sizeof(std::int32_t)));
    }
    if (!trace_path.empty()) write_text(sim::trace_to_jsonl(result.trace), trace_path, out);
    if (!match) throw DomainError("simulator result diverged from the reference GEMM");
  });

  // ---- netlist ----
  auto* netlist_cmd = app.add_subcommand("netlist", "structural code generation");
  netlist_cmd->require_subcommand(1);
  auto* netlist_emit = netlist_cmd->add_subcommand("emit", "generate and write a netlist");
  TbFlags netlist_flags;
  netlist_flags.attach(netlist_emit);
  std::string netlist_dims_text;
  i64 addr_stages = 0, data_stages = 0;
  std::string out_dir = ".";
  std::string netlist_format = "both";
  netlist_emit->add_option("--dims", netlist_dims_text, "native GEMM size MxKxN")->required();
  netlist_emit->add_option("--addr-stages", addr_stages, "address pipeline stages");
  netlist_emit->add_option("--data-stages", data_stages, "data pipeline stages");
  netlist_emit->add_option("--out-dir", out_dir, "output directory (default .)");
  netlist_emit->add_option("--netlist-format", netlist_format, "json, hdl or both")
      ->check(CLI::IsMember({"json", "hdl", "both"}));
  netlist_emit->callback([&] {
    const auto params = netlist_flags.params();
    const auto dims = as_usage([&] { return parse_gemm_dims(netlist_dims_text); });
    if (addr_stages < 0 || data_stages < 0)
      throw UsageFailure{"pipeline stage counts must be >= 0"};
    const netlist::Netlist n =
        netlist::generate(params, dims, {addr_stages, data_stages});
    const netlist::CheckReport check = netlist::check(n, params, dims);
    if (!check.clean()) {
      for (const auto& v : check.violations) err << "violation: " << v << "\n";
      throw DomainError("generated netlist failed consistency checks");
    }
    fs::create_directories(out_dir);
    const std::string base = (fs::path(out_dir) / n.name).string();
    if (netlist_format == "json" || netlist_format == "both") {
      write_text(netlist::emit_json(n), base + ".netlist.json", out);
      out << base << ".netlist.json\n";
    }
    if (netlist_format == "hdl" || netlist_format == "both") {
      write_text(netlist::emit_hdl(n), base + ".v", out);
      out << base << ".v\n";
    }
  });

  // Let parent options (--format, --out, --catalog) appear after subcommands.
  std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* a) {
    a->fallthrough();
    for (CLI::App* s : a->get_subcommands([](CLI::App*) { return true; }))
      enable_fallthrough(s);
  };
  enable_fallthrough(&app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const UsageFailure& e) {
    err << "usage error: " << e.message << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gemmforge::cli
