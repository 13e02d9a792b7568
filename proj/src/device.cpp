#include "gemmforge/device.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gemmforge {

using nlohmann::json;

namespace {

void require_positive(i64 value, const std::string& field) {
  if (value < 1) throw ValidationError(field, "must be >= 1");
}

double get_number(const json& j, const std::string& field, const std::string& path) {
  if (!j.contains(field)) throw ValidationError(path + "." + field, "missing field");
  if (!j[field].is_number())
    throw ValidationError(path + "." + field, "expected a number");
  return j[field].get<double>();
}

i64 get_count(const json& j, const std::string& field, const std::string& path) {
  if (!j.contains(field)) throw ValidationError(path + "." + field, "missing field");
  if (!j[field].is_number_integer())
    throw ValidationError(path + "." + field, "expected an integer");
  return j[field].get<i64>();
}

std::string get_string(const json& j, const std::string& field, const std::string& path) {
  if (!j.contains(field)) throw ValidationError(path + "." + field, "missing field");
  if (!j[field].is_string())
    throw ValidationError(path + "." + field, "expected a string");
  return j[field].get<std::string>();
}

VersalDevice parse_versal(const json& j, const std::string& path) {
  VersalDevice d;
  d.name = get_string(j, "name", path);
  d.bram36_total = get_count(j, "bram36_total", path);
  d.uram_total = get_count(j, "uram_total", path);
  d.aie_cores = get_count(j, "aie_cores", path);
  d.aie_pl_tiles = get_count(j, "aie_pl_tiles", path);
  d.aie_freq_hz = get_number(j, "aie_freq_hz", path);
  d.pl_freq_min_hz = get_number(j, "pl_freq_min_hz", path);
  d.pl_freq_max_hz = get_number(j, "pl_freq_max_hz", path);
  d.peak_tops_int8 = get_number(j, "peak_tops_int8", path);
  d.dram_bw_bytes_per_s = get_number(j, "dram_bw_bytes_per_s", path);
  require_positive(d.bram36_total, path + ".bram36_total");
  require_positive(d.uram_total, path + ".uram_total");
  require_positive(d.aie_cores, path + ".aie_cores");
  require_positive(d.aie_pl_tiles, path + ".aie_pl_tiles");
  if (d.aie_freq_hz <= 0) throw ValidationError(path + ".aie_freq_hz", "must be > 0");
  if (d.pl_freq_min_hz <= 0 || d.pl_freq_max_hz < d.pl_freq_min_hz)
    throw ValidationError(path + ".pl_freq_min_hz", "bad PL frequency range");
  if (d.peak_tops_int8 <= 0) throw ValidationError(path + ".peak_tops_int8", "must be > 0");
  if (d.dram_bw_bytes_per_s <= 0)
    throw ValidationError(path + ".dram_bw_bytes_per_s", "must be > 0");
  return d;
}

StratixDevice parse_stratix(const json& j, const std::string& path) {
  StratixDevice d;
  d.name = get_string(j, "name", path);
  d.m20k_total = get_count(j, "m20k_total", path);
  d.tb_total = get_count(j, "tb_total", path);
  d.peak_tops_int8 = get_number(j, "peak_tops_int8", path);
  d.dram_bw_bytes_per_s = get_number(j, "dram_bw_bytes_per_s", path);
  require_positive(d.m20k_total, path + ".m20k_total");
  if (d.tb_total < 36) throw ValidationError(path + ".tb_total", "must be >= 36");
  if (d.tb_total % 36 != 0)
    throw ValidationError(path + ".tb_total", "must be divisible by 36 (chains of 36)");
  if (d.peak_tops_int8 <= 0) throw ValidationError(path + ".peak_tops_int8", "must be > 0");
  if (d.dram_bw_bytes_per_s <= 0)
    throw ValidationError(path + ".dram_bw_bytes_per_s", "must be > 0");
  return d;
}

json versal_to_json(const VersalDevice& d) {
  json j;
  j["name"] = d.name;
  j["bram36_total"] = d.bram36_total;
  j["uram_total"] = d.uram_total;
  j["aie_cores"] = d.aie_cores;
  j["aie_pl_tiles"] = d.aie_pl_tiles;
  j["aie_freq_hz"] = d.aie_freq_hz;
  j["pl_freq_min_hz"] = d.pl_freq_min_hz;
  j["pl_freq_max_hz"] = d.pl_freq_max_hz;
  j["peak_tops_int8"] = d.peak_tops_int8;
  j["dram_bw_bytes_per_s"] = d.dram_bw_bytes_per_s;
  return j;
}

json stratix_to_json(const StratixDevice& d) {
  json j;
  j["name"] = d.name;
  j["m20k_total"] = d.m20k_total;
  j["tb_total"] = d.tb_total;
  j["peak_tops_int8"] = d.peak_tops_int8;
  j["dram_bw_bytes_per_s"] = d.dram_bw_bytes_per_s;
  return j;
}

}  // namespace

const VersalDevice& DeviceCatalog::versal(const std::string& name) const {
  for (const auto& d : versal_devices)
    if (d.name == name) return d;
  throw DomainError("no Versal device named '" + name + "' in catalog");
}

const StratixDevice& DeviceCatalog::stratix(const std::string& name) const {
  for (const auto& d : stratix_devices)
    if (d.name == name) return d;
  throw DomainError("no Stratix device named '" + name + "' in catalog");
}

DeviceCatalog parse_device_catalog(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("catalog is not valid JSON: ") + e.what());
  }
  DeviceCatalog catalog;
  if (j.contains("versal_devices")) {
    const auto& arr = j["versal_devices"];
    if (!arr.is_array()) throw ValidationError("versal_devices", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      catalog.versal_devices.push_back(
          parse_versal(arr[i], "versal_devices[" + std::to_string(i) + "]"));
  }
  if (j.contains("stratix_devices")) {
    const auto& arr = j["stratix_devices"];
    if (!arr.is_array()) throw ValidationError("stratix_devices", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      catalog.stratix_devices.push_back(
          parse_stratix(arr[i], "stratix_devices[" + std::to_string(i) + "]"));
  }
  // Device names are unique across the whole catalog.
  std::vector<std::string> names;
  for (const auto& d : catalog.versal_devices) names.push_back(d.name);
  for (const auto& d : catalog.stratix_devices) names.push_back(d.name);
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t k = i + 1; k < names.size(); ++k)
      if (names[i] == names[k])
        throw ValidationError("name", "duplicate device name '" + names[i] + "'");
  return catalog;
}

DeviceCatalog load_device_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open catalog file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_device_catalog(buf.str());
}

std::string serialize_device_catalog(const DeviceCatalog& catalog) {
  json j;
  j["versal_devices"] = json::array();
  for (const auto& d : catalog.versal_devices) j["versal_devices"].push_back(versal_to_json(d));
  j["stratix_devices"] = json::array();
  for (const auto& d : catalog.stratix_devices)
    j["stratix_devices"].push_back(stratix_to_json(d));
  return j.dump(2) + "\n";
}

void save_device_catalog(const DeviceCatalog& catalog, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write catalog file: " + path);
  out << serialize_device_catalog(catalog);
}

// VC1902 BRAM/URAM and NX2100 M20K totals reconstructed from the published
// utilization percentages; every published count/percentage pair rounds
// consistently against these (covered by tests).
const std::string& default_catalog_json() {
  static const std::string text = R"({
  "versal_devices": [
    {
      "name": "VC1902",
      "bram36_total": 967,
      "uram_total": 463,
      "aie_cores": 400,
      "aie_pl_tiles": 39,
      "aie_freq_hz": 1.25e9,
      "pl_freq_min_hz": 2.75e8,
      "pl_freq_max_hz": 3.0e8,
      "peak_tops_int8": 135.0,
      "dram_bw_bytes_per_s": 1.024e11
    }
  ],
  "stratix_devices": [
    {
      "name": "NX2100",
      "m20k_total": 6847,
      "tb_total": 3960,
      "peak_tops_int8": 143.0,
      "dram_bw_bytes_per_s": 5.12e11
    }
  ]
}
)";
  return text;
}

const DeviceCatalog& default_catalog() {
  static const DeviceCatalog catalog = parse_device_catalog(default_catalog_json());
  return catalog;
}

}  // namespace gemmforge
