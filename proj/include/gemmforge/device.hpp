#pragma once

#include <string>
#include <vector>

#include "gemmforge/gemm_dims.hpp"

namespace gemmforge {

// Per-device resource totals. Counts are absolute; utilization percentages in
// reports are always derived from these in one place.
struct VersalDevice {
  std::string name;
  i64 bram36_total = 0;  // 36 Kbit BRAMs (B_36K)
  i64 uram_total = 0;    // 288 Kbit URAMs (U_288K)
  i64 aie_cores = 0;
  i64 aie_pl_tiles = 0;
  double aie_freq_hz = 0.0;
  double pl_freq_min_hz = 0.0;
  double pl_freq_max_hz = 0.0;
  double peak_tops_int8 = 0.0;
  double dram_bw_bytes_per_s = 0.0;
};

struct StratixDevice {
  std::string name;
  i64 m20k_total = 0;  // 20 Kbit M20Ks (B_M20K)
  i64 tb_total = 0;    // tensor blocks, in chains of 36
  double peak_tops_int8 = 0.0;
  double dram_bw_bytes_per_s = 0.0;
};

struct DeviceCatalog {
  std::vector<VersalDevice> versal_devices;
  std::vector<StratixDevice> stratix_devices;

  const VersalDevice& versal(const std::string& name) const;
  const StratixDevice& stratix(const std::string& name) const;
};

// Loads and validates a JSON catalog; throws IoError / ParseError /
// ValidationError (with a field path) on failure.
DeviceCatalog load_device_catalog(const std::string& path);

DeviceCatalog parse_device_catalog(const std::string& json_text);
std::string serialize_device_catalog(const DeviceCatalog& catalog);
void save_device_catalog(const DeviceCatalog& catalog, const std::string& path);

// The bundled catalog (VC1902, NX2100); identical to data/devices.json.
const DeviceCatalog& default_catalog();
const std::string& default_catalog_json();

}  // namespace gemmforge
