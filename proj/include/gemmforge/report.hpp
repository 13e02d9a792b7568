#pragma once

#include <string>
#include <vector>

#include "gemmforge/gemm_dims.hpp"

namespace gemmforge::report {

// All numeric formatting funnels through these helpers so CLI output and
// direct module calls can never round differently. Precision follows the
// published tables: TOPs 2 decimals, GiB/s and percentages 1, TOPs/W 3.
std::string fixed(double value, int decimals);
std::string tops(double value);
std::string gib(double value);
std::string pct(double fraction);                 // "88.9%"
std::string tops_per_watt(double value);
std::string count_with_pct(i64 count, i64 total);  // "416 (43%)"
std::string mhz(double hz);                        // "349"

struct Table {
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const Table& t);
std::string to_markdown(const Table& t);
std::string to_json(const Table& t);  // array of header->cell objects

// "csv" | "md" | "json"
std::string render(const Table& t, const std::string& format);

}  // namespace gemmforge::report
