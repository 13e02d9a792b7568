#include "gemmforge/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace gemmforge::report {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string tops(double value) { return fixed(value, 2); }
std::string gib(double value) { return fixed(value, 1); }
std::string pct(double fraction) { return fixed(fraction * 100.0, 1) + "%"; }
std::string tops_per_watt(double value) { return fixed(value, 3); }

std::string count_with_pct(i64 count, i64 total) {
  const long long p = std::llround(100.0 * static_cast<double>(count) /
                                   static_cast<double>(total));
  return std::to_string(count) + " (" + std::to_string(p) + "%)";
}

std::string mhz(double hz) { return fixed(hz / 1e6, 0); }

std::string to_csv(const Table& t) {
  std::ostringstream out;
  auto cell = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + "\"";
  };
  for (std::size_t i = 0; i < t.headers.size(); ++i)
    out << (i ? "," : "") << cell(t.headers[i]);
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell(row[i]);
    out << "\n";
  }
  return out.str();
}

std::string to_markdown(const Table& t) {
  std::vector<std::size_t> width(t.headers.size(), 0);
  for (std::size_t i = 0; i < t.headers.size(); ++i) width[i] = t.headers[i].size();
  for (const auto& row : t.rows)
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i)
      width[i] = std::max(width[i], row[i].size());

  std::ostringstream out;
  auto emit_row = [&](const std::vector<std::string>& row) {
    out << "|";
    for (std::size_t i = 0; i < width.size(); ++i) {
      const std::string& s = i < row.size() ? row[i] : "";
      out << " " << s << std::string(width[i] - s.size(), ' ') << " |";
    }
    out << "\n";
  };
  emit_row(t.headers);
  out << "|";
  for (std::size_t i = 0; i < width.size(); ++i) out << std::string(width[i] + 2, '-') << "|";
  out << "\n";
  for (const auto& row : t.rows) emit_row(row);
  return out.str();
}

std::string to_json(const Table& t) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < t.headers.size(); ++i)
      obj[t.headers[i]] = i < row.size() ? row[i] : "";
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

std::string render(const Table& t, const std::string& format) {
  if (format == "csv") return to_csv(t);
  if (format == "md") return to_markdown(t);
  if (format == "json") return to_json(t);
  throw DomainError("unknown report format '" + format + "' (expected csv, json or md)");
}

}  // namespace gemmforge::report
