#pragma once

#include <string>
#include <vector>

namespace borps {

// Comma-separated, mandatory header row, UTF-8, '.' decimal point.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

// Shortest round-trip decimal rendering of a double.
std::string format_double(double value);

void write_csv(const std::string& path, const CsvTable& table);

// FNV-1a 64-bit digest of a file's bytes, as 16 hex chars.
std::string file_digest(const std::string& path);

}  // namespace borps
