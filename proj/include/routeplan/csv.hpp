#pragma once

#include <string>
#include <vector>

namespace routeplan {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each row has header.size() cells

  // Column index for `name`, or -1 when absent.
  int column(const std::string& name) const;
};

// Reads a comma-separated file with one header row. Cells are whitespace-trimmed.
// ConfigError when the file cannot be opened; ValidationError on ragged rows
// or an empty file.
CsvTable read_csv(const std::string& path);

void write_csv(const CsvTable& table, const std::string& path);

// Shortest-round-trip decimal text for a double ("%.17g" fallback); used by
// every writer so that emitted numbers re-parse to the same bits.
std::string format_double(double v);

// Full-string numeric parse; ValidationError mentioning `what` on garbage.
double parse_double(const std::string& text, const std::string& what);
long parse_long(const std::string& text, const std::string& what);

}  // namespace routeplan
