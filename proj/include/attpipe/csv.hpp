#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace attpipe {

/// Shortest decimal form that round-trips to the same double.
std::string format_full(double v);
/// General format with a fixed number of significant digits.
std::string format_sig(double v, int digits);
/// Fixed decimals, for human-readable tables.
std::string format_fixed(double v, int decimals);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // index of a header column, -1 when missing
  int column(std::string_view name) const;
};

// Minimal comma-separated reader: one required header row, no quoting
// (the schemas used here never contain commas inside fields).
CsvTable read_csv(std::istream& in, std::string_view source_name = "<stream>");
CsvTable read_csv_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

double parse_double_field(std::string_view field, std::string_view context);
long parse_long_field(std::string_view field, std::string_view context);

}  // namespace attpipe
