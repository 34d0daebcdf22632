#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace dukf {

/// 17 significant digits, the round-trip precision for IEEE doubles.
std::string format_real(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws ValidationError if absent.
  std::size_t column(const std::string& name) const;
};

/// Reads a numeric CSV with a single header row. Blank lines are skipped.
CsvTable read_csv(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Reads a whole file; throws ValidationError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes bytes exactly as given, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace dukf
