#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace syk {

/// Small CSV table: header, numeric rows in shortest round-trip form, LF
/// endings and '#'-prefixed footer comments.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& row);
  void add_footer(const std::string& comment);
  std::size_t rows() const { return rows_.size(); }

  std::string str() const;
  /// Writes to a temporary file and renames it into place.
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::string> footer_;
};

/// Numeric rows of a CSV written by CsvTable (header and comments skipped).
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> footer;
};
CsvData read_csv(const std::filesystem::path& path);

/// Atomic write: temporary file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& doc);

/// Version string baked in at build time (git describe).
std::string artifact_version();

/// UTC timestamp, ISO 8601.
std::string utc_timestamp();

}  // namespace syk
