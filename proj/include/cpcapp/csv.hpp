#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cpcapp/matrix.hpp"
#include "cpcapp/statistics.hpp"

namespace cpcapp {

/// Rectangular numeric table, one row per record.
struct CsvTable {
  std::optional<std::vector<std::string>> header;
  Matrix rows;
};

/// Parses comma-separated numbers. A first row containing any non-numeric
/// field is taken as a header. Blank lines are ignored. Throws ParseError,
/// naming `source` and the line number, on ragged rows or bad cells.
CsvTable parse_csv(std::istream& is, const std::string& source = "<input>");
CsvTable read_csv_table(const std::filesystem::path& path);

/// Reads samples stored one per row (or one per column with transpose).
DataMatrix read_csv(const std::filesystem::path& path, bool transpose = false);

/// Writes rows with 17 significant digits, preceded by the header if given.
void write_csv(std::ostream& os, const Matrix& rows, const std::vector<std::string>* header = nullptr);
void write_csv(const std::filesystem::path& path, const Matrix& rows, const std::vector<std::string>* header = nullptr);

/// Writes the samples of data one per row.
void write_samples_csv(const std::filesystem::path& path, const DataMatrix& data);

}  // namespace cpcapp
