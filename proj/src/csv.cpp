#include "cpcapp/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "cpcapp/errors.hpp"
#include "cpcapp/text.hpp"

namespace cpcapp {

namespace {

std::string unquote(std::string_view field) {
  field = trim(field);
  if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
  return std::string(field);
}

}  // namespace

CsvTable parse_csv(std::istream& is, const std::string& source) {
  CsvTable table;
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t records = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (width == 0) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                       " fields, found " + std::to_string(fields.size()));
    }
    const bool first = records == 0 && !table.header;
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size() && numeric; ++i) numeric = parse_double(fields[i], row[i]);
    if (!numeric) {
      if (first) {
        std::vector<std::string> names;
        for (auto f : fields) names.push_back(unquote(f));
        table.header = std::move(names);
        continue;
      }
      for (std::size_t i = 0; i < fields.size(); ++i) {
        double tmp = 0;
        if (!parse_double(fields[i], tmp)) {
          throw ParseError(source + ":" + std::to_string(line_no) + ": field " + std::to_string(i + 1) +
                           " is not a finite number: '" + std::string(trim(fields[i])) + "'");
        }
      }
    }
    values.insert(values.end(), row.begin(), row.end());
    ++records;
  }
  if (records == 0) throw ParseError(source + ": no data rows");
  table.rows = Matrix(records, width, std::move(values));
  return table;
}

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path.string());
  return parse_csv(is, path.string());
}

DataMatrix read_csv(const std::filesystem::path& path, bool transpose) {
  CsvTable t = read_csv_table(path);
  return DataMatrix(transpose ? std::move(t.rows) : t.rows.transposed());
}

void write_csv(std::ostream& os, const Matrix& rows, const std::vector<std::string>* header) {
  if (header) {
    if (header->size() != rows.cols()) throw ShapeError("write_csv: header width differs from row width");
    for (std::size_t i = 0; i < header->size(); ++i) os << (i ? "," : "") << (*header)[i];
    os << '\n';
  }
  for (std::size_t r = 0; r < rows.rows(); ++r) os << join_csv(rows.row(r)) << '\n';
}

void write_csv(const std::filesystem::path& path, const Matrix& rows, const std::vector<std::string>* header) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_csv(os, rows, header);
  if (!os) throw Error("failed writing " + path.string());
}

void write_samples_csv(const std::filesystem::path& path, const DataMatrix& data) {
  write_csv(path, data.values().transposed());
}

}  // namespace cpcapp
