#include "dicp/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dicp {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos
                         ? std::string()
                         : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

}  // namespace

CsvDataset parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty CSV input");
  CsvDataset out;
  std::vector<std::string> header = split_fields(line);
  if (header.size() < 2)
    throw DataError("CSV header needs at least one feature and a label");
  out.label_name = header.back();
  header.pop_back();
  out.feature_names = std::move(header);
  const std::size_t width = out.feature_names.size() + 1;

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (fields.size() != width)
      throw DataError("ragged row " + std::to_string(line_no) + ": expected " +
                      std::to_string(width) + " fields, found " +
                      std::to_string(fields.size()));
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0.0;
      if (!parse_number(fields[c], v))
        throw DataError("non-numeric cell '" + fields[c] + "' at row " +
                        std::to_string(line_no) + ", column " +
                        std::to_string(c + 1));
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw DataError("CSV has no data rows");

  const auto n = static_cast<Index>(rows);
  const auto d = static_cast<Index>(width - 1);
  out.data.features.resize(n, d);
  out.data.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * width;
    for (Index j = 0; j < d; ++j)
      out.data.features(i, j) = values[base + static_cast<std::size_t>(j)];
    out.data.labels(i) = values[base + width - 1];
  }
  return out;
}

CsvDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_csv(in);
}

void write_csv(const std::filesystem::path& path, const CsvDataset& dataset) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& name : dataset.feature_names) out << name << ',';
  out << dataset.label_name << '\n';
  const LabeledDataset& data = dataset.data;
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dim(); ++j)
      out << format_double(data.features(i, j)) << ',';
    out << format_double(data.labels(i)) << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

CsvDataset with_default_names(LabeledDataset data) {
  CsvDataset out;
  for (Index j = 0; j < data.dim(); ++j)
    out.feature_names.push_back("x" + std::to_string(j + 1));
  out.label_name = "y";
  out.data = std::move(data);
  return out;
}

}  // namespace dicp
