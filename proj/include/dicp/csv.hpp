#pragma once

#include "dicp/core.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dicp {

/// A labeled dataset with the header names it was read with.
struct CsvDataset {
  std::vector<std::string> feature_names;
  std::string label_name;
  LabeledDataset data;
};

/// Reads a header row followed by numeric rows; the last column is the
/// label. Throws DataError naming the row and column of the first bad cell
/// (rows counted from 1 at the header).
CsvDataset load_csv(const std::filesystem::path& path);
CsvDataset parse_csv(std::istream& in);

/// Writes the dataset with shortest round-trip numbers, so parsing the file
/// returns bitwise-identical values.
void write_csv(const std::filesystem::path& path, const CsvDataset& dataset);

/// Default header names x1..xd, y.
CsvDataset with_default_names(LabeledDataset data);

/// Splits a line on commas and trims surrounding whitespace from fields.
std::vector<std::string> split_fields(const std::string& line);

/// Shortest round-trip text for a double ("inf", "-inf" and "nan" for
/// non-finite values).
std::string format_double(double value);

}  // namespace dicp
