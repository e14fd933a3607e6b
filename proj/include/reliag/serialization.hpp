#pragma once

#include <string>
#include <vector>

#include "reliag/types.hpp"

namespace reliag {

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

// Value rounded to 6 significant digits; report floats go through this so
// serialized output is compact and re-serialization is the identity.
double round6(double value);
std::string format_double6(double value);

double parse_double(const std::string& text);

// Matrix rows paired with the alignment score of each cell's raw response.
// CSV header: query_id,source_id,answer_kind,canonical_id,surface,alignment_score
struct MatrixCsv {
  ResponseMatrix matrix;
  std::vector<std::vector<double>> scores;  // same shape as matrix.cells
};

std::string matrix_to_csv(const MatrixCsv& data);
MatrixCsv matrix_from_csv(const std::string& csv);

std::string weights_to_csv(const WeightVector& weights);
WeightVector weights_from_csv(const std::string& csv);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// Minimal RFC-4180 quoting; fields are only quoted when necessary, so output
// is canonical.
std::string csv_escape(const std::string& field);
std::vector<std::string> csv_split(const std::string& line);

}  // namespace reliag
