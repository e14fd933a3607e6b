#include "reliag/serialization.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace reliag {

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error(ErrorCode::Internal, "to_chars failed");
  return std::string(buf, ptr);
}

double round6(double value) {
  if (!std::isfinite(value)) return value;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return std::strtod(buf, nullptr);
}

std::string format_double6(double value) { return format_double(round6(value)); }

double parse_double(const std::string& text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error(ErrorCode::ConfigParse, "bad number: '" + text + "'");
  return value;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (quoted) throw Error(ErrorCode::ConfigParse, "unterminated quote in CSV");
  fields.push_back(std::move(current));
  return fields;
}

namespace {

constexpr const char* kMatrixHeader =
    "query_id,source_id,answer_kind,canonical_id,surface,alignment_score";

}  // namespace

std::string matrix_to_csv(const MatrixCsv& data) {
  data.matrix.validate();
  if (data.scores.size() != data.matrix.cells.size())
    throw Error(ErrorCode::DimensionMismatch, "scores vs matrix rows");
  std::string out = kMatrixHeader;
  out += '\n';
  for (int j = 0; j < data.matrix.n_queries(); ++j) {
    if (data.scores[j].size() != data.matrix.cells[j].size())
      throw Error(ErrorCode::DimensionMismatch, "scores vs matrix columns");
    for (int i = 0; i < data.matrix.n_sources; ++i) {
      const Answer& a = data.matrix.cells[j][i];
      out += csv_escape(data.matrix.query_ids[j]);
      out += ',';
      out += std::to_string(i);
      out += ',';
      if (a.is_idk()) {
        out += "IDK,,,";
      } else {
        out += "TEXT,";
        out += csv_escape(a.canonical_id());
        out += ',';
        out += csv_escape(a.surface());
        out += ',';
      }
      out += format_double(data.scores[j][i]);
      out += '\n';
    }
  }
  return out;
}

MatrixCsv matrix_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != kMatrixHeader)
    throw Error(ErrorCode::ConfigParse, "bad matrix CSV header");

  MatrixCsv data;
  std::vector<std::string> row_ids;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (fields.size() != 6)
      throw Error(ErrorCode::ConfigParse,
                  "matrix CSV line " + std::to_string(line_no) + ": expected 6 fields");
    const std::string& query_id = fields[0];
    const int source_id = static_cast<int>(parse_double(fields[1]));
    Answer answer;
    if (fields[2] == "TEXT") {
      answer = Answer::text(fields[3], fields[4]);
    } else if (fields[2] == "IDK") {
      if (!fields[3].empty() || !fields[4].empty())
        throw Error(ErrorCode::ConfigParse, "IDK row carries canonical/surface");
    } else {
      throw Error(ErrorCode::ConfigParse, "answer_kind must be TEXT or IDK");
    }
    const double score = parse_double(fields[5]);
    if (score < 0.0 || score > 1.0)
      throw Error(ErrorCode::RejectRange, "alignment_score outside [0,1]");

    if (row_ids.empty() || row_ids.back() != query_id) {
      row_ids.push_back(query_id);
      data.matrix.cells.emplace_back();
      data.scores.emplace_back();
    }
    if (source_id != static_cast<int>(data.matrix.cells.back().size()))
      throw Error(ErrorCode::ConfigParse,
                  "matrix CSV line " + std::to_string(line_no) +
                      ": source ids must run 0..N-1 per query");
    data.matrix.cells.back().push_back(std::move(answer));
    data.scores.back().push_back(score);
  }
  if (data.matrix.cells.empty())
    throw Error(ErrorCode::ConfigParse, "matrix CSV has no rows");
  data.matrix.query_ids = std::move(row_ids);
  data.matrix.n_sources = static_cast<int>(data.matrix.cells.front().size());
  data.matrix.validate();  // rejects ragged rows (holes)
  return data;
}

std::string weights_to_csv(const WeightVector& weights) {
  weights.validate();
  std::string out = "source_id,w_hat,v,scale\n";
  for (int i = 0; i < weights.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(weights.w_hat[i]);
    out += ',';
    out += format_double(weights.v[i]);
    out += ',';
    out += format_double(weights.scale);
    out += '\n';
  }
  return out;
}

WeightVector weights_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "source_id,w_hat,v,scale")
    throw Error(ErrorCode::ConfigParse, "bad weights CSV header");
  WeightVector weights;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (fields.size() != 4)
      throw Error(ErrorCode::ConfigParse, "weights CSV: expected 4 fields");
    weights.w_hat.push_back(parse_double(fields[1]));
    weights.v.push_back(parse_double(fields[2]));
    weights.scale = parse_double(fields[3]);
  }
  weights.validate();
  return weights;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path);
}

}  // namespace reliag
