#include "topoboost/formats.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "topoboost/error.hpp"

namespace topoboost::formats {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "cannot format number");
  return std::string(buf, end);
}

double parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (text == "inf" || text == "+inf") return ph::kInfinity;
  if (text == "-inf") return -ph::kInfinity;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::ParseError, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

int parse_int(std::string_view text) {
  const double v = parse_number(text);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw Error(ErrorCode::ParseError, "not an integer: '" + std::string(text) + "'");
  }
  return static_cast<int>(v);
}

void expect_header(std::string_view actual, std::string_view expected) {
  if (actual != expected) {
    throw Error(ErrorCode::ParseError,
                "expected header '" + std::string(expected) + "', got '" + std::string(actual) + "'");
  }
}

void expect_fields(const std::vector<std::string_view>& fields, std::size_t n, std::size_t line_no) {
  if (fields.size() != n) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                           std::to_string(n) + " fields, got " +
                                           std::to_string(fields.size()));
  }
}

}  // namespace

ph::PointCloud parse_point_cloud_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "point cloud CSV is missing its header");
  expect_header(lines[0], "x,y");
  std::vector<ph::Point> points;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_fields(lines[i]);
    expect_fields(f, 2, i + 1);
    points.push_back({parse_number(f[0]), parse_number(f[1])});
  }
  return ph::PointCloud(std::move(points));
}

std::string point_cloud_csv(const ph::PointCloud& cloud) {
  std::string out = "x,y\n";
  for (const auto& p : cloud.points()) out += format_number(p.x) + "," + format_number(p.y) + "\n";
  return out;
}

std::string diagram_csv(std::span<const ph::PersistenceDiagram> diagrams) {
  std::string out = "dim,birth,death\n";
  for (const auto& d : diagrams) {
    for (const auto& p : d.pairs) {
      out += std::to_string(p.dim) + "," + format_number(p.birth) + "," + format_number(p.death) + "\n";
    }
  }
  return out;
}

std::vector<ph::PersistenceDiagram> parse_diagram_csv(std::string_view text, int max_dim) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "diagram CSV is missing its header");
  expect_header(lines[0], "dim,birth,death");
  std::vector<ph::PersistenceDiagram> diagrams(static_cast<std::size_t>(max_dim));
  for (int k = 0; k < max_dim; ++k) diagrams[static_cast<std::size_t>(k)].dim = k;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_fields(lines[i]);
    expect_fields(f, 3, i + 1);
    const int dim = parse_int(f[0]);
    if (dim < 0 || dim >= max_dim) throw Error(ErrorCode::ParseError, "diagram dimension out of range");
    diagrams[static_cast<std::size_t>(dim)].pairs.push_back({dim, parse_number(f[1]), parse_number(f[2])});
  }
  return diagrams;
}

std::string betti_csv(const topo::BettiCurve& curve) {
  std::string out = "t,count\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out += format_number(curve.grid[i]) + "," + std::to_string(curve.values[i]) + "\n";
  }
  return out;
}

std::string feature_csv(std::span<const int> labels, const gbdt::FeatureMatrix& features) {
  if (labels.size() != features.rows()) throw Error(ErrorCode::LengthMismatch, "label count != rows");
  std::string out = "label";
  for (std::size_t c = 0; c < features.cols(); ++c) out += ",f" + std::to_string(c);
  out += "\n";
  for (std::size_t r = 0; r < features.rows(); ++r) {
    out += std::to_string(labels[r]);
    for (double v : features.row(r)) {
      out += ",";
      out += format_number(v);
    }
    out += "\n";
  }
  return out;
}

LabeledMatrix parse_feature_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::EmptyDataset, "empty dataset");
  const auto header = split_fields(lines[0]);
  if (header.empty() || header[0] != "label") {
    throw Error(ErrorCode::ParseError, "feature CSV header must start with 'label'");
  }
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c] != "f" + std::to_string(c - 1)) {
      throw Error(ErrorCode::ParseError, "unexpected feature column '" + std::string(header[c]) + "'");
    }
  }
  LabeledMatrix out;
  out.features = gbdt::FeatureMatrix(0, header.size() - 1);
  std::vector<double> row(header.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_fields(lines[i]);
    expect_fields(f, header.size(), i + 1);
    out.labels.push_back(parse_int(f[0]));
    for (std::size_t c = 1; c < f.size(); ++c) row[c - 1] = parse_number(f[c]);
    out.features.push_row(row);
  }
  return out;
}

std::string prediction_csv(std::span<const int> labels, std::span<const int> predicted,
                           const gbdt::FeatureMatrix& proba) {
  if (labels.size() != predicted.size() || predicted.size() != proba.rows()) {
    throw Error(ErrorCode::LengthMismatch, "prediction columns differ in length");
  }
  std::string out = "label,predicted";
  for (std::size_t k = 0; k < proba.cols(); ++k) out += ",p" + std::to_string(k);
  out += "\n";
  for (std::size_t r = 0; r < proba.rows(); ++r) {
    out += std::to_string(labels[r]) + "," + std::to_string(predicted[r]);
    for (double v : proba.row(r)) {
      out += ",";
      out += format_number(v);
    }
    out += "\n";
  }
  return out;
}

Predictions parse_prediction_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::EmptyInput, "empty prediction file");
  const auto header = split_fields(lines[0]);
  if (header.size() < 2 || header[0] != "label" || header[1] != "predicted") {
    throw Error(ErrorCode::ParseError, "prediction CSV header must start with 'label,predicted'");
  }
  Predictions out;
  out.num_class = header.size() - 2;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_fields(lines[i]);
    expect_fields(f, header.size(), i + 1);
    out.labels.push_back(parse_int(f[0]));
    out.predicted.push_back(parse_int(f[1]));
  }
  return out;
}

}  // namespace topoboost::formats
