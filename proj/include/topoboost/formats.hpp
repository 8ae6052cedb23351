#pragma once

// Text file formats shared by the CLI and the library.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topoboost/gbdt.hpp"
#include "topoboost/image_topo.hpp"
#include "topoboost/ph_core.hpp"

namespace topoboost::formats {

/// Shortest representation that parses back to the same double; "inf" and
/// "-inf" for infinities.
std::string format_number(double v);
/// Throws ParseError.
double parse_number(std::string_view text);

std::string read_text(const std::filesystem::path& path);
/// Throws IoError.
void write_text(const std::filesystem::path& path, std::string_view contents);

/// Header `x,y`, one point per row.
ph::PointCloud parse_point_cloud_csv(std::string_view text);
std::string point_cloud_csv(const ph::PointCloud& cloud);

/// Header `dim,birth,death`; infinite deaths are written as `inf`.
std::string diagram_csv(std::span<const ph::PersistenceDiagram> diagrams);
std::vector<ph::PersistenceDiagram> parse_diagram_csv(std::string_view text, int max_dim = 2);

/// Header `t,count`.
std::string betti_csv(const topo::BettiCurve& curve);

struct LabeledMatrix {
  std::vector<int> labels;
  gbdt::FeatureMatrix features;
};

/// Header `label,f0,...,f{m-1}`.
std::string feature_csv(std::span<const int> labels, const gbdt::FeatureMatrix& features);
LabeledMatrix parse_feature_csv(std::string_view text);

/// Header `label,predicted,p0,...,p{K-1}`.
std::string prediction_csv(std::span<const int> labels, std::span<const int> predicted,
                           const gbdt::FeatureMatrix& proba);

struct Predictions {
  std::vector<int> labels;
  std::vector<int> predicted;
  std::size_t num_class = 0;
};
Predictions parse_prediction_csv(std::string_view text);

}  // namespace topoboost::formats
