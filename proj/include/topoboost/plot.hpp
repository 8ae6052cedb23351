#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "topoboost/ph_core.hpp"

namespace topoboost::plot {

struct MarkerStyle {
  enum class Shape { Circle, Square };
  Shape shape = Shape::Circle;
  std::string color = "#1f77b4";
};

struct PlotSpec {
  int width = 480;
  int height = 480;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  double infinity_cap = 1.0;  // data y coordinate of essential (infinite) pairs
  std::vector<MarkerStyle> styles{{MarkerStyle::Shape::Circle, "#1f77b4"},
                                  {MarkerStyle::Shape::Square, "#d62728"}};
};

/// Square axes from 0 to 5% past the largest finite value or eps_max, whichever
/// is larger; infinite deaths are drawn at eps_max.
PlotSpec fit_plot_spec(std::span<const ph::PersistenceDiagram> diagrams, double eps_max);

/// SVG document with the diagonal, one marker per pair (class "pair hK",
/// data-birth / data-death attributes) and an H0/H1 legend. Infinite pairs get
/// class "infinite" and sit on a labelled cap line.
/// Throws InvalidArgument when the PlotSpec is degenerate or misses a point.
std::string persistence_svg(std::span<const ph::PersistenceDiagram> diagrams, const PlotSpec& spec);

/// Writes persistence_svg to path. Throws IoError.
void emit_persistence_svg(std::span<const ph::PersistenceDiagram> diagrams, const PlotSpec& spec,
                          const std::filesystem::path& path);

}  // namespace topoboost::plot
