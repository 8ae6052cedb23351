#pragma once

// Topological feature stream: grayscale conversion, foreground point clouds,
// Betti curves and fixed-length diagram vectors.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "topoboost/image.hpp"
#include "topoboost/ph_core.hpp"

namespace topoboost::topo {

/// BT.601 luma for RGB, identity copy for one channel.
GrayImage to_grayscale(const Image& img);

/// Pixels with intensity < tau become points (x = row, y = col). Clouds larger
/// than max_points are reduced by farthest-point sampling seeded at the first
/// foreground pixel in row-major order; ties pick the earliest pixel. The
/// result is ordered by (row, col).
ph::PointCloud image_to_point_cloud(const GrayImage& g, double tau = 0.5,
                                    std::size_t max_points = 100);

struct BettiCurve {
  int dim = 0;
  std::vector<double> grid;
  std::vector<std::size_t> values;
};

/// values[i] = number of pairs with birth <= grid[i] < death.
/// Throws InvalidArgument unless grid is strictly increasing.
BettiCurve betti_curve(const ph::PersistenceDiagram& diag, std::span<const double> grid);

/// Pools all dimensions, caps infinite deaths at eps_max, sorts by persistence
/// (descending; ties by dim then birth) and flattens as birth,death,... The
/// result always has exactly alpha entries: truncated or zero padded.
std::vector<double> vectorize_diagrams(std::span<const ph::PersistenceDiagram> diags,
                                       std::size_t alpha, double eps_max);

struct TopoParams {
  double tau = 0.5;
  std::size_t max_points = 100;
  std::optional<double> eps_max;  // per-cloud diameter when empty
  int max_dim = 2;
};

/// Persistence diagrams of one image plus the cap used for its infinite deaths.
struct ImageDiagrams {
  std::vector<ph::PersistenceDiagram> diagrams;
  double eps_max = 0.0;

  std::size_t pair_count() const;
};

ImageDiagrams image_diagrams(const GrayImage& g, const TopoParams& params);

}  // namespace topoboost::topo
