#include "topoboost/image_topo.hpp"

#include <algorithm>
#include <cstdint>
#include <tuple>

#include "topoboost/error.hpp"

namespace topoboost::topo {

GrayImage to_grayscale(const Image& img) {
  const std::size_t pixels = img.height() * img.width();
  std::vector<double> out(pixels);
  auto data = img.data();
  if (img.channels() == 1) {
    std::copy(data.begin(), data.end(), out.begin());
  } else if (img.channels() == 3) {
    for (std::size_t p = 0; p < pixels; ++p) {
      const double v = 0.299 * data[3 * p] + 0.587 * data[3 * p + 1] + 0.114 * data[3 * p + 2];
      out[p] = std::clamp(v, 0.0, 1.0);
    }
  } else {
    throw Error(ErrorCode::BadChannelCount, "grayscale conversion needs 1 or 3 channels");
  }
  return GrayImage(img.height(), img.width(), std::move(out));
}

ph::PointCloud image_to_point_cloud(const GrayImage& g, double tau, std::size_t max_points) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorCode::InvalidArgument, "tau must be in [0,1]");
  if (max_points == 0) throw Error(ErrorCode::InvalidArgument, "max_points must be >= 1");

  struct Pixel {
    std::int64_t row, col;
  };
  std::vector<Pixel> fg;
  for (std::size_t r = 0; r < g.height(); ++r) {
    for (std::size_t c = 0; c < g.width(); ++c) {
      if (g.at(r, c) < tau) fg.push_back({static_cast<std::int64_t>(r), static_cast<std::int64_t>(c)});
    }
  }

  if (fg.size() > max_points) {
    // Farthest-point sampling on exact integer squared distances.
    auto dist2 = [&](std::size_t a, std::size_t b) {
      const std::int64_t dr = fg[a].row - fg[b].row;
      const std::int64_t dc = fg[a].col - fg[b].col;
      return dr * dr + dc * dc;
    };
    std::vector<std::size_t> chosen{0};
    std::vector<std::int64_t> nearest(fg.size());
    for (std::size_t i = 0; i < fg.size(); ++i) nearest[i] = dist2(i, 0);
    while (chosen.size() < max_points) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < fg.size(); ++i) {
        if (nearest[i] > nearest[best]) best = i;
      }
      chosen.push_back(best);
      for (std::size_t i = 0; i < fg.size(); ++i) nearest[i] = std::min(nearest[i], dist2(i, best));
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<Pixel> kept;
    kept.reserve(chosen.size());
    for (std::size_t i : chosen) kept.push_back(fg[i]);
    fg = std::move(kept);
  }

  std::vector<ph::Point> points;
  points.reserve(fg.size());
  for (const auto& p : fg) points.push_back({static_cast<double>(p.row), static_cast<double>(p.col)});
  return ph::PointCloud(std::move(points));
}

BettiCurve betti_curve(const ph::PersistenceDiagram& diag, std::span<const double> grid) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i - 1] < grid[i])) throw Error(ErrorCode::InvalidArgument, "grid must be strictly increasing");
  }
  BettiCurve curve{diag.dim, {grid.begin(), grid.end()}, std::vector<std::size_t>(grid.size(), 0)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    curve.values[i] = static_cast<std::size_t>(std::count_if(
        diag.pairs.begin(), diag.pairs.end(),
        [t](const ph::PersistencePair& p) { return p.birth <= t && t < p.death; }));
  }
  return curve;
}

std::vector<double> vectorize_diagrams(std::span<const ph::PersistenceDiagram> diags,
                                       std::size_t alpha, double eps_max) {
  struct Entry {
    double persistence;
    int dim;
    double birth;
    double death;
  };
  std::vector<Entry> pooled;
  for (const auto& d : diags) {
    for (const auto& p : d.pairs) {
      const double death = p.is_infinite() ? eps_max : p.death;
      pooled.push_back({death - p.birth, p.dim, p.birth, death});
    }
  }
  std::sort(pooled.begin(), pooled.end(), [](const Entry& a, const Entry& b) {
    if (a.persistence != b.persistence) return a.persistence > b.persistence;
    return std::tie(a.dim, a.birth, a.death) < std::tie(b.dim, b.birth, b.death);
  });

  std::vector<double> out(alpha, 0.0);
  for (std::size_t k = 0; k < pooled.size() && 2 * k < alpha; ++k) {
    out[2 * k] = pooled[k].birth;
    if (2 * k + 1 < alpha) out[2 * k + 1] = pooled[k].death;
  }
  return out;
}

std::size_t ImageDiagrams::pair_count() const {
  std::size_t total = 0;
  for (const auto& d : diagrams) total += d.pairs.size();
  return total;
}

ImageDiagrams image_diagrams(const GrayImage& g, const TopoParams& params) {
  const ph::PointCloud cloud = image_to_point_cloud(g, params.tau, params.max_points);
  const ph::DistanceMatrix dist = ph::pairwise_distances(cloud);
  const double eps = params.eps_max.value_or(ph::diameter(dist));
  const ph::Filtration filt = ph::build_rips_filtration(dist, eps, params.max_dim);
  return {ph::compute_persistence(filt), eps};
}

}  // namespace topoboost::topo
