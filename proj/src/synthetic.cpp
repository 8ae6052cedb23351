#include "topoboost/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "topoboost/error.hpp"

namespace topoboost::synthetic {

pipeline::Dataset disks_and_annuli(std::size_t count, std::size_t size, std::uint64_t seed) {
  if (size < 12) throw Error(ErrorCode::InvalidArgument, "images must be at least 12 pixels wide");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double s = static_cast<double>(size);

  pipeline::Dataset data;
  data.class_names = {"annulus", "disk"};
  for (std::size_t i = 0; i < count; ++i) {
    const int label = static_cast<int>(i % 2 == 0 ? 1 : 0);
    const double outer = s * (0.2 + 0.12 * unit(rng));
    const double inner = label == 0 ? outer * (0.45 + 0.15 * unit(rng)) : -1.0;
    const double margin = outer + 1.0;
    const double cr = margin + (s - 2 * margin) * unit(rng);
    const double cc = margin + (s - 2 * margin) * unit(rng);
    const double ink = 0.15 * unit(rng);
    const double background = 0.85 + 0.15 * unit(rng);

    std::vector<double> pixels(size * size);
    for (std::size_t r = 0; r < size; ++r) {
      for (std::size_t c = 0; c < size; ++c) {
        const double dist = std::hypot(static_cast<double>(r) - cr, static_cast<double>(c) - cc);
        pixels[r * size + c] = (dist <= outer && dist >= inner) ? ink : background;
      }
    }
    data.images.emplace_back(size, size, 1, std::move(pixels));
    data.labels.push_back(label);
  }
  return data;
}

Blobs gaussian_blobs(std::size_t count, int classes, std::size_t dims, double separation, std::uint64_t seed) {
  if (classes < 2 || dims < 2) throw Error(ErrorCode::InvalidArgument, "blobs need >= 2 classes and dims");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Blobs out;
  out.x = gbdt::FeatureMatrix(count, dims);
  for (std::size_t i = 0; i < count; ++i) {
    const int c = static_cast<int>(i % static_cast<std::size_t>(classes));
    std::vector<double> centre(dims, 0.0);
    if (classes == 2) {
      centre[0] = separation * c;
    } else {
      const double angle = 2.0 * std::numbers::pi * c / classes;
      centre[0] = separation * std::cos(angle);
      centre[1] = separation * std::sin(angle);
    }
    for (std::size_t d = 0; d < dims; ++d) out.x(i, d) = centre[d] + gauss(rng);
    out.labels.push_back(c);
  }
  return out;
}

}  // namespace topoboost::synthetic
