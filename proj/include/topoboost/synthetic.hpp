#pragma once

#include <cstddef>
#include <cstdint>

#include "topoboost/gbdt.hpp"
#include "topoboost/pipeline.hpp"

namespace topoboost::synthetic {

/// Dark filled disks (label 1, "disk") and dark annuli (label 0, "annulus") on
/// a light background, size x size single-channel, random centre and radius.
/// Classes alternate so any prefix is balanced.
pipeline::Dataset disks_and_annuli(std::size_t count, std::size_t size, std::uint64_t seed);

struct Blobs {
  gbdt::FeatureMatrix x;
  std::vector<int> labels;
};

/// `classes` isotropic unit-variance Gaussian blobs in `dims` dimensions.
/// Class c is centred at separation * (c along axis 0, 0, ...) for two
/// classes, and on a circle of radius separation in the first two axes
/// otherwise. Samples cycle through the classes.
Blobs gaussian_blobs(std::size_t count, int classes, std::size_t dims, double separation, std::uint64_t seed);

}  // namespace topoboost::synthetic
