#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "topoboost/pipeline.hpp"

namespace topoboost::dataset {

struct ClassEntry {
  std::string name;
  int label = 0;
  std::vector<std::filesystem::path> files;
};

/// root/<class_name>/*.{png,bmp}; classes and files in byte-wise name order,
/// labels 0..K-1 in class order.
struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ClassEntry> classes;

  std::size_t sample_count() const;
};

/// Throws NoClasses when root has no class directory, IoError when root is
/// missing, EmptyDataset when a class directory holds no images.
DatasetManifest ingest_dataset(const std::filesystem::path& root);

/// Decodes every file; UnreadableImage lists all offending paths.
pipeline::Dataset load_dataset(const DatasetManifest& manifest);

}  // namespace topoboost::dataset
