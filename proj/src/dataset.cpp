#include "topoboost/dataset.hpp"

#include <algorithm>

#include "topoboost/codec.hpp"
#include "topoboost/error.hpp"

namespace topoboost::dataset {

namespace fs = std::filesystem;

std::size_t DatasetManifest::sample_count() const {
  std::size_t n = 0;
  for (const auto& c : classes) n += c.files.size();
  return n;
}

namespace {

bool name_less(const fs::path& a, const fs::path& b) {
  return a.filename().string() < b.filename().string();
}

}  // namespace

DatasetManifest ingest_dataset(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::IoError, "dataset root is not a directory: " + root.string());

  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  if (dirs.empty()) throw Error(ErrorCode::NoClasses, "no class directories under " + root.string());
  std::sort(dirs.begin(), dirs.end(), name_less);

  DatasetManifest manifest;
  manifest.root = root;
  for (const auto& dir : dirs) {
    ClassEntry entry;
    entry.name = dir.filename().string();
    entry.label = static_cast<int>(manifest.classes.size());
    for (const auto& f : fs::directory_iterator(dir)) {
      if (f.is_regular_file() && codec::is_image_path(f.path())) entry.files.push_back(f.path());
    }
    if (entry.files.empty()) {
      throw Error(ErrorCode::EmptyDataset, "class directory has no .png/.bmp images: " + dir.string());
    }
    std::sort(entry.files.begin(), entry.files.end(), name_less);
    manifest.classes.push_back(std::move(entry));
  }
  return manifest;
}

pipeline::Dataset load_dataset(const DatasetManifest& manifest) {
  pipeline::Dataset data;
  std::vector<std::string> offenders;
  for (const auto& c : manifest.classes) {
    data.class_names.push_back(c.name);
    for (const auto& file : c.files) {
      try {
        data.images.push_back(codec::read_image(file));
        data.labels.push_back(c.label);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UnreadableImage) throw;
        offenders.push_back(file.string());
      }
    }
  }
  if (!offenders.empty()) {
    std::string msg = "unreadable image(s):";
    for (const auto& o : offenders) msg += " " + o;
    throw Error(ErrorCode::UnreadableImage, msg);
  }
  return data;
}

}  // namespace topoboost::dataset
