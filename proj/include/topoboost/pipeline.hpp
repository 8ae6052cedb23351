#pragma once

// Pixel + topology feature fusion, noise injection, metrics and the
// alpha/beta truncation sweep.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topoboost/gbdt.hpp"
#include "topoboost/image.hpp"
#include "topoboost/image_topo.hpp"

namespace topoboost::pipeline {

/// Row-major (channel-interleaved) prefix of length min(beta, H*W*C).
std::vector<double> flatten_pixels(const Image& img, std::size_t beta);
std::vector<double> flatten_pixels(const GrayImage& img, std::size_t beta);

/// [pixels..., topo...]
std::vector<double> fuse(std::span<const double> pixels, std::span<const double> topo);

struct NoiseSpec {
  double mean = 0.0;
  double sigma = 0.1;
  std::uint64_t seed = 0;
};

/// The n pre-clip noise values add_gaussian_noise would add.
std::vector<double> gaussian_noise_sample(std::size_t n, const NoiseSpec& spec);

/// Adds i.i.d. N(mean, sigma^2) to every value and clips to [0,1].
Image add_gaussian_noise(const Image& img, const NoiseSpec& spec);

class Averaging {
 public:
  static Averaging binary(int positive_class = 1) { return Averaging(false, positive_class); }
  static Averaging micro() { return Averaging(true, 0); }

  bool is_micro() const noexcept { return micro_; }
  int positive_class() const noexcept { return positive_; }

 private:
  Averaging(bool micro, int positive) : micro_(micro), positive_(positive) {}
  bool micro_;
  int positive_;
};

struct EvalReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::vector<std::vector<std::size_t>> confusion;  // [truth][predicted]
};

/// Precision, recall and F1 are 0 whenever their denominator is 0. Under micro
/// averaging all four metrics equal the accuracy exactly.
/// Throws LengthMismatch, EmptyInput, InvalidArgument (negative label).
EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth, Averaging averaging);

struct Dataset {
  std::vector<Image> images;
  std::vector<int> labels;
  std::vector<std::string> class_names;

  std::size_t size() const noexcept { return images.size(); }
  int num_class() const noexcept { return static_cast<int>(class_names.size()); }
};

enum class NoiseTarget { Both, TestOnly };

struct ExperimentConfig {
  std::string dataset;
  topo::TopoParams topo;
  std::vector<double> alpha_fractions{0.2, 0.4, 0.6, 0.8, 1.0};
  std::size_t beta_step = 1000;
  std::vector<std::size_t> betas;  // explicit grid; empty means step grid
  std::optional<NoiseSpec> noise;  // NoiseSpec::seed is ignored, see noise_seed()
  NoiseTarget noise_target = NoiseTarget::Both;
  gbdt::TrainParams train;         // objective is chosen from the class count
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  unsigned workers = 0;

  void validate() const;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

/// Seed of the noise added to dataset image `index`.
std::uint64_t noise_seed(std::uint64_t seed, std::size_t index);

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Per class, round(train_fraction * count) samples (at least one per side
/// when the class has two or more) go to train after a seeded shuffle.
Split stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed);

/// Full-length pixel and topological vectors of every image.
struct ExtractedFeatures {
  std::vector<std::vector<double>> pixels;
  std::vector<std::vector<double>> topo;  // all padded to topo_length
  std::size_t topo_length = 0;            // max over images of 2 * pair count
};

/// Applies the configured noise to the selected images, then extracts both
/// streams. Output order follows the dataset order for any worker count.
ExtractedFeatures extract_features(const Dataset& data, const ExperimentConfig& cfg, const Split& split);

/// Pixel and diagram features of one (already noisy) image, untruncated.
struct ImageFeatures {
  std::vector<double> pixels;
  topo::ImageDiagrams diagrams;
};
ImageFeatures image_features(const Image& img, const topo::TopoParams& params);

/// Rows `rows` of the fused matrix: pixel prefix beta, then topo prefix alpha
/// (zero padded past topo_length).
gbdt::FeatureMatrix assemble(const ExtractedFeatures& features, std::span<const std::size_t> rows,
                             std::size_t alpha, std::size_t beta);

std::vector<std::size_t> alpha_grid(std::span<const double> fractions, std::size_t topo_length);
std::vector<std::size_t> beta_grid(std::size_t step, std::span<const std::size_t> explicit_betas,
                                   std::size_t pixel_length);

gbdt::Objective objective_for(int num_class);
Averaging averaging_for(int num_class);

enum class Mode { PixelOnly, Fused };

struct GridRow {
  std::size_t alpha = 0;
  std::size_t beta = 0;
  Mode mode = Mode::Fused;
  EvalReport report;
  gbdt::BoostedEnsemble model;
};

struct ExperimentReport {
  std::vector<GridRow> rows;   // per beta: the pixel-only row, then fused rows by alpha
  std::size_t best_fused = 0;  // index into rows
  std::size_t baseline = 0;    // pixel-only row at the best fused beta
  std::size_t topo_length = 0;
  std::size_t pixel_length = 0;
  Split split;
};

/// Throws EmptyDataset, SingleClassDataset, ShapeMismatch.
ExperimentReport run_experiment(const Dataset& data, const ExperimentConfig& cfg);

/// CSV: alpha,beta,mode,accuracy,precision,recall,f1
std::string report_csv(const ExperimentReport& report);

}  // namespace topoboost::pipeline
