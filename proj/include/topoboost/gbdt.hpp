#pragma once

// Histogram-binned, leaf-wise gradient boosted trees for binary and
// multiclass classification.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace topoboost::gbdt {

/// Dense row-major matrix of finite feature values.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols);
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> values() const noexcept { return values_; }

  /// Appends one row; the first row fixes the column count when empty.
  void push_row(std::span<const double> row);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Bin of v: number of boundaries <= v, so bin b covers [boundary[b-1], boundary[b]).
std::uint32_t bin_of(std::span<const double> boundaries, double v);

struct BinnedDataset {
  std::size_t rows = 0;
  std::size_t max_bins = 0;
  std::vector<std::vector<double>> boundaries;  // per feature, strictly increasing
  std::vector<std::uint32_t> bins;              // feature-major: bins[f * rows + r]

  std::size_t cols() const noexcept { return boundaries.size(); }
  std::size_t bin_count(std::size_t feature) const { return boundaries[feature].size() + 1; }
  std::uint32_t bin(std::size_t feature, std::size_t row) const { return bins[feature * rows + row]; }
};

/// Quantile boundaries over each feature's distinct values, at most max_bins
/// bins per feature. Throws NonFiniteFeature on NaN/inf.
BinnedDataset bin_features(const FeatureMatrix& x, std::size_t max_bins);

/// Bins x with boundaries fixed elsewhere (prediction time).
BinnedDataset apply_bins(const FeatureMatrix& x, const std::vector<std::vector<double>>& boundaries);

class Objective {
 public:
  enum class Kind { Binary, Multiclass };

  static Objective binary() { return Objective(Kind::Binary, 2); }
  /// Throws InvalidArgument for num_class < 2.
  static Objective multiclass(int num_class);

  Kind kind() const noexcept { return kind_; }
  int num_class() const noexcept { return num_class_; }
  /// Trees grown per boosting round and raw scores per row.
  int num_outputs() const noexcept { return kind_ == Kind::Binary ? 1 : num_class_; }
  std::string name() const { return kind_ == Kind::Binary ? "binary" : "multiclass"; }

  friend bool operator==(const Objective&, const Objective&) = default;

 private:
  Objective(Kind kind, int num_class) : kind_(kind), num_class_(num_class) {}
  Kind kind_;
  int num_class_;
};

struct TrainParams {
  int num_trees = 100;
  double learning_rate = 0.1;
  int max_leaves = 31;
  int min_data_in_leaf = 20;
  double l2_lambda = 1.0;
  std::size_t max_bins = 256;
  Objective objective = Objective::binary();
  std::uint64_t seed = 0;
  unsigned workers = 1;  // histogram threads; never changes the model

  void validate() const;
};

struct Gradients {
  std::vector<double> grad;  // row-major rows x num_outputs
  std::vector<double> hess;
};

/// Log-loss gradients and hessians w.r.t. raw scores (rows x num_outputs).
/// Throws LabelOutOfRange.
Gradients loss_grad(const Objective& objective, std::span<const double> raw_scores,
                    std::span<const int> labels);

/// Second-order gain; a term whose denominator is 0 contributes 0.
double split_gain(double g_left, double h_left, double g_right, double h_right, double l2_lambda);

/// -G/(H+lambda), 0 when the denominator is 0.
double leaf_output(double g, double h, double l2_lambda);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  std::uint32_t bin_threshold = 0;  // rows with bin <= threshold go left
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  std::span<const TreeNode> nodes() const noexcept { return nodes_; }
  std::size_t leaf_count() const;

  /// Node index of the leaf that row lands in.
  int leaf_index(const BinnedDataset& data, std::size_t row) const;
  double predict(const BinnedDataset& data, std::size_t row) const {
    return nodes_[static_cast<std::size_t>(leaf_index(data, row))].leaf_value;
  }

 private:
  std::vector<TreeNode> nodes_;  // root at index 0
};

/// Best-first growth: split the leaf with the largest positive gain until
/// max_leaves is reached. Ties go to the lower feature, then the lower bin.
/// Throws EmptyDataset.
RegressionTree grow_tree(const BinnedDataset& data, std::span<const double> gradients,
                         std::span<const double> hessians, const TrainParams& params);

struct BoostedEnsemble {
  Objective objective = Objective::binary();
  std::vector<double> base_scores;  // one per output
  double learning_rate = 0.1;
  std::size_t num_features = 0;
  std::vector<std::vector<double>> bin_boundaries;
  std::vector<RegressionTree> trees;  // round-major, num_outputs per round
};

/// Throws EmptyDataset, LengthMismatch, LabelOutOfRange, SingleClassDataset.
BoostedEnsemble train(const FeatureMatrix& x, std::span<const int> labels, const TrainParams& params);

/// Raw scores, rows x num_outputs.
std::vector<double> raw_scores(const BoostedEnsemble& model, const FeatureMatrix& x);

/// Class probabilities, rows x num_class (two columns for binary).
/// Throws FeatureCountMismatch.
FeatureMatrix predict_proba(const BoostedEnsemble& model, const FeatureMatrix& x);

/// argmax of predict_proba; the lower class wins ties.
std::vector<int> predict_labels(const BoostedEnsemble& model, const FeatureMatrix& x);

/// Mean log loss of the model's probabilities.
double log_loss(const BoostedEnsemble& model, const FeatureMatrix& x, std::span<const int> labels);

/// Model document (JSON). load_model(save_model(m)) predicts bit-identically.
std::string save_model(const BoostedEnsemble& model);
BoostedEnsemble load_model(const std::string& json_text);

}  // namespace topoboost::gbdt
