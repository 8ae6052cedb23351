#include "topoboost/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "topoboost/error.hpp"
#include "topoboost/parallel.hpp"

namespace topoboost::gbdt {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw Error(ErrorCode::InvalidArgument, "feature matrix needs rows*cols values");
  }
}

void FeatureMatrix::push_row(std::span<const double> row) {
  if (rows_ == 0 && values_.empty()) cols_ = row.size();
  if (row.size() != cols_) {
    throw Error(ErrorCode::ShapeMismatch, "row has " + std::to_string(row.size()) +
                                              " features, expected " + std::to_string(cols_));
  }
  values_.insert(values_.end(), row.begin(), row.end());
  ++rows_;
}

std::uint32_t bin_of(std::span<const double> boundaries, double v) {
  return static_cast<std::uint32_t>(std::upper_bound(boundaries.begin(), boundaries.end(), v) -
                                    boundaries.begin());
}

namespace {

// A cut strictly above lo and at most hi.
double cut_between(double lo, double hi) {
  const double mid = lo / 2 + hi / 2;
  return mid > lo ? mid : hi;
}

std::vector<double> quantile_boundaries(std::vector<double> values, std::size_t max_bins) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const std::size_t distinct = values.size();
  std::vector<double> cuts;
  if (distinct <= 1) return cuts;
  if (distinct <= max_bins) {
    for (std::size_t i = 1; i < distinct; ++i) cuts.push_back(cut_between(values[i - 1], values[i]));
    return cuts;
  }
  for (std::size_t b = 1; b < max_bins; ++b) {
    const std::size_t i = b * distinct / max_bins;
    cuts.push_back(cut_between(values[i - 1], values[i]));
  }
  return cuts;
}

}  // namespace

BinnedDataset apply_bins(const FeatureMatrix& x, const std::vector<std::vector<double>>& boundaries) {
  if (x.cols() != boundaries.size()) {
    throw Error(ErrorCode::FeatureCountMismatch, "model expects " + std::to_string(boundaries.size()) +
                                                     " features, got " + std::to_string(x.cols()));
  }
  BinnedDataset out;
  out.rows = x.rows();
  out.boundaries = boundaries;
  for (const auto& b : boundaries) out.max_bins = std::max(out.max_bins, b.size() + 1);
  out.bins.resize(x.rows() * x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    for (std::size_t r = 0; r < x.rows(); ++r) out.bins[f * x.rows() + r] = bin_of(boundaries[f], x(r, f));
  }
  return out;
}

BinnedDataset bin_features(const FeatureMatrix& x, std::size_t max_bins) {
  if (max_bins < 2) throw Error(ErrorCode::InvalidArgument, "max_bins must be >= 2");
  for (double v : x.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteFeature, "feature matrix has NaN/inf");
  }
  std::vector<std::vector<double>> boundaries(x.cols());
  std::vector<double> column(x.rows());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    for (std::size_t r = 0; r < x.rows(); ++r) column[r] = x(r, f);
    boundaries[f] = quantile_boundaries(column, max_bins);
  }
  BinnedDataset out = apply_bins(x, boundaries);
  out.max_bins = max_bins;
  return out;
}

Objective Objective::multiclass(int num_class) {
  if (num_class < 2) throw Error(ErrorCode::InvalidArgument, "multiclass needs num_class >= 2");
  return Objective(Kind::Multiclass, num_class);
}

void TrainParams::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (num_trees < 0) fail("num_trees must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be > 0");
  if (max_leaves < 2) fail("max_leaves must be >= 2");
  if (min_data_in_leaf < 1) fail("min_data_in_leaf must be >= 1");
  if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) fail("l2_lambda must be >= 0");
  if (max_bins < 2) fail("max_bins must be >= 2");
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void softmax(std::span<const double> raw, std::span<double> out) {
  const double top = *std::max_element(raw.begin(), raw.end());
  double total = 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    out[k] = std::exp(raw[k] - top);
    total += out[k];
  }
  for (double& p : out) p /= total;
}

void check_labels(const Objective& objective, std::span<const int> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= objective.num_class()) {
      throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(labels[i]) + " at row " +
                                                  std::to_string(i) + " is outside 0.." +
                                                  std::to_string(objective.num_class() - 1));
    }
  }
}

}  // namespace

Gradients loss_grad(const Objective& objective, std::span<const double> raw_scores,
                    std::span<const int> labels) {
  const auto k_out = static_cast<std::size_t>(objective.num_outputs());
  if (raw_scores.size() != labels.size() * k_out) {
    throw Error(ErrorCode::LengthMismatch, "raw score count does not match labels");
  }
  check_labels(objective, labels);
  Gradients g{std::vector<double>(raw_scores.size()), std::vector<double>(raw_scores.size())};
  if (objective.kind() == Objective::Kind::Binary) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const double p = sigmoid(raw_scores[i]);
      g.grad[i] = p - labels[i];
      g.hess[i] = p * (1.0 - p);
    }
    return g;
  }
  std::vector<double> p(k_out);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    softmax(raw_scores.subspan(i * k_out, k_out), p);
    for (std::size_t k = 0; k < k_out; ++k) {
      g.grad[i * k_out + k] = p[k] - (static_cast<std::size_t>(labels[i]) == k ? 1.0 : 0.0);
      g.hess[i * k_out + k] = p[k] * (1.0 - p[k]);
    }
  }
  return g;
}

namespace {

double score_term(double g, double h, double l2_lambda) {
  const double denom = h + l2_lambda;
  return denom == 0.0 ? 0.0 : g * g / denom;
}

}  // namespace

double split_gain(double g_left, double h_left, double g_right, double h_right, double l2_lambda) {
  return score_term(g_left, h_left, l2_lambda) + score_term(g_right, h_right, l2_lambda) -
         score_term(g_left + g_right, h_left + h_right, l2_lambda);
}

double leaf_output(double g, double h, double l2_lambda) {
  const double denom = h + l2_lambda;
  return denom == 0.0 ? 0.0 : -g / denom;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int RegressionTree::leaf_index(const BinnedDataset& data, std::size_t row) const {
  int node = 0;
  while (!nodes_[static_cast<std::size_t>(node)].is_leaf()) {
    const TreeNode& n = nodes_[static_cast<std::size_t>(node)];
    node = data.bin(static_cast<std::size_t>(n.feature), row) <= n.bin_threshold ? n.left : n.right;
  }
  return node;
}

namespace {

struct Split {
  int feature = -1;
  std::uint32_t bin = 0;
  double gain = 0.0;

  bool valid() const { return feature >= 0; }
};

struct Leaf {
  int node = 0;
  std::vector<std::uint32_t> rows;  // ascending
  double g = 0.0;
  double h = 0.0;
  Split best;
};

struct HistBin {
  double g = 0.0;
  double h = 0.0;
  std::size_t count = 0;
};

class SplitFinder {
 public:
  SplitFinder(const BinnedDataset& data, std::span<const double> grad, std::span<const double> hess,
              const TrainParams& params)
      : data_(data), grad_(grad), hess_(hess), params_(params), offsets_(data.cols() + 1, 0) {
    for (std::size_t f = 0; f < data.cols(); ++f) offsets_[f + 1] = offsets_[f] + data.bin_count(f);
    hist_.resize(offsets_.back());
    per_feature_.resize(data.cols());
  }

  // Histograms are accumulated per feature in ascending row order, so the
  // result does not depend on the worker count.
  Split find(const Leaf& leaf) {
    const auto min_leaf = static_cast<std::size_t>(params_.min_data_in_leaf);
    const std::size_t total = leaf.rows.size();
    if (total < 2 * min_leaf) return {};
    parallel_for(data_.cols(), params_.workers, [&](std::size_t f) {
      std::span<HistBin> hist(hist_.data() + offsets_[f], data_.bin_count(f));
      std::fill(hist.begin(), hist.end(), HistBin{});
      for (std::uint32_t r : leaf.rows) {
        HistBin& b = hist[data_.bin(f, r)];
        b.g += grad_[r];
        b.h += hess_[r];
        ++b.count;
      }
      Split best;
      double gl = 0.0, hl = 0.0;
      std::size_t nl = 0;
      for (std::size_t t = 0; t + 1 < hist.size(); ++t) {
        gl += hist[t].g;
        hl += hist[t].h;
        nl += hist[t].count;
        if (nl < min_leaf) continue;
        if (total - nl < min_leaf) break;
        const double gain = split_gain(gl, hl, leaf.g - gl, leaf.h - hl, params_.l2_lambda);
        if (gain > 0.0 && (!best.valid() || gain > best.gain)) {
          best = {static_cast<int>(f), static_cast<std::uint32_t>(t), gain};
        }
      }
      per_feature_[f] = best;
    });
    Split best;
    for (const Split& s : per_feature_) {
      if (s.valid() && (!best.valid() || s.gain > best.gain)) best = s;
    }
    return best;
  }

 private:
  const BinnedDataset& data_;
  std::span<const double> grad_;
  std::span<const double> hess_;
  const TrainParams& params_;
  std::vector<std::size_t> offsets_;
  std::vector<HistBin> hist_;
  std::vector<Split> per_feature_;
};

Leaf make_leaf(int node, std::vector<std::uint32_t> rows, std::span<const double> grad,
               std::span<const double> hess) {
  Leaf leaf;
  leaf.node = node;
  for (std::uint32_t r : rows) {
    leaf.g += grad[r];
    leaf.h += hess[r];
  }
  leaf.rows = std::move(rows);
  return leaf;
}

}  // namespace

RegressionTree grow_tree(const BinnedDataset& data, std::span<const double> gradients,
                         std::span<const double> hessians, const TrainParams& params) {
  params.validate();
  if (data.rows == 0) throw Error(ErrorCode::EmptyDataset, "empty dataset");
  if (gradients.size() != data.rows || hessians.size() != data.rows) {
    throw Error(ErrorCode::LengthMismatch, "gradient/hessian length must equal the row count");
  }

  std::vector<TreeNode> nodes(1);
  std::vector<std::uint32_t> all(data.rows);
  std::iota(all.begin(), all.end(), 0u);

  SplitFinder finder(data, gradients, hessians, params);
  std::vector<Leaf> leaves;
  leaves.push_back(make_leaf(0, std::move(all), gradients, hessians));
  leaves.back().best = finder.find(leaves.back());

  while (leaves.size() < static_cast<std::size_t>(params.max_leaves)) {
    std::size_t pick = leaves.size();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (!leaves[i].best.valid()) continue;
      if (pick == leaves.size() || leaves[i].best.gain > leaves[pick].best.gain) pick = i;
    }
    if (pick == leaves.size()) break;

    Leaf parent = std::move(leaves[pick]);
    const Split split = parent.best;
    std::vector<std::uint32_t> left_rows, right_rows;
    for (std::uint32_t r : parent.rows) {
      (data.bin(static_cast<std::size_t>(split.feature), r) <= split.bin ? left_rows : right_rows).push_back(r);
    }

    const int left_node = static_cast<int>(nodes.size());
    const int right_node = left_node + 1;
    TreeNode& pn = nodes[static_cast<std::size_t>(parent.node)];
    pn.feature = split.feature;
    pn.bin_threshold = split.bin;
    pn.left = left_node;
    pn.right = right_node;
    nodes.resize(nodes.size() + 2);

    leaves[pick] = make_leaf(left_node, std::move(left_rows), gradients, hessians);
    leaves[pick].best = finder.find(leaves[pick]);
    leaves.push_back(make_leaf(right_node, std::move(right_rows), gradients, hessians));
    leaves.back().best = finder.find(leaves.back());
  }

  for (const Leaf& leaf : leaves) {
    nodes[static_cast<std::size_t>(leaf.node)].leaf_value = leaf_output(leaf.g, leaf.h, params.l2_lambda);
  }
  return RegressionTree(std::move(nodes));
}

BoostedEnsemble train(const FeatureMatrix& x, std::span<const int> labels, const TrainParams& params) {
  params.validate();
  if (x.rows() == 0) throw Error(ErrorCode::EmptyDataset, "empty dataset");
  if (labels.size() != x.rows()) {
    throw Error(ErrorCode::LengthMismatch, "label count does not match feature rows");
  }
  const Objective& objective = params.objective;
  check_labels(objective, labels);

  const std::size_t n = x.rows();
  const auto k_out = static_cast<std::size_t>(objective.num_outputs());
  std::vector<std::size_t> class_counts(static_cast<std::size_t>(objective.num_class()), 0);
  for (int y : labels) ++class_counts[static_cast<std::size_t>(y)];

  BoostedEnsemble model;
  model.objective = objective;
  model.learning_rate = params.learning_rate;
  model.num_features = x.cols();
  if (objective.kind() == Objective::Kind::Binary) {
    if (class_counts[0] == 0 || class_counts[1] == 0) {
      throw Error(ErrorCode::SingleClassDataset, "binary objective needs both labels 0 and 1 present");
    }
    const double p = static_cast<double>(class_counts[1]) / static_cast<double>(n);
    model.base_scores = {std::log(p / (1.0 - p))};
  } else {
    for (std::size_t c : class_counts) {
      // Absent classes get a very small prior rather than log(0).
      const double p = std::max(static_cast<double>(c) / static_cast<double>(n), 1e-15);
      model.base_scores.push_back(std::log(p));
    }
  }

  const BinnedDataset binned = bin_features(x, params.max_bins);
  model.bin_boundaries = binned.boundaries;

  std::vector<double> scores(n * k_out);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(model.base_scores.begin(), model.base_scores.end(), scores.begin() + static_cast<std::ptrdiff_t>(i * k_out));
  }

  std::vector<double> g(n), h(n);
  for (int round = 0; round < params.num_trees; ++round) {
    const Gradients grads = loss_grad(objective, scores, labels);
    for (std::size_t k = 0; k < k_out; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        g[i] = grads.grad[i * k_out + k];
        h[i] = grads.hess[i * k_out + k];
      }
      RegressionTree tree = grow_tree(binned, g, h, params);
      for (std::size_t i = 0; i < n; ++i) scores[i * k_out + k] += model.learning_rate * tree.predict(binned, i);
      model.trees.push_back(std::move(tree));
    }
  }
  return model;
}

std::vector<double> raw_scores(const BoostedEnsemble& model, const FeatureMatrix& x) {
  if (x.cols() != model.num_features) {
    throw Error(ErrorCode::FeatureCountMismatch, "model expects " + std::to_string(model.num_features) +
                                                     " features, got " + std::to_string(x.cols()));
  }
  for (double v : x.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteFeature, "feature matrix has NaN/inf");
  }
  const BinnedDataset binned = apply_bins(x, model.bin_boundaries);
  const auto k_out = static_cast<std::size_t>(model.objective.num_outputs());
  std::vector<double> scores(x.rows() * k_out);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t k = 0; k < k_out; ++k) scores[i * k_out + k] = model.base_scores[k];
    // Same accumulation order as training.
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
      scores[i * k_out + t % k_out] += model.learning_rate * model.trees[t].predict(binned, i);
    }
  }
  return scores;
}

FeatureMatrix predict_proba(const BoostedEnsemble& model, const FeatureMatrix& x) {
  const std::vector<double> raw = raw_scores(model, x);
  const auto k = static_cast<std::size_t>(model.objective.num_class());
  FeatureMatrix out(x.rows(), k);
  if (model.objective.kind() == Objective::Kind::Binary) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double p = sigmoid(raw[i]);
      out(i, 0) = 1.0 - p;
      out(i, 1) = p;
    }
    return out;
  }
  std::vector<double> p(k);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    softmax(std::span<const double>(raw).subspan(i * k, k), p);
    for (std::size_t c = 0; c < k; ++c) out(i, c) = p[c];
  }
  return out;
}

std::vector<int> predict_labels(const BoostedEnsemble& model, const FeatureMatrix& x) {
  const FeatureMatrix proba = predict_proba(model, x);
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = proba.row(i);
    out[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

double log_loss(const BoostedEnsemble& model, const FeatureMatrix& x, std::span<const int> labels) {
  if (labels.size() != x.rows()) throw Error(ErrorCode::LengthMismatch, "label count does not match rows");
  if (labels.empty()) throw Error(ErrorCode::EmptyInput, "no rows");
  check_labels(model.objective, labels);
  const FeatureMatrix proba = predict_proba(model, x);
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    total -= std::log(std::max(proba(i, static_cast<std::size_t>(labels[i])), 1e-15));
  }
  return total / static_cast<double>(x.rows());
}

}  // namespace topoboost::gbdt
