#include "topoboost/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "json.hpp"
#include "topoboost/error.hpp"
#include "topoboost/formats.hpp"
#include "topoboost/parallel.hpp"
#include "topoboost/seed.hpp"

namespace topoboost::pipeline {

std::vector<double> flatten_pixels(const Image& img, std::size_t beta) {
  auto data = img.data();
  const std::size_t n = std::min(beta, data.size());
  return {data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<double> flatten_pixels(const GrayImage& img, std::size_t beta) {
  auto data = img.data();
  const std::size_t n = std::min(beta, data.size());
  return {data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<double> fuse(std::span<const double> pixels, std::span<const double> topo) {
  std::vector<double> out;
  out.reserve(pixels.size() + topo.size());
  out.insert(out.end(), pixels.begin(), pixels.end());
  out.insert(out.end(), topo.begin(), topo.end());
  return out;
}

std::vector<double> gaussian_noise_sample(std::size_t n, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> standard(0.0, 1.0);
  std::vector<double> out(n);
  for (double& v : out) v = spec.mean + spec.sigma * standard(rng);
  return out;
}

Image add_gaussian_noise(const Image& img, const NoiseSpec& spec) {
  const std::vector<double> noise = gaussian_noise_sample(img.size(), spec);
  std::vector<double> data(img.data().begin(), img.data().end());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::clamp(data[i] + noise[i], 0.0, 1.0);
  return Image(img.height(), img.width(), img.channels(), std::move(data));
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport evaluate(std::span<const int> predicted, std::span<const int> truth, Averaging averaging) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::LengthMismatch, "predicted and true label counts differ");
  }
  if (truth.empty()) throw Error(ErrorCode::EmptyInput, "no labels to evaluate");
  int top = averaging.is_micro() ? 0 : averaging.positive_class();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] < 0 || truth[i] < 0) throw Error(ErrorCode::InvalidArgument, "labels must be >= 0");
    top = std::max({top, predicted[i], truth[i]});
  }
  const auto k = static_cast<std::size_t>(top) + 1;
  EvalReport r;
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++r.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
  }

  const std::size_t n = truth.size();
  if (averaging.is_micro()) {
    std::size_t correct = 0;
    for (std::size_t c = 0; c < k; ++c) correct += r.confusion[c][c];
    const std::size_t wrong = n - correct;
    r.tp = correct;
    r.fp = wrong;
    r.fn = wrong;
    r.tn = k * n - correct - 2 * wrong;
  } else {
    const auto p = static_cast<std::size_t>(averaging.positive_class());
    for (std::size_t t = 0; t < k; ++t) {
      for (std::size_t q = 0; q < k; ++q) {
        const std::size_t c = r.confusion[t][q];
        if (t == p && q == p) r.tp += c;
        else if (q == p) r.fp += c;
        else if (t == p) r.fn += c;
        else r.tn += c;
      }
    }
  }
  // F1 from counts: equals 2PR/(P+R) and is exactly rounded.
  r.accuracy = averaging.is_micro() ? ratio(r.tp, n) : ratio(r.tp + r.tn, n);
  r.precision = ratio(r.tp, r.tp + r.fp);
  r.recall = ratio(r.tp, r.tp + r.fn);
  r.f1 = ratio(2 * r.tp, 2 * r.tp + r.fp + r.fn);
  return r;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (alpha_fractions.empty()) fail("alpha grid is empty");
  for (double f : alpha_fractions) {
    if (!(f > 0.0 && f <= 1.0)) fail("alpha fractions must lie in (0,1]");
  }
  if (betas.empty() && beta_step == 0) fail("beta_step must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) fail("train_fraction must lie in (0,1)");
  if (!(topo.tau >= 0.0 && topo.tau <= 1.0)) fail("tau must lie in [0,1]");
  if (topo.max_points == 0) fail("max_points must be >= 1");
  if (topo.max_dim != 1 && topo.max_dim != 2) fail("max_dim must be 1 or 2");
  if (topo.eps_max && !(*topo.eps_max >= 0.0)) fail("eps_max must be >= 0");
  if (noise && !(noise->sigma >= 0.0)) fail("sigma must be >= 0");
  train.validate();
}

namespace {

using nlohmann::json;

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const char* where) {
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw Error(ErrorCode::ParseError, std::string("unknown key '") + item.key() + "' in " + where);
    }
  }
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  ExperimentConfig cfg;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
    reject_unknown(j,
                   {"dataset", "tau", "max_points", "eps_max", "max_dim", "alpha_fractions", "beta_step",
                    "betas", "noise", "noise_target", "train", "train_fraction", "seed", "workers"},
                   "config");
    read_key(j, "dataset", cfg.dataset);
    read_key(j, "tau", cfg.topo.tau);
    read_key(j, "max_points", cfg.topo.max_points);
    if (j.contains("eps_max") && !j.at("eps_max").is_null()) cfg.topo.eps_max = j.at("eps_max").get<double>();
    read_key(j, "max_dim", cfg.topo.max_dim);
    read_key(j, "alpha_fractions", cfg.alpha_fractions);
    read_key(j, "beta_step", cfg.beta_step);
    read_key(j, "betas", cfg.betas);
    if (j.contains("noise") && !j.at("noise").is_null()) {
      const json& nj = j.at("noise");
      reject_unknown(nj, {"mean", "sigma"}, "noise");
      NoiseSpec spec;
      read_key(nj, "mean", spec.mean);
      read_key(nj, "sigma", spec.sigma);
      cfg.noise = spec;
    }
    if (j.contains("noise_target")) {
      const auto target = j.at("noise_target").get<std::string>();
      if (target == "both") cfg.noise_target = NoiseTarget::Both;
      else if (target == "test") cfg.noise_target = NoiseTarget::TestOnly;
      else throw Error(ErrorCode::ParseError, "noise_target must be 'both' or 'test'");
    }
    if (j.contains("train")) {
      const json& tj = j.at("train");
      reject_unknown(tj, {"num_trees", "learning_rate", "max_leaves", "min_data_in_leaf", "l2_lambda", "max_bins"},
                     "train");
      read_key(tj, "num_trees", cfg.train.num_trees);
      read_key(tj, "learning_rate", cfg.train.learning_rate);
      read_key(tj, "max_leaves", cfg.train.max_leaves);
      read_key(tj, "min_data_in_leaf", cfg.train.min_data_in_leaf);
      read_key(tj, "l2_lambda", cfg.train.l2_lambda);
      read_key(tj, "max_bins", cfg.train.max_bins);
    }
    read_key(j, "train_fraction", cfg.train_fraction);
    read_key(j, "seed", cfg.seed);
    read_key(j, "workers", cfg.workers);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j{{"dataset", cfg.dataset},
         {"tau", cfg.topo.tau},
         {"max_points", cfg.topo.max_points},
         {"eps_max", cfg.topo.eps_max ? json(*cfg.topo.eps_max) : json(nullptr)},
         {"max_dim", cfg.topo.max_dim},
         {"alpha_fractions", cfg.alpha_fractions},
         {"beta_step", cfg.beta_step},
         {"betas", cfg.betas},
         {"noise", cfg.noise ? json{{"mean", cfg.noise->mean}, {"sigma", cfg.noise->sigma}} : json(nullptr)},
         {"noise_target", cfg.noise_target == NoiseTarget::Both ? "both" : "test"},
         {"train",
          {{"num_trees", cfg.train.num_trees},
           {"learning_rate", cfg.train.learning_rate},
           {"max_leaves", cfg.train.max_leaves},
           {"min_data_in_leaf", cfg.train.min_data_in_leaf},
           {"l2_lambda", cfg.train.l2_lambda},
           {"max_bins", cfg.train.max_bins}}},
         {"train_fraction", cfg.train_fraction},
         {"seed", cfg.seed},
         {"workers", cfg.workers}};
  return j.dump(2) + "\n";
}

std::uint64_t noise_seed(std::uint64_t seed, std::size_t index) {
  return derive_seed(derive_seed(seed, SeedStream::Noise), static_cast<std::uint64_t>(index));
}

Split stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train_fraction must lie in (0,1)");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  std::mt19937_64 rng(seed);
  Split split;
  for (auto& [label, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
    if (members.size() >= 2) n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
    else n_train = members.size();
    split.train.insert(split.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.insert(split.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

ImageFeatures image_features(const Image& img, const topo::TopoParams& params) {
  ImageFeatures f;
  f.pixels = flatten_pixels(img, img.size());
  f.diagrams = topo::image_diagrams(topo::to_grayscale(img), params);
  return f;
}

ExtractedFeatures extract_features(const Dataset& data, const ExperimentConfig& cfg, const Split& split) {
  const std::size_t n = data.size();
  std::vector<bool> noisy(n, cfg.noise.has_value());
  if (cfg.noise && cfg.noise_target == NoiseTarget::TestOnly) {
    std::fill(noisy.begin(), noisy.end(), false);
    for (std::size_t i : split.test) noisy[i] = true;
  }

  std::vector<ImageFeatures> per_image(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    if (noisy[i]) {
      NoiseSpec spec = *cfg.noise;
      spec.seed = noise_seed(cfg.seed, i);
      per_image[i] = image_features(add_gaussian_noise(data.images[i], spec), cfg.topo);
    } else {
      per_image[i] = image_features(data.images[i], cfg.topo);
    }
  });

  ExtractedFeatures out;
  for (const auto& f : per_image) out.topo_length = std::max(out.topo_length, 2 * f.diagrams.pair_count());
  out.pixels.resize(n);
  out.topo.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.pixels[i] = std::move(per_image[i].pixels);
    out.topo[i] = topo::vectorize_diagrams(per_image[i].diagrams.diagrams, out.topo_length,
                                           per_image[i].diagrams.eps_max);
  }
  return out;
}

gbdt::FeatureMatrix assemble(const ExtractedFeatures& features, std::span<const std::size_t> rows,
                             std::size_t alpha, std::size_t beta) {
  gbdt::FeatureMatrix x;
  for (std::size_t r : rows) {
    const auto& pix = features.pixels[r];
    const auto& top = features.topo[r];
    std::vector<double> topo_part(alpha, 0.0);
    std::copy_n(top.begin(), std::min(alpha, top.size()), topo_part.begin());
    x.push_row(fuse(std::span(pix).first(std::min(beta, pix.size())), topo_part));
  }
  return x;
}

std::vector<std::size_t> alpha_grid(std::span<const double> fractions, std::size_t topo_length) {
  std::vector<std::size_t> out;
  for (double f : fractions) {
    const auto a = static_cast<std::size_t>(std::llround(f * static_cast<double>(topo_length)));
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

std::vector<std::size_t> beta_grid(std::size_t step, std::span<const std::size_t> explicit_betas,
                                   std::size_t pixel_length) {
  std::vector<std::size_t> out;
  auto add = [&](std::size_t b) {
    b = std::min(b, pixel_length);
    if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
  };
  if (!explicit_betas.empty()) {
    for (std::size_t b : explicit_betas) add(b);
    return out;
  }
  if (step == 0) throw Error(ErrorCode::InvalidArgument, "beta step must be >= 1");
  for (std::size_t b = step; b < pixel_length; b += step) add(b);
  add(pixel_length);
  return out;
}

gbdt::Objective objective_for(int num_class) {
  return num_class == 2 ? gbdt::Objective::binary() : gbdt::Objective::multiclass(num_class);
}

Averaging averaging_for(int num_class) {
  return num_class == 2 ? Averaging::binary(1) : Averaging::micro();
}

namespace {

void check_dataset(const Dataset& data) {
  if (data.size() == 0) throw Error(ErrorCode::EmptyDataset, "dataset is empty");
  if (data.labels.size() != data.size()) throw Error(ErrorCode::LengthMismatch, "one label per image required");
  const std::set<int> present(data.labels.begin(), data.labels.end());
  if (present.size() < 2) throw Error(ErrorCode::SingleClassDataset, "dataset has a single class");
  for (int y : data.labels) {
    if (y < 0 || y >= data.num_class()) throw Error(ErrorCode::LabelOutOfRange, "label outside class list");
  }
  const Image& first = data.images.front();
  for (const Image& img : data.images) {
    if (img.height() != first.height() || img.width() != first.width() || img.channels() != first.channels()) {
      throw Error(ErrorCode::ShapeMismatch, "all images must share height, width and channel count");
    }
  }
}

}  // namespace

ExperimentReport run_experiment(const Dataset& data, const ExperimentConfig& cfg) {
  cfg.validate();
  check_dataset(data);

  ExperimentReport report;
  report.split = stratified_split(data.labels, cfg.train_fraction, derive_seed(cfg.seed, SeedStream::Split));
  const ExtractedFeatures features = extract_features(data, cfg, report.split);
  report.topo_length = features.topo_length;
  report.pixel_length = features.pixels.front().size();

  for (std::size_t beta : beta_grid(cfg.beta_step, cfg.betas, report.pixel_length)) {
    report.rows.push_back({0, beta, Mode::PixelOnly, {}, {}});
    for (std::size_t alpha : alpha_grid(cfg.alpha_fractions, features.topo_length)) {
      report.rows.push_back({alpha, beta, Mode::Fused, {}, {}});
    }
  }

  std::vector<int> y_train, y_test;
  for (std::size_t i : report.split.train) y_train.push_back(data.labels[i]);
  for (std::size_t i : report.split.test) y_test.push_back(data.labels[i]);

  gbdt::TrainParams params = cfg.train;
  params.objective = objective_for(data.num_class());
  params.seed = cfg.seed;
  params.workers = 1;
  const Averaging averaging = averaging_for(data.num_class());

  parallel_for(report.rows.size(), cfg.workers, [&](std::size_t c) {
    GridRow& row = report.rows[c];
    const gbdt::FeatureMatrix x_train = assemble(features, report.split.train, row.alpha, row.beta);
    const gbdt::FeatureMatrix x_test = assemble(features, report.split.test, row.alpha, row.beta);
    row.model = gbdt::train(x_train, y_train, params);
    row.report = evaluate(gbdt::predict_labels(row.model, x_test), y_test, averaging);
  });

  bool found = false;
  for (std::size_t c = 0; c < report.rows.size(); ++c) {
    if (report.rows[c].mode != Mode::Fused) continue;
    if (!found || report.rows[c].report.accuracy > report.rows[report.best_fused].report.accuracy) {
      report.best_fused = c;
      found = true;
    }
  }
  for (std::size_t c = 0; c < report.rows.size(); ++c) {
    if (report.rows[c].mode == Mode::PixelOnly && report.rows[c].beta == report.rows[report.best_fused].beta) {
      report.baseline = c;
    }
  }
  return report;
}

std::string report_csv(const ExperimentReport& report) {
  std::string out = "alpha,beta,mode,accuracy,precision,recall,f1\n";
  for (const GridRow& row : report.rows) {
    out += std::to_string(row.alpha) + "," + std::to_string(row.beta) + "," +
           (row.mode == Mode::PixelOnly ? "pixel_only" : "fused") + "," +
           formats::format_number(row.report.accuracy) + "," + formats::format_number(row.report.precision) +
           "," + formats::format_number(row.report.recall) + "," + formats::format_number(row.report.f1) + "\n";
  }
  return out;
}

}  // namespace topoboost::pipeline
