#include "topoboost/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "topoboost/codec.hpp"
#include "topoboost/dataset.hpp"
#include "topoboost/error.hpp"
#include "topoboost/formats.hpp"
#include "topoboost/image_topo.hpp"
#include "topoboost/pipeline.hpp"
#include "topoboost/plot.hpp"
#include "topoboost/seed.hpp"

namespace topoboost::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kSeedHelp =
    "Randomness: every stochastic step derives its seed from --seed.\n"
    "  stream seed = mix64(seed ^ mix64(stream)), mix64 = SplitMix64 finalizer,\n"
    "  streams: noise=1, split=2, sampling=3.\n"
    "  Image i of a dataset is perturbed with seed mix64(noise_seed ^ mix64(i)).\n"
    "Exit status: 0 success, 1 usage error, 2 data or I/O error.";

struct TopoFlags {
  double tau = 0.5;
  std::size_t max_points = 100;
  std::optional<double> eps_max;
  int max_dim = 2;

  void attach(CLI::App* app) {
    app->add_option("--tau", tau, "Foreground threshold: pixels darker than tau become points")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--max-points", max_points, "Farthest-point sampling cap on the point cloud")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--eps-max", eps_max, "Rips threshold (default: cloud diameter)")->check(CLI::NonNegativeNumber);
    app->add_option("--max-dim", max_dim, "Largest simplex dimension; H_k is reported for k < max-dim")
        ->capture_default_str()
        ->check(CLI::IsMember({1, 2}));
  }

  topo::TopoParams params() const { return {tau, max_points, eps_max, max_dim}; }
};

struct TrainFlags {
  int num_trees = 100;
  double learning_rate = 0.1;
  int max_leaves = 31;
  int min_leaf = 20;
  double lambda = 1.0;
  std::size_t max_bins = 256;

  void attach(CLI::App* app) {
    app->add_option("--num-trees", num_trees, "Boosting rounds")->capture_default_str()->check(CLI::NonNegativeNumber);
    app->add_option("--learning-rate", learning_rate, "Shrinkage")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--max-leaves", max_leaves, "Leaves per tree")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    app->add_option("--min-leaf", min_leaf, "Minimum samples per leaf")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--lambda", lambda, "L2 regularisation on leaf values")->capture_default_str()->check(CLI::NonNegativeNumber);
    app->add_option("--max-bins", max_bins, "Histogram bins per feature")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  }

  void apply(gbdt::TrainParams& p) const {
    p.num_trees = num_trees;
    p.learning_rate = learning_rate;
    p.max_leaves = max_leaves;
    p.min_data_in_leaf = min_leaf;
    p.l2_lambda = lambda;
    p.max_bins = max_bins;
  }
};

ph::PointCloud load_cloud(const fs::path& input, const topo::TopoParams& params) {
  if (codec::is_image_path(input)) {
    return topo::image_to_point_cloud(topo::to_grayscale(codec::read_image(input)), params.tau, params.max_points);
  }
  return formats::parse_point_cloud_csv(formats::read_text(input));
}

topo::ImageDiagrams diagrams_of(const ph::PointCloud& cloud, const topo::TopoParams& params) {
  const ph::DistanceMatrix dist = ph::pairwise_distances(cloud);
  const double eps = params.eps_max.value_or(ph::diameter(dist));
  return {ph::compute_persistence(ph::build_rips_filtration(dist, eps, params.max_dim)), eps};
}

std::string metrics_csv(const pipeline::EvalReport& r) {
  return "accuracy,precision,recall,f1\n" + formats::format_number(r.accuracy) + "," +
         formats::format_number(r.precision) + "," + formats::format_number(r.recall) + "," +
         formats::format_number(r.f1) + "\n";
}

}  // namespace

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"topoboost: topological features + histogram gradient boosting for image classification"};
  app.footer(kSeedHelp);
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  unsigned workers = 0;
  TopoFlags topo_flags;
  TrainFlags train_flags;
  fs::path input, output;

  // extract
  auto* extract = app.add_subcommand("extract", "Write the fused feature CSV of an image dataset");
  std::size_t alpha = 0;
  std::optional<std::size_t> beta;
  std::optional<double> sigma;
  double mean = 0.0;
  std::string split_name = "all";
  std::string noise_target = "both";
  double train_fraction = 0.8;
  extract->add_option("--input", input, "Dataset root (class sub-directories of .png/.bmp)")->required();
  extract->add_option("--out", output, "Feature CSV path")->required();
  topo_flags.attach(extract);
  extract->add_option("--alpha", alpha, "Topological prefix length (0 = pixels only)")->capture_default_str();
  extract->add_option("--beta", beta, "Pixel prefix length (default: all pixels)");
  extract->add_option("--sigma", sigma, "Add Gaussian noise with this standard deviation")->check(CLI::NonNegativeNumber);
  extract->add_option("--mean", mean, "Mean of the Gaussian noise")->capture_default_str();
  extract->add_option("--seed", seed, "Seed for the noise and split streams")->capture_default_str();
  extract->add_option("--split", split_name, "Rows to write")->capture_default_str()->check(CLI::IsMember({"all", "train", "test"}));
  extract->add_option("--train-fraction", train_fraction, "Stratified split train share")->capture_default_str();
  extract->add_option("--noise-target", noise_target, "Images that receive noise")->capture_default_str()->check(CLI::IsMember({"both", "test"}));
  extract->add_option("--workers", workers, "Extraction threads (0 = all cores); output is identical for any value");

  // train
  auto* train = app.add_subcommand("train", "Fit a boosted ensemble on a feature CSV");
  std::string objective = "auto";
  train->add_option("--input", input, "Feature CSV")->required();
  train->add_option("--out", output, "Model JSON path")->required();
  train_flags.attach(train);
  train->add_option("--objective", objective, "binary, multiclass, or auto (from the label count)")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "binary", "multiclass"}));
  train->add_option("--seed", seed, "Recorded for reproducibility; training itself is deterministic")->capture_default_str();
  train->add_option("--workers", workers, "Histogram threads; the model is identical for any value");

  // predict
  auto* predict = app.add_subcommand("predict", "Score a feature CSV with a saved model");
  fs::path model_path;
  predict->add_option("--model", model_path, "Model JSON")->required();
  predict->add_option("--input", input, "Feature CSV")->required();
  predict->add_option("--out", output, "Prediction CSV path")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Accuracy, precision, recall and F1 of a prediction CSV");
  int positive_class = 1;
  eval->add_option("--input", input, "Prediction CSV")->required();
  eval->add_option("--out", output, "Metrics CSV path (default: stdout)");
  eval->add_option("--positive-class", positive_class, "Positive label for two-class files")->capture_default_str();

  // noise
  auto* noise = app.add_subcommand("noise", "Add clipped Gaussian noise to one image");
  double noise_sigma = 0.1;
  noise->add_option("--input", input, "Input .png/.bmp")->required();
  noise->add_option("--out", output, "Output .png/.bmp")->required();
  noise->add_option("--sigma", noise_sigma, "Noise standard deviation on the [0,1] scale")->capture_default_str()->check(CLI::NonNegativeNumber);
  noise->add_option("--mean", mean, "Noise mean")->capture_default_str();
  noise->add_option("--seed", seed, "Seed (noise stream, image index 0)")->capture_default_str();

  // pd-plot
  auto* pd_plot = app.add_subcommand("pd-plot", "Persistence diagram of a point CSV or image as SVG");
  fs::path diagram_out;
  pd_plot->add_option("--input", input, "Point CSV (x,y) or .png/.bmp image")->required();
  pd_plot->add_option("--out", output, "SVG path")->required();
  pd_plot->add_option("--diagram-out", diagram_out, "Also write the diagram CSV (dim,birth,death)");
  topo_flags.attach(pd_plot);
  pd_plot->add_option("--seed", seed, "Unused; accepted for uniformity");

  // betti
  auto* betti = app.add_subcommand("betti", "Betti curve of a point CSV or image");
  int betti_dim = 0;
  std::size_t steps = 50;
  betti->add_option("--input", input, "Point CSV (x,y) or .png/.bmp image")->required();
  betti->add_option("--out", output, "Curve CSV path (t,count)")->required();
  betti->add_option("--dim", betti_dim, "Homology dimension")->capture_default_str()->check(CLI::IsMember({0, 1}));
  betti->add_option("--steps", steps, "Grid points spread evenly over [0, eps-max]")->capture_default_str()->check(CLI::PositiveNumber);
  topo_flags.attach(betti);
  betti->add_option("--seed", seed, "Unused; accepted for uniformity");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run the alpha/beta truncation sweep from a JSON config");
  fs::path config_path;
  std::optional<std::uint64_t> exp_seed;
  std::optional<unsigned> exp_workers;
  fs::path exp_input;
  fs::path exp_out = ".";
  experiment->add_option("--config", config_path, "Experiment config JSON")->required();
  experiment->add_option("--input", exp_input, "Dataset root (overrides the config)");
  experiment->add_option("--out", exp_out, "Directory for report.csv, best_model.json, baseline_model.json, summary.json")
      ->capture_default_str();
  experiment->add_option("--seed", exp_seed, "Overrides the config seed");
  experiment->add_option("--workers", exp_workers, "Overrides the config worker count; results do not change");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help("", CLI::AppFormatMode::All) : app.help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (extract->parsed()) {
      const dataset::DatasetManifest manifest = dataset::ingest_dataset(input);
      const pipeline::Dataset data = dataset::load_dataset(manifest);
      if (data.size() == 0) throw Error(ErrorCode::EmptyDataset, "empty dataset");
      pipeline::ExperimentConfig cfg;
      cfg.topo = topo_flags.params();
      cfg.seed = seed;
      cfg.workers = workers;
      cfg.train_fraction = train_fraction;
      if (sigma) cfg.noise = pipeline::NoiseSpec{mean, *sigma, 0};
      cfg.noise_target = noise_target == "test" ? pipeline::NoiseTarget::TestOnly : pipeline::NoiseTarget::Both;
      cfg.validate();
      const pipeline::Split split =
          pipeline::stratified_split(data.labels, cfg.train_fraction, derive_seed(cfg.seed, SeedStream::Split));
      const pipeline::ExtractedFeatures features = pipeline::extract_features(data, cfg, split);
      std::vector<std::size_t> rows;
      if (split_name == "train") rows = split.train;
      else if (split_name == "test") rows = split.test;
      else for (std::size_t i = 0; i < data.size(); ++i) rows.push_back(i);
      std::vector<int> labels;
      for (std::size_t i : rows) labels.push_back(data.labels[i]);
      const gbdt::FeatureMatrix x =
          pipeline::assemble(features, rows, alpha, beta.value_or(features.pixels.front().size()));
      formats::write_text(output, formats::feature_csv(labels, x));
      out << "wrote " << rows.size() << " rows x " << x.cols() << " features (topological length "
          << features.topo_length << ") to " << output.string() << "\n";
    } else if (train->parsed()) {
      const formats::LabeledMatrix data = formats::parse_feature_csv(formats::read_text(input));
      if (data.labels.empty()) throw Error(ErrorCode::EmptyDataset, "empty dataset");
      gbdt::TrainParams params;
      train_flags.apply(params);
      params.seed = seed;
      params.workers = workers;
      const int top = *std::max_element(data.labels.begin(), data.labels.end());
      if (objective == "binary") params.objective = gbdt::Objective::binary();
      else if (objective == "multiclass") params.objective = gbdt::Objective::multiclass(std::max(top + 1, 2));
      else params.objective = pipeline::objective_for(std::max(top + 1, 2));
      const gbdt::BoostedEnsemble model = gbdt::train(data.features, data.labels, params);
      formats::write_text(output, gbdt::save_model(model));
      out << "trained " << model.trees.size() << " trees on " << data.labels.size() << " rows\n";
    } else if (predict->parsed()) {
      const gbdt::BoostedEnsemble model = gbdt::load_model(formats::read_text(model_path));
      const formats::LabeledMatrix data = formats::parse_feature_csv(formats::read_text(input));
      const gbdt::FeatureMatrix x = data.labels.empty() ? gbdt::FeatureMatrix(0, model.num_features) : data.features;
      const gbdt::FeatureMatrix proba = gbdt::predict_proba(model, x);
      formats::write_text(output, formats::prediction_csv(data.labels, gbdt::predict_labels(model, x), proba));
    } else if (eval->parsed()) {
      const formats::Predictions p = formats::parse_prediction_csv(formats::read_text(input));
      const pipeline::Averaging averaging =
          p.num_class == 2 ? pipeline::Averaging::binary(positive_class) : pipeline::Averaging::micro();
      const std::string csv = metrics_csv(pipeline::evaluate(p.predicted, p.labels, averaging));
      if (output.empty()) out << csv;
      else formats::write_text(output, csv);
    } else if (noise->parsed()) {
      const Image img = codec::read_image(input);
      codec::write_image(output, pipeline::add_gaussian_noise(img, {mean, noise_sigma, pipeline::noise_seed(seed, 0)}));
    } else if (pd_plot->parsed()) {
      const topo::TopoParams params = topo_flags.params();
      const topo::ImageDiagrams d = diagrams_of(load_cloud(input, params), params);
      plot::emit_persistence_svg(d.diagrams, plot::fit_plot_spec(d.diagrams, d.eps_max), output);
      if (!diagram_out.empty()) formats::write_text(diagram_out, formats::diagram_csv(d.diagrams));
    } else if (betti->parsed()) {
      topo::TopoParams params = topo_flags.params();
      if (betti_dim >= params.max_dim) throw Error(ErrorCode::InvalidArgument, "--dim must be below --max-dim");
      const topo::ImageDiagrams d = diagrams_of(load_cloud(input, params), params);
      std::vector<double> grid;
      if (steps == 1 || d.eps_max == 0.0) {
        grid.push_back(0.0);
      } else {
        for (std::size_t i = 0; i < steps; ++i) {
          grid.push_back(d.eps_max * static_cast<double>(i) / static_cast<double>(steps - 1));
        }
      }
      formats::write_text(output, formats::betti_csv(topo::betti_curve(d.diagrams[static_cast<std::size_t>(betti_dim)], grid)));
    } else if (experiment->parsed()) {
      pipeline::ExperimentConfig cfg = pipeline::config_from_json(formats::read_text(config_path));
      if (!exp_input.empty()) cfg.dataset = exp_input.string();
      if (exp_seed) cfg.seed = *exp_seed;
      if (exp_workers) cfg.workers = *exp_workers;
      if (cfg.dataset.empty()) throw Error(ErrorCode::InvalidArgument, "no dataset given (config 'dataset' or --input)");
      fs::path root = cfg.dataset;
      if (root.is_relative() && !fs::exists(root)) root = config_path.parent_path() / root;
      const pipeline::Dataset data = dataset::load_dataset(dataset::ingest_dataset(root));
      const pipeline::ExperimentReport report = pipeline::run_experiment(data, cfg);

      fs::create_directories(exp_out);
      formats::write_text(exp_out / "report.csv", pipeline::report_csv(report));
      formats::write_text(exp_out / "best_model.json", gbdt::save_model(report.rows[report.best_fused].model));
      formats::write_text(exp_out / "baseline_model.json", gbdt::save_model(report.rows[report.baseline].model));
      const auto& best = report.rows[report.best_fused];
      const auto& base = report.rows[report.baseline];
      nlohmann::json summary{{"seed", cfg.seed},
                             {"topo_length", report.topo_length},
                             {"pixel_length", report.pixel_length},
                             {"best_fused", {{"alpha", best.alpha}, {"beta", best.beta}, {"accuracy", best.report.accuracy}}},
                             {"pixel_only", {{"beta", base.beta}, {"accuracy", base.report.accuracy}}}};
      formats::write_text(exp_out / "summary.json", summary.dump(2) + "\n");
      out << "best fused alpha=" << best.alpha << " beta=" << best.beta
          << " accuracy=" << formats::format_number(best.report.accuracy)
          << "; pixel-only accuracy=" << formats::format_number(base.report.accuracy) << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace topoboost::cli
