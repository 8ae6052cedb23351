// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Thresholds and runtime budgets are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracle/bottleneck.hpp"
#include "oracle/persistence_oracle.hpp"
#include "topoboost/cli.hpp"
#include "topoboost/codec.hpp"
#include "topoboost/formats.hpp"
#include "topoboost/gbdt.hpp"
#include "topoboost/pipeline.hpp"
#include "topoboost/seed.hpp"
#include "topoboost/synthetic.hpp"

using namespace topoboost;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ph::Filtration full_rips(const ph::PointCloud& cloud, int max_dim = 2) {
  const ph::DistanceMatrix d = ph::pairwise_distances(cloud);
  return ph::build_rips_filtration(d, ph::diameter(d), max_dim);
}

ph::PointCloud uniform_cloud(std::mt19937_64& rng, std::size_t max_points) {
  std::uniform_int_distribution<std::size_t> count(1, max_points);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ph::Point> pts(count(rng));
  for (auto& p : pts) p = {unit(rng), unit(rng)};
  return ph::PointCloud(std::move(pts));
}

// Sorted H1 persistences, largest first.
std::vector<double> h1_persistence(const std::vector<ph::PersistenceDiagram>& diags, double eps_max) {
  std::vector<double> out;
  for (const auto& p : diags[1].pairs) out.push_back(ph::persistence_value(p, eps_max));
  std::sort(out.rbegin(), out.rend());
  return out;
}

// ---------------------------------------------------------------------------

Outcome persistence_oracle_equivalence() {
  std::mt19937_64 rng(1001);
  int agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const ph::Filtration f = full_rips(uniform_cloud(rng, 8));
    agree += oracle::same_diagrams(ph::compute_persistence(f), oracle::naive_persistence(f)) ? 1 : 0;
  }
  return {agree == 200, std::to_string(agree) + "/200 clouds match the naive reduction"};
}

Outcome canonical_shapes() {
  std::string detail;
  bool ok = true;

  const ph::Filtration square = full_rips(ph::PointCloud({{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
  const auto sq = ph::compute_persistence(square);
  const bool square_ok = sq[1].pairs.size() == 1 && sq[1].pairs[0].birth == 1.0 &&
                         sq[1].pairs[0].death == std::sqrt(2.0) &&
                         oracle::same_diagrams(sq, oracle::naive_persistence(square));
  ok = ok && square_ok;
  detail += std::string("square H1 {(1,sqrt2)} ") + (square_ok ? "ok" : "WRONG");

  std::mt19937_64 rng(2002);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05), unit(0.0, 1.0);
  std::vector<ph::Point> circle, disk;
  for (int i = 0; i < 20; ++i) {
    const double a = 2.0 * M_PI * i / 20.0, r = 1.0 + jitter(rng);
    circle.push_back({r * std::cos(a), r * std::sin(a)});
  }
  for (int i = 0; i < 20; ++i) {
    const double a = 2.0 * M_PI * unit(rng), r = std::sqrt(unit(rng));
    disk.push_back({r * std::cos(a), r * std::sin(a)});
  }
  const ph::Filtration fc = full_rips(ph::PointCloud(circle));
  const ph::Filtration fd = full_rips(ph::PointCloud(disk));
  const auto dc = ph::compute_persistence(fc);
  const auto dd = ph::compute_persistence(fd);
  const bool oracle_ok = oracle::same_diagrams(dc, oracle::naive_persistence(fc)) &&
                         oracle::same_diagrams(dd, oracle::naive_persistence(fd));
  const auto pc = h1_persistence(dc, fc.eps_max);
  const auto pd = h1_persistence(dd, fd.eps_max);
  const double top = pc.empty() ? 0.0 : pc[0];
  const double second = pc.size() > 1 ? pc[1] : 0.0;
  const bool circle_ok = top > 0.0 && top >= 3.0 * std::max(second, std::numeric_limits<double>::epsilon());
  const double disk_top = pd.empty() ? 0.0 : pd[0];
  const bool disk_ok = disk_top < 0.5 * top;
  ok = ok && oracle_ok && circle_ok && disk_ok;
  detail += "; circle top/second " + fmt("%.4f", top) + "/" + fmt("%.4f", second) + "; disk top " +
            fmt("%.4f", disk_top) + "; oracle " + (oracle_ok ? "agrees" : "DISAGREES");
  return {ok, detail};
}

Outcome stability() {
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double delta = 0.01;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const ph::PointCloud c = uniform_cloud(rng, 6);
    std::vector<ph::Point> moved(c.points().begin(), c.points().end());
    for (auto& p : moved) {
      const double a = 2.0 * M_PI * unit(rng), r = delta * unit(rng);
      p = {p.x + r * std::cos(a), p.y + r * std::sin(a)};
    }
    const auto da = ph::compute_persistence(full_rips(c));
    const auto db = ph::compute_persistence(full_rips(ph::PointCloud(moved)));
    for (std::size_t k = 0; k < 2; ++k) worst = std::max(worst, oracle::bottleneck_distance(da[k], db[k]));
  }
  return {worst <= 2 * delta + 1e-9, "worst bottleneck " + fmt("%.6f", worst) + " (bound " +
                                         fmt("%.6f", 2 * delta + 1e-9) + ") over 50 clouds"};
}

double binary_loss(double raw, int y) {
  const double p = 1.0 / (1.0 + std::exp(-raw));
  return -(y * std::log(p) + (1 - y) * std::log(1 - p));
}

double multiclass_loss(const std::vector<double>& raw, int y) {
  const double m = *std::max_element(raw.begin(), raw.end());
  double z = 0.0;
  for (double r : raw) z += std::exp(r - m);
  return -(raw[static_cast<std::size_t>(y)] - m - std::log(z));
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

double gradient_check() {
  using gbdt::Objective;
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> score(-3.0, 3.0);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> s{score(rng)};
    const std::vector<int> y{trial % 2};
    const auto g = gbdt::loss_grad(Objective::binary(), s, y);
    const std::vector<double> sp{s[0] + h}, sm{s[0] - h};
    worst = std::max(worst, rel_err(g.grad[0], (binary_loss(sp[0], y[0]) - binary_loss(sm[0], y[0])) / (2 * h)));
    worst = std::max(worst, rel_err(g.hess[0], (gbdt::loss_grad(Objective::binary(), sp, y).grad[0] -
                                                gbdt::loss_grad(Objective::binary(), sm, y).grad[0]) / (2 * h)));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 3 + trial % 3;
    std::vector<double> raw(static_cast<std::size_t>(k));
    for (auto& r : raw) r = score(rng);
    const std::vector<int> y{trial % k};
    const auto obj = Objective::multiclass(k);
    const auto g = gbdt::loss_grad(obj, raw, y);
    for (std::size_t c = 0; c < raw.size(); ++c) {
      auto plus = raw, minus = raw;
      plus[c] += h;
      minus[c] -= h;
      worst = std::max(worst, rel_err(g.grad[c], (multiclass_loss(plus, y[0]) - multiclass_loss(minus, y[0])) / (2 * h)));
      worst = std::max(worst, rel_err(g.hess[c], (gbdt::loss_grad(obj, plus, y).grad[c] -
                                                  gbdt::loss_grad(obj, minus, y).grad[c]) / (2 * h)));
    }
  }
  return worst;
}

// Number of datasets whose first split matches exhaustive enumeration.
int first_split_check() {
  int matches = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(5000 + seed);
    std::uniform_int_distribution<int> rows(40, 200), cols(1, 5), level(0, 9), g8(-16, 16), h4(1, 8);
    const auto n = static_cast<std::size_t>(rows(rng)), m = static_cast<std::size_t>(cols(rng));
    gbdt::FeatureMatrix x(n, m);
    std::vector<double> grad(n), hess(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t f = 0; f < m; ++f) x(r, f) = level(rng) * 0.1;
      grad[r] = g8(rng) / 8.0;  // dyadic, so every partial sum is exact
      hess[r] = h4(rng) / 4.0;
    }
    const gbdt::BinnedDataset b = gbdt::bin_features(x, 256);
    gbdt::TrainParams p;
    p.max_leaves = 2;
    p.min_data_in_leaf = 5;
    const gbdt::RegressionTree tree = gbdt::grow_tree(b, grad, hess, p);

    double g_all = 0, h_all = 0;
    for (std::size_t r = 0; r < n; ++r) g_all += grad[r], h_all += hess[r];
    int best_f = -1;
    std::uint32_t best_t = 0;
    double best_gain = 0.0;
    for (std::size_t f = 0; f < m; ++f) {
      for (std::uint32_t t = 0; t + 1 < b.bin_count(f); ++t) {
        double gl = 0, hl = 0, gr = 0, hr = 0;
        std::size_t nl = 0;
        for (std::size_t r = 0; r < n; ++r) {
          if (b.bin(f, r) <= t) gl += grad[r], hl += hess[r], ++nl;
          else gr += grad[r], hr += hess[r];
        }
        if (nl < 5 || n - nl < 5) continue;
        const double gain = gl * gl / (hl + 1) + gr * gr / (hr + 1) - g_all * g_all / (h_all + 1);
        if (gain > best_gain) best_gain = gain, best_f = static_cast<int>(f), best_t = t;
      }
    }
    const gbdt::TreeNode& root = tree.nodes()[0];
    matches += (root.feature == best_f && (best_f < 0 || root.bin_threshold == best_t)) ? 1 : 0;
  }
  return matches;
}

Outcome gbdt_correctness() {
  const double grad_err = gradient_check();
  const int splits = first_split_check();

  const synthetic::Blobs two = synthetic::gaussian_blobs(500, 2, 2, 4.0, 6006);
  gbdt::TrainParams p;  // defaults: 100 trees
  const gbdt::BoostedEnsemble m2 = gbdt::train(two.x, two.labels, p);
  const double train_acc =
      pipeline::evaluate(gbdt::predict_labels(m2, two.x), two.labels, pipeline::Averaging::binary()).accuracy;

  const synthetic::Blobs five = synthetic::gaussian_blobs(500, 5, 2, 4.0, 7007);
  const pipeline::Split split = pipeline::stratified_split(five.labels, 0.8, 7007);
  gbdt::FeatureMatrix xtr, xte;
  std::vector<int> ytr, yte;
  for (std::size_t i : split.train) xtr.push_row(five.x.row(i)), ytr.push_back(five.labels[i]);
  for (std::size_t i : split.test) xte.push_row(five.x.row(i)), yte.push_back(five.labels[i]);
  gbdt::TrainParams p5;
  p5.objective = gbdt::Objective::multiclass(5);
  const gbdt::BoostedEnsemble m5 = gbdt::train(xtr, ytr, p5);
  const double micro_f1 = pipeline::evaluate(gbdt::predict_labels(m5, xte), yte, pipeline::Averaging::micro()).f1;

  const bool ok = grad_err <= 1e-5 && splits == 20 && train_acc >= 0.98 && micro_f1 >= 0.95;
  return {ok, "max grad/hess rel err " + fmt("%.2e", grad_err) + "; first split " + std::to_string(splits) +
                  "/20; two-blob train acc " + fmt("%.4f", train_acc) + "; 5-class held-out micro-F1 " +
                  fmt("%.4f", micro_f1)};
}

pipeline::ExperimentConfig robustness_config(std::uint64_t seed) {
  pipeline::ExperimentConfig cfg;
  cfg.noise = pipeline::NoiseSpec{0.0, 0.1, 0};
  cfg.seed = seed;
  cfg.workers = 0;
  return cfg;
}

Outcome robustness_direction() {
  std::vector<double> gains, best;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const pipeline::Dataset data = synthetic::disks_and_annuli(400, 28, seed);
    const pipeline::ExperimentReport r = pipeline::run_experiment(data, robustness_config(seed));
    const double fused = r.rows[r.best_fused].report.accuracy;
    const double pixel = r.rows[r.baseline].report.accuracy;
    gains.push_back(fused - pixel);
    best.push_back(fused);
    detail += (seed > 1 ? ", " : "") + fmt("%.3f", fused) + "/" + fmt("%.3f", pixel);
  }
  std::vector<double> sorted = gains;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[2];
  const double worst_best = *std::min_element(best.begin(), best.end());
  return {median >= 0.0 && worst_best >= 0.80, "fused/pixel per seed [" + detail + "]; median gain " +
                                                   fmt("%+.4f", median) + "; min best-fused " + fmt("%.3f", worst_best)};
}

Outcome ablation_identity() {
  const std::uint64_t seed = 1;
  const pipeline::Dataset data = synthetic::disks_and_annuli(400, 28, seed);
  const pipeline::ExperimentConfig cfg = robustness_config(seed);
  const pipeline::Split split =
      pipeline::stratified_split(data.labels, cfg.train_fraction, derive_seed(cfg.seed, SeedStream::Split));
  const pipeline::ExtractedFeatures features = pipeline::extract_features(data, cfg, split);
  const std::size_t beta = features.pixels.front().size();

  // Plain pixel path: noise then flatten, no topological stream involved.
  auto plain = [&](const std::vector<std::size_t>& rows) {
    gbdt::FeatureMatrix x;
    for (std::size_t i : rows) {
      const Image noisy = pipeline::add_gaussian_noise(data.images[i], {0.0, 0.1, pipeline::noise_seed(seed, i)});
      x.push_row(pipeline::flatten_pixels(noisy, beta));
    }
    return x;
  };
  std::vector<int> ytr;
  for (std::size_t i : split.train) ytr.push_back(data.labels[i]);
  gbdt::TrainParams p = cfg.train;
  p.seed = cfg.seed;
  const gbdt::BoostedEnsemble fused_model = gbdt::train(pipeline::assemble(features, split.train, 0, beta), ytr, p);
  const gbdt::BoostedEnsemble plain_model = gbdt::train(plain(split.train), ytr, p);
  const bool same_model = gbdt::save_model(fused_model) == gbdt::save_model(plain_model);
  const gbdt::FeatureMatrix fused_test = pipeline::assemble(features, split.test, 0, beta);
  const gbdt::FeatureMatrix plain_test = plain(split.test);
  const bool same_scores = gbdt::raw_scores(fused_model, fused_test) == gbdt::raw_scores(plain_model, plain_test);
  const bool same_labels = gbdt::predict_labels(fused_model, fused_test) == gbdt::predict_labels(plain_model, plain_test);
  return {same_model && same_scores && same_labels,
          std::string("model bytes ") + (same_model ? "identical" : "DIFFER") + "; test scores " +
              (same_scores ? "identical" : "DIFFER") + "; labels " + (same_labels ? "identical" : "DIFFER")};
}

Outcome metric_formulas() {
  // Hand formulas over reduced integer ratios; a ratio of small integers is
  // correctly rounded, so exact equality is the right comparison.
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  int configs = 0, exact = 0;
  for (std::size_t tp : {0, 1, 2, 5, 8})
    for (std::size_t fp : {0, 1, 4, 6, 9})
      for (std::size_t fn : {0, 3}) {
        std::size_t tn = (tp + 2 * fp + fn) % 3;
        if (tp + fp + fn + tn == 0) tn = 2;
        std::vector<int> truth, pred;
        auto add = [&](std::size_t n, int t, int p) {
          for (std::size_t i = 0; i < n; ++i) truth.push_back(t), pred.push_back(p);
        };
        add(tp, 1, 1);
        add(fp, 0, 1);
        add(fn, 1, 0);
        add(tn, 0, 0);
        const auto r = pipeline::evaluate(pred, truth, pipeline::Averaging::binary());
        const double p = ratio(tp, tp + fp), rc = ratio(tp, tp + fn);
        // F1 = 2PR/(P+R) = 2TP/(2TP+FP+FN) as rationals; 0 when P+R = 0.
        const double f1 = (tp == 0) ? 0.0 : ratio(2 * tp, 2 * tp + fp + fn);
        const double acc = ratio(tp + tn, tp + fp + fn + tn);
        ++configs;
        exact += (r.precision == p && r.recall == rc && r.f1 == f1 && r.accuracy == acc) ? 1 : 0;
      }

  std::mt19937_64 rng(8008);
  int micro_ok = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 3 + trial % 5;
    std::uniform_int_distribution<int> lab(0, k - 1), len(1, 200);
    std::vector<int> truth(static_cast<std::size_t>(len(rng))), pred(truth.size());
    for (auto& v : truth) v = lab(rng);
    for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = (i % 2 == 0) ? truth[i] : lab(rng);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == truth[i] ? 1 : 0;
    const auto r = pipeline::evaluate(pred, truth, pipeline::Averaging::micro());
    const double acc = ratio(correct, pred.size());
    micro_ok += (r.accuracy == acc && r.precision == acc && r.recall == acc && r.f1 == acc) ? 1 : 0;
  }
  return {exact == configs && configs == 50 && micro_ok == 20,
          std::to_string(exact) + "/" + std::to_string(configs) + " binary configurations exact; micro identity " +
              std::to_string(micro_ok) + "/20"};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "topoboost_acceptance_determinism";
  fs::remove_all(root);
  const pipeline::Dataset data = synthetic::disks_and_annuli(80, 28, 9);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const fs::path dir = root / "data" / data.class_names[static_cast<std::size_t>(data.labels[i])];
    fs::create_directories(dir);
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.png", i);
    codec::write_image(dir / name, data.images[i]);
  }
  std::ofstream(root / "cfg.json") << R"({"dataset": "data", "noise": {"mean": 0, "sigma": 0.1},)"
                                   << R"( "train": {"num_trees": 30}})";
  auto run = [&](const std::string& out, const std::string& workers) {
    const std::vector<std::string> args{"topoboost", "experiment", "--config", (root / "cfg.json").string(), "--seed",
                                        "7", "--workers", workers, "--out", (root / out).string()};
    std::ostringstream o, e;
    return cli::dispatch(args, o, e);
  };
  const int codes = run("a", "1") + run("b", "1") + run("c", "4");
  int identical = 0, compared = 0;
  for (const char* file : {"report.csv", "best_model.json", "baseline_model.json", "summary.json"}) {
    const std::string a = formats::read_text(root / "a" / file);
    for (const char* other : {"b", "c"}) {
      ++compared;
      identical += formats::read_text(root / other / file) == a ? 1 : 0;
    }
  }
  fs::remove_all(root);
  return {codes == 0 && identical == compared,
          std::to_string(identical) + "/" + std::to_string(compared) +
              " output files byte-identical across reruns and workers 1 vs 4"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0 = no runtime limit
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "persistence oracle equivalence", 10.0, persistence_oracle_equivalence},
      {2, "canonical shapes", 0.0, canonical_shapes},
      {3, "stability", 0.0, stability},
      {4, "GBDT correctness", 30.0, gbdt_correctness},
      {5, "robustness direction", 300.0, robustness_direction},
      {6, "ablation identity", 0.0, ablation_identity},
      {7, "metric formulas", 0.0, metric_formulas},
      {8, "determinism", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = c.budget_s == 0.0 || secs <= c.budget_s;
    const bool pass = o.pass && in_budget;
    failures += pass ? 0 : 1;
    std::printf("criterion %d (%s): %s  [%s; %.2f s%s]\n", c.id, c.name, pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs, c.budget_s > 0 ? (in_budget ? " within budget" : " OVER BUDGET") : "");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
