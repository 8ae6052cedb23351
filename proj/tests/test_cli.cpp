#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "topoboost/cli.hpp"
#include "topoboost/codec.hpp"
#include "topoboost/formats.hpp"
#include "topoboost/synthetic.hpp"

using namespace topoboost;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "topoboost");
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("topoboost_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

void write_dataset(const fs::path& root, std::size_t count, std::uint64_t seed) {
  const pipeline::Dataset d = synthetic::disks_and_annuli(count, 16, seed);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const fs::path dir = root / d.class_names[static_cast<std::size_t>(d.labels[i])];
    fs::create_directories(dir);
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.png", i);
    codec::write_image(dir / name, d.images[i]);
  }
}

}  // namespace

TEST_CASE("help and usage errors") {
  Run r = run({"--help"});
  CHECK(r.code == cli::kExitOk);
  for (const char* flag : {"--num-trees", "--max-points", "--sigma", "--config", "--objective", "--eps-max"}) {
    CHECK(r.out.find(flag) != std::string::npos);
  }
  CHECK(r.out.find("mix64") != std::string::npos);

  r = run({"train", "--input", "x.csv", "--out", "m.json", "--bogus"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"train", "--input", "x.csv"}).code == cli::kExitUsage);
  CHECK(run({"train", "--input", "x.csv", "--out", "m", "--objective", "ranking"}).code == cli::kExitUsage);
}

TEST_CASE("data errors exit with status 2") {
  TempDir dir("errors");
  std::ofstream(dir / "empty.csv").close();
  Run r = run({"train", "--input", dir / "empty.csv", "--out", dir / "m.json"});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("empty dataset") != std::string::npos);
  CHECK(run({"train", "--input", dir / "missing.csv", "--out", dir / "m.json"}).code == cli::kExitData);
  CHECK(run({"extract", "--input", dir / "nothing", "--out", dir / "f.csv"}).code == cli::kExitData);
  std::ofstream(dir / "bad.png") << "garbage";
  r = run({"pd-plot", "--input", dir / "bad.png", "--out", dir / "x.svg"});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("bad.png") != std::string::npos);
}

TEST_CASE("the installed binary reports exit codes") {
  const std::string cmd = std::string(TOPOBOOST_CLI_PATH) + " train --no-such-flag > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 1);
}

TEST_CASE("point-cloud commands") {
  TempDir dir("points");
  std::ofstream(dir / "square.csv") << "x,y\n0,0\n1,0\n0,1\n1,1\n";
  Run r = run({"pd-plot", "--input", dir / "square.csv", "--out", dir / "sq.svg", "--diagram-out", dir / "sq.csv"});
  REQUIRE(r.code == 0);
  const std::string diag = formats::read_text(dir / "sq.csv");
  CHECK(diag.find("1,1,1.4142135623730951") != std::string::npos);
  CHECK(formats::read_text(dir / "sq.svg").find("<svg") != std::string::npos);

  r = run({"betti", "--input", dir / "square.csv", "--out", dir / "b.csv", "--dim", "0", "--steps", "3"});
  REQUIRE(r.code == 0);
  CHECK(formats::read_text(dir / "b.csv") == "t,count\n0,4\n0.7071067811865476,4\n1.4142135623730951,1\n");
  CHECK(run({"betti", "--input", dir / "square.csv", "--out", dir / "b.csv", "--dim", "1", "--max-dim", "1"}).code ==
        cli::kExitData);

  write_dataset(dir.path / "img", 2, 1);
  const std::string img = (dir.path / "img" / "disk" / "00000.png").string();
  REQUIRE(run({"noise", "--input", img, "--out", dir / "n1.png", "--seed", "3"}).code == 0);
  REQUIRE(run({"noise", "--input", img, "--out", dir / "n2.png", "--seed", "3"}).code == 0);
  CHECK(formats::read_text(dir / "n1.png") == formats::read_text(dir / "n2.png"));
  REQUIRE(run({"noise", "--input", img, "--out", dir / "n0.png", "--sigma", "0"}).code == 0);
  CHECK(codec::read_image(dir / "n0.png") == codec::read_image(img));
}

TEST_CASE("manual extract, train, predict and eval equal one experiment cell") {
  TempDir dir("compose");
  write_dataset(dir.path / "data", 24, 5);
  std::ofstream(dir / "cfg.json") << R"({"dataset": "data", "max_points": 40, "alpha_fractions": [1.0],)"
                                  << R"( "betas": [200], "noise": {"sigma": 0.1},)"
                                  << R"( "train": {"num_trees": 15, "min_data_in_leaf": 3}})";
  Run r = run({"experiment", "--config", dir / "cfg.json", "--out", dir / "exp", "--seed", "11"});
  REQUIRE(r.code == 0);
  const std::string report = formats::read_text(dir / "exp/report.csv");
  // Second line is the pixel-only row, third the single fused row.
  std::istringstream lines(report);
  std::string header, pixel_row, fused_row;
  std::getline(lines, header);
  std::getline(lines, pixel_row);
  std::getline(lines, fused_row);
  const std::string alpha = fused_row.substr(0, fused_row.find(','));
  REQUIRE(fused_row.find(",200,fused,") != std::string::npos);

  const std::vector<std::string> common{"--input", dir / "data", "--alpha", alpha, "--beta", "200", "--max-points",
                                        "40", "--sigma", "0.1", "--seed", "11"};
  auto extract = [&](const std::string& split, const std::string& out) {
    std::vector<std::string> a{"extract", "--out", out, "--split", split};
    a.insert(a.end(), common.begin(), common.end());
    return run(a).code;
  };
  REQUIRE(extract("train", dir / "train.csv") == 0);
  REQUIRE(extract("test", dir / "test.csv") == 0);
  REQUIRE(run({"train", "--input", dir / "train.csv", "--out", dir / "model.json", "--num-trees", "15", "--min-leaf",
               "3", "--seed", "11"})
              .code == 0);
  REQUIRE(run({"predict", "--model", dir / "model.json", "--input", dir / "test.csv", "--out", dir / "pred.csv"}).code ==
          0);
  r = run({"eval", "--input", dir / "pred.csv"});
  REQUIRE(r.code == 0);

  CHECK(formats::read_text(dir / "model.json") == formats::read_text(dir / "exp/best_model.json"));
  const std::string metrics = r.out.substr(r.out.find('\n') + 1);
  const std::string expected = fused_row.substr(fused_row.find(",fused,") + 7) + "\n";
  CHECK(metrics == expected);
}
