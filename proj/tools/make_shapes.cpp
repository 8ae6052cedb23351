// Writes a disks-vs-annuli image dataset in the layout `topoboost` ingests:
//   <out>/annulus/00000.png, <out>/disk/00001.png, ...

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "topoboost/codec.hpp"
#include "topoboost/error.hpp"
#include "topoboost/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic disks-vs-annuli dataset"};
  std::filesystem::path out;
  std::size_t count = 400;
  std::size_t size = 28;
  std::uint64_t seed = 0;
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--count", count, "Number of images")->capture_default_str();
  app.add_option("--size", size, "Image side in pixels")->capture_default_str();
  app.add_option("--seed", seed, "Generator seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto data = topoboost::synthetic::disks_and_annuli(count, size, seed);
    for (const auto& name : data.class_names) std::filesystem::create_directories(out / name);
    for (std::size_t i = 0; i < data.size(); ++i) {
      char file[32];
      std::snprintf(file, sizeof file, "%05zu.png", i);
      topoboost::codec::write_image(out / data.class_names[static_cast<std::size_t>(data.labels[i])] / file,
                                    data.images[i]);
    }
    std::cout << "wrote " << data.size() << " images to " << out.string() << "\n";
  } catch (const topoboost::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
