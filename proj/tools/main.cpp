#include <iostream>
#include <string>
#include <vector>

#include "topoboost/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return topoboost::cli::dispatch(args, std::cout, std::cerr);
}
