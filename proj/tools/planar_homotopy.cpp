#include <iostream>
#include <string>
#include <vector>

#include "planar_homotopy/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ph::cli::run(args, std::cout, std::cerr);
}
