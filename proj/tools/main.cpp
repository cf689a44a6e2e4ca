#include <iostream>
#include <string>
#include <vector>

#include "ldsim/cli.h"

auto main(int argc, char** argv) -> int {
  auto args = std::vector<std::string>(argv + 1, argv + argc);
  return ldsim::run_cli(args, std::cout, std::cerr);
}
