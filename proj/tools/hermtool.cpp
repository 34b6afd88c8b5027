#include <iostream>
#include <string>
#include <vector>

#include "herm/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return herm::cli::run_main(args, std::cout, std::cerr);
}
