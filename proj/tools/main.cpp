#include <iostream>
#include <string>
#include <vector>

#include "dsim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dsim::cli_main(args, std::cout, std::cerr);
}
