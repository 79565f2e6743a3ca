#include <iostream>
#include <string>
#include <vector>

#include "cxrkg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cxrkg::run_cli(args, std::cout, std::cerr);
}
