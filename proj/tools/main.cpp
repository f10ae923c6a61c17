#include <iostream>
#include <string>
#include <vector>

#include "asp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return asp::cli::run(args, std::cout, std::cerr);
}
