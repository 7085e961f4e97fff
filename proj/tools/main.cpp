#include <iostream>
#include <string>
#include <vector>

#include "regverify/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return regverify::cli::run(args, std::cout, std::cerr);
}
