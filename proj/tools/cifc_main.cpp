#include <iostream>

#include "cifc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cifc::run(args, std::cout, std::cerr);
}
