#include <iostream>
#include <vector>

#include "enverify/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return enverify::run(args, std::cout, std::cerr);
}
