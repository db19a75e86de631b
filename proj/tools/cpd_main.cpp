#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "cpd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const bool color = std::getenv("CPD_NO_COLOR") == nullptr && ::isatty(fileno(stderr)) != 0;
  return cpd::cli::run(args, std::cout, std::cerr, color);
}
