#include "deltarel/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto out = deltarel::cli::run(args);
  std::cout << out.report;
  return out.exit_code;
}
