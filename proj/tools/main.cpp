#include <iostream>
#include <string>
#include <vector>

#include "dsblow/harness.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dsblow::cli_dispatch(args, std::cout, std::cerr);
}
