#include <iostream>

#include "warpft/cli.hpp"

int main(int argc, char** argv) {
  return warpft::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
