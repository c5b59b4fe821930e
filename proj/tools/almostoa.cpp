#include <iostream>

#include "almostoa/cli.hpp"

int main(int argc, char** argv) {
  return almostoa::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
