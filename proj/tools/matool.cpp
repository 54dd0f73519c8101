#include <iostream>
#include <string>
#include <vector>

#include "mongeampere/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mongeampere::cli::run(args, std::cout, std::cerr);
}
