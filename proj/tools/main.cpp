#include <iostream>
#include <string>
#include <vector>

#include "catpose/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return catpose::cli::run(args, std::cout, std::cerr);
}
