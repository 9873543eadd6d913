#include <iostream>
#include <string>
#include <vector>

#include "lassonse/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lassonse::cli::dispatch(args, std::cout, std::cerr);
}
