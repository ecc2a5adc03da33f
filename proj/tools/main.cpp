#include <iostream>
#include <string>
#include <vector>

#include "likeability/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return likeability::cli::dispatch(args, std::cout, std::cerr);
}
