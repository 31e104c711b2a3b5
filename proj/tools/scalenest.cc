#include <iostream>
#include <string>
#include <vector>

#include "scalenest/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return scalenest::run_cli(args, std::cout, std::cerr);
}
