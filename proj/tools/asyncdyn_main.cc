#include <iostream>
#include <string>
#include <vector>

#include "asyncdyn/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return asyncdyn::cli::run_command(args, std::cout, std::cerr);
}
