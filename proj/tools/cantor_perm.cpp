#include <string>
#include <vector>

#include "cantorperm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cantorperm::cli::run(args);
}
