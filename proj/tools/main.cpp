#include <string>
#include <vector>

#include "nullkdv/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nullkdv::cli::run(args);
}
