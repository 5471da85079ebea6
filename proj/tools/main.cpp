#include <vector>
#include <string>

#include "rlsynth/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rlsynth::run_cli(args);
}
