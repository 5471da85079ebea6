#pragma once

#include <string>
#include <vector>

namespace rlsynth {

int run_cli(const std::vector<std::string>& args);

inline int run_cli(const std::vector<std::string>& args) {
  (void)args;
  return 2;  // placeholder until subcommands land
}

}  // namespace rlsynth
