#pragma once

#include "nc/config.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ncl {

struct OptionSpec {
  std::string key;
  std::string default_value;
  std::string help;
  // 0: boolean flag, 1: single value, 2: two values (joined with a space),
  // -1: repeatable (joined with ';').
  int nargs = 1;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<OptionSpec> options;
  std::function<int(const nc::Config&)> run;
};

const std::vector<CommandSpec>& command_specs();

}  // namespace ncl
