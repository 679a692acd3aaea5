#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hbs/registry/registry.hpp"

namespace hbs::cli {

inline constexpr std::string_view kVersion = "0.1.0";

struct CommandInfo {
  std::string_view name;
  std::string_view summary;  // one line, as in `hbs help`
  std::string_view usage;
  std::string_view detail;
};

/// The 14 commands, in help order.
const std::vector<CommandInfo>& commands();
std::string help_text();
/// Commands the dispatcher accepts, sorted.
std::vector<std::string> dispatch_names();

/// Exit code for an error: 2 for usage and resolution errors, 1 otherwise.
int exit_code_for(const std::exception& e);

std::string dump_json(const registry::Registry& reg);
std::string dump_tcl(const registry::Registry& reg);

/// Entry point. Payload goes to `out_fd`, diagnostics to `err_fd`.
int run(const std::vector<std::string>& args, int out_fd = 1, int err_fd = 2);

}  // namespace hbs::cli
