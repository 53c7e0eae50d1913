#pragma once

#include <string>
#include <vector>

#include "vexdelay/config.hpp"

namespace vexdelay
{

std::vector<std::string> preset_names();

/// Text of a shipped preset; ConfigError (unknown_key) for an unknown name.
std::string preset_text(const std::string& name);

RunConfig load_preset(const std::string& name);

}  // namespace vexdelay
