#include "vexdelay/presets.hpp"

#include "vexdelay/errors.hpp"
#include "vexdelay/preset_table.hpp"

namespace vexdelay
{

std::vector<std::string> preset_names()
{
    std::vector<std::string> names;
    for (const auto& entry : detail::preset_table)
        names.emplace_back(entry.first);
    return names;
}

std::string preset_text(const std::string& name)
{
    for (const auto& entry : detail::preset_table)
        if (entry.first == name)
            return std::string(entry.second);
    std::string known;
    for (const auto& entry : detail::preset_table)
        known += (known.empty() ? "" : ", ") + std::string(entry.first);
    throw ConfigError(ConfigError::Kind::unknown_key,
                      "unknown preset '" + name + "' (known: " + known + ")");
}

RunConfig load_preset(const std::string& name) { return parse_config(preset_text(name)); }

}  // namespace vexdelay
