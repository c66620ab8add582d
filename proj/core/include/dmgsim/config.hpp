#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dmgsim/scenario.hpp"

namespace dmgsim {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat key=value configuration. Blank lines and lines starting with '#'
/// are ignored; lists are comma separated. Unknown keys, malformed lines and
/// out-of-range values raise ConfigError with the origin and line number.
///
/// Recognised keys are listed by config_keys(); render_banner() writes every
/// one of them, so a banner is itself a valid config file.
void apply_config_text(ScenarioSpec& spec, std::string_view text, const std::string& origin = "<config>");
void apply_config_file(ScenarioSpec& spec, const std::filesystem::path& path);

/// Sets one key. Throws ConfigError on unknown keys or bad values.
void apply_setting(ScenarioSpec& spec, const std::string& key, const std::string& value);

const std::vector<std::string>& config_keys();

/// Every effective parameter as key=value lines, preceded by a comment
/// header with the library version.
std::string render_banner(const ScenarioSpec& spec);

} // namespace dmgsim
