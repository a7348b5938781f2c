#pragma once

// JSON session configuration. Keys mirror SessionConfig; anything omitted
// keeps its default. See docs/config-schema.md.

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "decoyqkd/model.hpp"

namespace decoyqkd {

/// Malformed JSON, a wrong value type or an unknown key. line/column are
/// 1-based and 0 when not applicable.
class ConfigParseError : public ConfigError {
  public:
    ConfigParseError(const std::string& message, std::vector<std::string> fields, std::size_t line,
                     std::size_t column)
        : ConfigError(message, std::move(fields)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

/// Parses and validates. `source` names the input in messages.
SessionConfig parse_config(std::string_view text, std::string_view source = "<config>");
SessionConfig config_from_json(const nlohmann::json& j);
SessionConfig load_config(const std::filesystem::path& path);

/// Canonical form (linear transmittances, no dB keys).
nlohmann::json config_to_json(const SessionConfig& cfg);

}  // namespace decoyqkd
