#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "opiqsdc/channel.hpp"

namespace opiqsdc {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : "config key '" + key + "': " + message),
        key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Config files are flat `key = value` lines; `#` starts a comment. Keys are the
// SystemParams field names. Unknown keys and unparsable values raise ConfigError.
void apply_setting(SystemParams& params, std::string_view key, std::string_view value);
SystemParams parse_params(std::string_view text, SystemParams base = {});
SystemParams load_params(const std::filesystem::path& path, SystemParams base = {});

/// Canonical, round-trippable rendering (fixed key order, 17 significant digits).
std::string to_config_text(const SystemParams& params);

std::vector<std::string> config_keys();

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);
std::string params_digest(const SystemParams& params);

}  // namespace opiqsdc
