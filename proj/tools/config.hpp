#pragma once

// Flat `key = value` config files with `#` comments. Keys are the long flag
// names of a subcommand without the leading dashes.

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace momlab::cli {

struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Throws ConfigError naming `source` and the line of a malformed entry or a
/// repeated key.
std::vector<ConfigEntry> parse_config(std::istream& in, const std::string& source);

/// Reads `path` and turns its entries into `--key value` tokens. Keys that
/// are not options of `app` are rejected with their line number.
std::vector<std::string> config_tokens(const std::filesystem::path& path, const CLI::App& app);

}  // namespace momlab::cli
