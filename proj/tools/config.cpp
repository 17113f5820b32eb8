#include "config.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <fstream>
#include <set>

#include "cli_errors.hpp"

namespace momlab::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<ConfigEntry> parse_config(std::istream& in, const std::string& source) {
  std::vector<ConfigEntry> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ConfigError(source + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail("expected `key = value`");
    ConfigEntry e{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), lineno};
    if (e.key.empty()) fail("missing key");
    if (e.value.empty()) fail("missing value for `" + e.key + "`");
    for (char c : e.key) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) {
        fail("invalid key `" + e.key + "`");
      }
    }
    if (!seen.insert(e.key).second) fail("repeated key `" + e.key + "`");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::string> config_tokens(const std::filesystem::path& path, const CLI::App& app) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::vector<std::string> tokens;
  for (const ConfigEntry& e : parse_config(in, path.string())) {
    std::string key = e.key;
    for (char& c : key) {
      if (c == '_') c = '-';
    }
    const CLI::Option* opt = app.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw ConfigError(path.string() + ":" + std::to_string(e.line) + ": unknown key `" + e.key +
                        "` for `" + app.get_name() + "`");
    }
    tokens.push_back("--" + key + "=" + e.value);
  }
  return tokens;
}

}  // namespace momlab::cli
