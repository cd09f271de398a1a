#include "kge/cli/config_file.hpp"

#include <fstream>
#include <sstream>

#include "kge/error.hpp"

namespace kge {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// Drops a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

ConfigFile parse_config(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ConfigError(where + "expected 'key: value', got '" + line + "'");
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    if (!is_known_key(key)) throw ConfigError(where + "unknown key '" + key + "'");
    if (cfg.line_of.count(key)) {
      throw ConfigError(where + "key '" + key + "' already set on line " + std::to_string(cfg.line_of[key]));
    }
    cfg.line_of[key] = lineno;
    try {
      if (!value.empty() && value.front() == '[') {
        if (value.back() != ']') throw ConfigError("unterminated list");
        std::vector<std::string> items;
        std::istringstream list(value.substr(1, value.size() - 2));
        std::string item;
        while (std::getline(list, item, ',')) {
          item = unquote(trim(item));
          if (item.empty()) throw ConfigError("empty list item");
          TrainConfig probe;
          apply_setting(probe, key, item);
          items.push_back(item);
        }
        if (items.empty()) throw ConfigError("empty value list");
        cfg.space[key] = std::move(items);
      } else {
        apply_setting(cfg.base, key, unquote(value));
      }
    } catch (const ConfigError& e) {
      std::string msg = e.what();
      if (msg.rfind(key + ":", 0) != 0) msg = "key '" + key + "': " + msg;
      throw ConfigError(where + msg);
    }
  }
  return cfg;
}

ConfigFile load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

}  // namespace kge
