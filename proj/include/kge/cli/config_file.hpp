#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "kge/engine/config.hpp"
#include "kge/engine/search.hpp"

namespace kge {

// Flat `key: value` document. `#` starts a comment, blank lines are ignored,
// and a bracketed value `[a, b, c]` declares search candidates instead of a
// fixed setting. Surrounding quotes on values are stripped.
struct ConfigFile {
  TrainConfig base;           // fixed settings applied over the defaults
  SearchSpace space;          // list-valued keys
  std::map<std::string, std::size_t> line_of;  // key -> 1-based line
};

// Throws ConfigError prefixed with `origin:line:` and naming the key for
// unknown keys, duplicates, bad values or malformed lines.
ConfigFile parse_config(const std::string& text, const std::string& origin = "config");
ConfigFile load_config_file(const std::filesystem::path& path);

}  // namespace kge
