#include "kge/engine/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>
#include <tuple>

#include "kge/error.hpp"

namespace kge {
namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "checkpoint files assume a little-endian host");

namespace {

constexpr std::uint64_t kTableMagic = 0x314241544547454BULL;  // "KEGETAB1" on disk
constexpr const char* kFormat = "kge-checkpoint-1";

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  auto res = std::to_chars(buf, buf + sizeof buf, v, 16);
  return std::string(buf, res.ptr);
}

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_int(const std::string& s, const std::string& what, int base = 10) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw CheckpointError("checkpoint meta: bad " + what + " '" + s + "'");
  }
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw CheckpointError("checkpoint meta: bad " + what + " '" + s + "'");
  }
  return v;
}

bool valid_table_name(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string render_meta(const Checkpoint& c) {
  std::ostringstream out;
  out << "format\t" << kFormat << '\n';
  for (const auto& [k, v] : settings(c.config)) out << "config." << k << '\t' << v << '\n';
  out << "config_hash\t" << hex(c.config_hash) << '\n';
  out << "vocab_digest\t" << hex(c.vocab_digest) << '\n';
  out << "epoch\t" << c.epoch << '\n';
  out << "step\t" << c.step << '\n';
  out << "version\t" << c.version << '\n';
  out << "best_metric\t" << num(c.best_metric) << '\n';
  out << "best_epoch\t" << c.best_epoch << '\n';
  out << "stopped\t" << (c.stopped ? 1 : 0) << '\n';
  out << "history\t";
  for (std::size_t i = 0; i < c.history.size(); ++i) {
    if (i) out << ',';
    out << c.history[i].first << ':' << num(c.history[i].second);
  }
  out << '\n';
  out << "rng\t" << c.rng_state << '\n';
  for (const auto& t : c.tables) out << "table\t" << t.name << '\t' << t.table.rows << '\t' << t.table.cols << '\n';
  std::string body = out.str();
  body += "checksum\t" + hex(fnv1a(body)) + "\n";
  return body;
}

}  // namespace

const Table* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t.table;
  }
  return nullptr;
}

void write_table(const fs::path& path, const Table& table) {
  if (table.rows > UINT32_MAX || table.cols > UINT32_MAX) throw CheckpointError("table too large: " + path.string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write " + path.string());
  const std::uint64_t magic = kTableMagic;
  const std::uint32_t rows = std::uint32_t(table.rows), cols = std::uint32_t(table.cols);
  out.write(reinterpret_cast<const char*>(&magic), sizeof magic);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  out.write(reinterpret_cast<const char*>(table.data.data()), std::streamsize(table.data.size() * sizeof(float)));
  out.flush();
  if (!out) throw CheckpointError("write failed: " + path.string());
}

Table read_table(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("missing table file " + path.string());
  std::uint64_t magic = 0;
  std::uint32_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&magic), sizeof magic);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || magic != kTableMagic) throw CheckpointError("bad table header in " + path.string());
  Table t(rows, cols);
  in.read(reinterpret_cast<char*>(t.data.data()), std::streamsize(t.data.size() * sizeof(float)));
  if (!in) throw CheckpointError("truncated table file " + path.string());
  in.peek();
  if (!in.eof()) throw CheckpointError("trailing bytes in " + path.string());
  return t;
}

void save_checkpoint(const Checkpoint& ckpt, const fs::path& dir) {
  for (const auto& t : ckpt.tables) {
    if (!valid_table_name(t.name) || t.name == "meta") throw CheckpointError("invalid table name '" + t.name + "'");
  }
  const fs::path target = fs::absolute(dir);
  const fs::path parent = target.parent_path();
  const fs::path staging = parent / (target.filename().string() + ".staging");
  const fs::path retired = parent / (target.filename().string() + ".old");
  std::error_code ec;
  fs::create_directories(parent, ec);
  fs::remove_all(staging, ec);
  try {
    if (!fs::create_directory(staging)) throw CheckpointError("cannot create " + staging.string());
    for (const auto& t : ckpt.tables) write_table(staging / (t.name + ".bin"), t.table);
    {
      std::ofstream meta(staging / "meta", std::ios::binary | std::ios::trunc);
      meta << render_meta(ckpt);
      meta.flush();
      if (!meta) throw CheckpointError("cannot write " + (staging / "meta").string());
    }
    fs::remove_all(retired, ec);
    if (fs::exists(target)) fs::rename(target, retired);
    fs::rename(staging, target);
    fs::remove_all(retired, ec);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(staging, ec);
    throw CheckpointError(std::string("checkpoint save failed: ") + e.what());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

Checkpoint load_checkpoint(const fs::path& dir) {
  std::ifstream in(dir / "meta", std::ios::binary);
  if (!in) throw CheckpointError("no checkpoint meta in " + dir.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  const auto cpos = text.rfind("checksum\t");
  if (cpos == std::string::npos || (cpos != 0 && text[cpos - 1] != '\n')) {
    throw CheckpointError("checkpoint meta has no checksum: " + dir.string());
  }
  std::string stored = text.substr(cpos + 9);
  if (!stored.empty() && stored.back() == '\n') stored.pop_back();
  if (stored != hex(fnv1a(std::string_view(text).substr(0, cpos)))) {
    throw CheckpointError("checkpoint meta checksum mismatch: " + dir.string());
  }

  Checkpoint c;
  std::map<std::string, std::string> fields;
  std::vector<std::tuple<std::string, std::size_t, std::size_t>> table_list;
  std::istringstream lines(text.substr(0, cpos));
  std::string line;
  while (std::getline(lines, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw CheckpointError("malformed checkpoint meta line '" + line + "'");
    const std::string key = line.substr(0, tab), value = line.substr(tab + 1);
    if (key == "table") {
      std::istringstream parts(value);
      std::string name, rows, cols;
      if (!std::getline(parts, name, '\t') || !std::getline(parts, rows, '\t') || !std::getline(parts, cols)) {
        throw CheckpointError("malformed table entry '" + value + "'");
      }
      if (!valid_table_name(name)) throw CheckpointError("invalid table name '" + name + "'");
      table_list.emplace_back(name, parse_int<std::size_t>(rows, "rows"), parse_int<std::size_t>(cols, "cols"));
    } else if (key.rfind("config.", 0) == 0) {
      try {
        apply_setting(c.config, key.substr(7), value);
      } catch (const ConfigError& e) {
        throw CheckpointError(std::string("checkpoint config: ") + e.what());
      }
    } else {
      fields[key] = value;
    }
  }

  auto field = [&](const std::string& k) -> const std::string& {
    auto it = fields.find(k);
    if (it == fields.end()) throw CheckpointError("checkpoint meta lacks '" + k + "'");
    return it->second;
  };
  if (field("format") != kFormat) throw CheckpointError("unknown checkpoint format '" + field("format") + "'");
  c.config_hash = parse_int<std::uint64_t>(field("config_hash"), "config_hash", 16);
  c.vocab_digest = parse_int<std::uint64_t>(field("vocab_digest"), "vocab_digest", 16);
  c.epoch = parse_int<std::size_t>(field("epoch"), "epoch");
  c.step = parse_int<std::uint64_t>(field("step"), "step");
  c.version = parse_int<std::uint64_t>(field("version"), "version");
  c.best_metric = parse_double(field("best_metric"), "best_metric");
  c.best_epoch = parse_int<std::size_t>(field("best_epoch"), "best_epoch");
  c.stopped = parse_int<int>(field("stopped"), "stopped") != 0;
  c.rng_state = field("rng");
  const std::string& hist = field("history");
  std::size_t pos = 0;
  while (pos < hist.size()) {
    std::size_t next = hist.find(',', pos);
    if (next == std::string::npos) next = hist.size();
    const std::string item = hist.substr(pos, next - pos);
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw CheckpointError("malformed history entry '" + item + "'");
    c.history.emplace_back(parse_int<std::size_t>(item.substr(0, colon), "history epoch"),
                           parse_double(item.substr(colon + 1), "history metric"));
    pos = next + 1;
  }
  if (config_hash(c.config) != c.config_hash) throw CheckpointError("checkpoint config does not match its hash");

  for (const auto& [name, rows, cols] : table_list) {
    Table t = read_table(dir / (name + ".bin"));
    if (t.rows != rows || t.cols != cols) throw CheckpointError("table " + name + " shape disagrees with meta");
    c.tables.push_back({name, std::move(t)});
  }
  return c;
}

}  // namespace kge
