#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kge/ckge/model.hpp"
#include "kge/engine/config.hpp"
#include "kge/engine/early_stop.hpp"

namespace kge {

struct NamedTable {
  std::string name;
  Table table;

  friend bool operator==(const NamedTable&, const NamedTable&) = default;
};

// Everything needed to continue training exactly where it stopped.
struct Checkpoint {
  TrainConfig config;
  std::uint64_t config_hash = 0;
  std::uint64_t vocab_digest = 0;
  std::size_t epoch = 0;        // completed epochs
  std::uint64_t step = 0;       // optimizer steps taken
  std::uint64_t version = 0;    // parameter version
  double best_metric = 0.0;
  std::size_t best_epoch = 0;   // 0 = never evaluated
  bool stopped = false;         // early stopping fired
  MetricHistory history;
  std::string rng_state;        // textual engine state
  // Parameter tables followed by optimizer state tables.
  std::vector<NamedTable> tables;

  const Table* find(const std::string& name) const;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

// Writes `meta` plus one `<name>.bin` per table into dir. Files are staged in
// a sibling directory and swapped in, so a failed save leaves any previous
// checkpoint intact and no partial directory behind.
//
// Table file: 16-byte header (u64 magic, u32 rows, u32 cols), then rows*cols
// little-endian float32, row-major.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& dir);

// Throws CheckpointError on any missing, truncated or corrupted file; nothing
// is returned in that case.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

}  // namespace kge
