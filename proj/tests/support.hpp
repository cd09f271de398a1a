#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kge/kgdata/kgdata.hpp"

namespace kge::test {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

void write_triples(const std::filesystem::path& path, const std::vector<LabeledTriple>& triples);

struct RawSplits {
  std::vector<LabeledTriple> train, valid, test;
};

void write_dataset(const std::filesystem::path& dir, const RawSplits& splits);
Dataset build_dataset(const RawSplits& splits);

// Eight entities on a line with `next` (i -> i+1) and `skip` (i -> i+2);
// held-out triples are exact compositions of the training pattern.
RawSplits chain_splits();

// Distinct random triples over `n_entities` x `n_relations`, split
// train/valid/test by the given counts. Labels are e<i> / r<j>.
RawSplits random_splits(std::size_t n_entities, std::size_t n_relations, std::size_t n_train, std::size_t n_valid,
                        std::size_t n_test, std::uint64_t seed);

}  // namespace kge::test
