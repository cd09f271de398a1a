#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace kge {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
  EntityId h = 0;
  RelationId r = 0;
  EntityId t = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct LabeledTriple {
  std::string h;
  std::string r;
  std::string t;

  friend bool operator==(const LabeledTriple&, const LabeledTriple&) = default;
};

// Packs two 32-bit ids into one hash key.
inline std::uint64_t pair_key(std::int32_t a, std::int32_t b) {
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

struct TripleHash {
  std::size_t operator()(const Triple& x) const noexcept {
    std::uint64_t k = pair_key(x.h, x.t) * 0x9E3779B97F4A7C15ULL;
    k ^= std::uint64_t(std::uint32_t(x.r)) + 0x7F4A7C159E3779B9ULL + (k << 6) + (k >> 2);
    return std::size_t(k);
  }
};

// Reads a tab-separated triple file. Throws DataError with the offending line
// number on malformed input, or if the file is missing or empty.
std::vector<LabeledTriple> load_triples(const std::filesystem::path& path);

class Vocab {
 public:
  // Returns the existing id or assigns the next one.
  EntityId add_entity(const std::string& label);
  RelationId add_relation(const std::string& label);

  // Throw DataError naming the label when unknown.
  EntityId entity_id(const std::string& label) const;
  RelationId relation_id(const std::string& label) const;

  bool has_entity(const std::string& label) const { return entity_to_id_.count(label) != 0; }
  bool has_relation(const std::string& label) const { return relation_to_id_.count(label) != 0; }

  const std::string& entity_label(EntityId id) const { return id_to_entity_.at(std::size_t(id)); }
  const std::string& relation_label(RelationId id) const { return id_to_relation_.at(std::size_t(id)); }

  std::size_t n_entities() const { return id_to_entity_.size(); }
  std::size_t n_relations() const { return id_to_relation_.size(); }

  // Order-sensitive digest of both label lists; stored in checkpoints.
  std::uint64_t digest() const;

  // Writes entities.tsv and relations.tsv (`label<TAB>id`) into dir.
  void write(const std::filesystem::path& dir) const;

 private:
  std::unordered_map<std::string, EntityId> entity_to_id_;
  std::unordered_map<std::string, RelationId> relation_to_id_;
  std::vector<std::string> id_to_entity_;
  std::vector<std::string> id_to_relation_;
};

// Ids follow first occurrence scanning train, then valid, then test.
Vocab build_vocab(const std::vector<LabeledTriple>& train,
                  const std::vector<LabeledTriple>& valid,
                  const std::vector<LabeledTriple>& test);

// Train-split statistics and the three integer-encoded splits.
struct IndexedKG {
  std::vector<Triple> train;
  std::vector<Triple> valid;
  std::vector<Triple> test;

  // Sorted, deduplicated neighbour lists over train.
  std::unordered_map<std::uint64_t, std::vector<EntityId>> hr2t;  // key pair_key(h, r)
  std::unordered_map<std::uint64_t, std::vector<EntityId>> rt2h;  // key pair_key(r, t)
  // Occurrence counts over train, duplicates included.
  std::unordered_map<std::uint64_t, std::int64_t> freq_hr;
  std::unordered_map<std::uint64_t, std::int64_t> freq_rt;

  std::size_t n_entities = 0;
  std::size_t n_relations = 0;
  // Relation count before inverse augmentation; equals n_relations otherwise.
  std::size_t n_base_relations = 0;
  bool has_inverse = false;

  // True if (h, r, t) occurs in train.
  bool in_train(const Triple& x) const;

  const std::vector<EntityId>& tails(EntityId h, RelationId r) const;
  const std::vector<EntityId>& heads(RelationId r, EntityId t) const;

  // Rebuilds hr2t/rt2h/freq from the current train split.
  void rebuild_statistics();
};

IndexedKG index_kg(const std::vector<LabeledTriple>& train,
                   const std::vector<LabeledTriple>& valid,
                   const std::vector<LabeledTriple>& test,
                   const Vocab& vocab);

// Adds (t, r + n, h) for every train triple (h, r, t). Throws DataError when
// the graph already carries inverse relations.
IndexedKG add_inverse_relations(const IndexedKG& kg);

struct Dataset {
  Vocab vocab;
  IndexedKG kg;
};

// Loads train.txt / valid.txt / test.txt from dir.
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace kge
