#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kge/sampler/sampler.hpp"

namespace kge {

enum class ModelKind { kTransE, kTransH, kTransR, kDistMult, kComplEx, kRotatE, kSimplE };

inline constexpr std::array<ModelKind, 7> kAllModels = {
    ModelKind::kTransE,  ModelKind::kTransH, ModelKind::kTransR, ModelKind::kDistMult,
    ModelKind::kComplEx, ModelKind::kRotatE, ModelKind::kSimplE};

std::string_view model_name(ModelKind kind);
// Case-insensitive; throws ConfigError on unknown names.
ModelKind parse_model(std::string_view name);

// Dense row-major float32 matrix.
struct Table {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  Table() = default;
  Table(std::size_t r, std::size_t c, float fill = 0.0f) : rows(r), cols(c), data(r * c, fill) {}

  float* row(std::size_t i) { return data.data() + i * cols; }
  const float* row(std::size_t i) const { return data.data() + i * cols; }
  std::span<float> row_span(std::size_t i) { return {row(i), cols}; }
  std::span<const float> row_span(std::size_t i) const { return {row(i), cols}; }
  bool empty() const { return rows == 0; }

  friend bool operator==(const Table&, const Table&) = default;
};

// Fixed table slots; models leave the slots they do not use empty.
enum class TableId : std::size_t {
  kEntity = 0,       // entity embeddings (head role for SimplE; re|im halves for ComplEx/RotatE)
  kRelation = 1,     // relation embeddings (phases for RotatE)
  kEntityTail = 2,   // SimplE tail-role entity embeddings
  kRelationInv = 3,  // SimplE inverse-relation embeddings
  kNormal = 4,       // TransH hyperplane normals
  kProjection = 5,   // TransR matrices, one d x d row-major matrix per relation
};
inline constexpr std::size_t kNumTables = 6;

std::string_view table_name(TableId id);

struct ModelParams {
  ModelKind kind = ModelKind::kTransE;
  std::size_t dim = 0;
  // TransE distance norm (1 or 2).
  int p_norm = 1;
  std::array<Table, kNumTables> tables;
  // Bumped by every optimizer step; soft labels record the version they saw.
  std::uint64_t version = 0;

  Table& table(TableId id) { return tables[std::size_t(id)]; }
  const Table& table(TableId id) const { return tables[std::size_t(id)]; }
  Table& entity() { return table(TableId::kEntity); }
  const Table& entity() const { return table(TableId::kEntity); }
  Table& relation() { return table(TableId::kRelation); }
  const Table& relation() const { return table(TableId::kRelation); }

  std::size_t n_entities() const { return entity().rows; }
  std::size_t n_relations() const { return relation().rows; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Uniform init in [-6/sqrt(d), 6/sqrt(d)]; RotatE phases in [-pi, pi);
// TransR projections start at identity; TransH normals are unit length.
ModelParams init_params(ModelKind kind, std::size_t n_entities, std::size_t n_relations, std::size_t dim,
                        std::uint64_t seed, int p_norm = 1);

// Rescales rows to unit L2 norm (zero rows are left alone).
void normalize_rows(Table& table);
void normalize_rows(Table& table, std::span<const std::int32_t> rows);

}  // namespace kge
