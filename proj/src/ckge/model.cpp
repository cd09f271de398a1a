#include "kge/ckge/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>

#include "kge/error.hpp"

namespace kge {
namespace {

void fill_uniform(Table& t, float bound, Rng& rng) {
  std::uniform_real_distribution<float> dist(-bound, bound);
  for (float& x : t.data) x = dist(rng);
}

void normalize_row(float* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += double(x[i]) * double(x[i]);
  if (s <= 0.0) return;
  const double inv = 1.0 / std::sqrt(s);
  for (std::size_t i = 0; i < n; ++i) x[i] = float(double(x[i]) * inv);
}

}  // namespace

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kTransE: return "TransE";
    case ModelKind::kTransH: return "TransH";
    case ModelKind::kTransR: return "TransR";
    case ModelKind::kDistMult: return "DistMult";
    case ModelKind::kComplEx: return "ComplEx";
    case ModelKind::kRotatE: return "RotatE";
    case ModelKind::kSimplE: return "SimplE";
  }
  return "?";
}

ModelKind parse_model(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (ModelKind k : kAllModels) {
    std::string candidate(model_name(k));
    std::transform(candidate.begin(), candidate.end(), candidate.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (candidate == lower) return k;
  }
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

std::string_view table_name(TableId id) {
  switch (id) {
    case TableId::kEntity: return "entity";
    case TableId::kRelation: return "relation";
    case TableId::kEntityTail: return "entity_tail";
    case TableId::kRelationInv: return "relation_inv";
    case TableId::kNormal: return "normal";
    case TableId::kProjection: return "projection";
  }
  return "?";
}

ModelParams init_params(ModelKind kind, std::size_t n_entities, std::size_t n_relations, std::size_t dim,
                        std::uint64_t seed, int p_norm) {
  if (dim == 0) throw ConfigError("embedding dimension must be >= 1");
  if (p_norm != 1 && p_norm != 2) throw ConfigError("p_norm must be 1 or 2");

  ModelParams p;
  p.kind = kind;
  p.dim = dim;
  p.p_norm = p_norm;
  Rng rng(seed);
  const float bound = float(6.0 / std::sqrt(double(dim)));

  auto make = [&](TableId id, std::size_t rows, std::size_t cols) -> Table& {
    Table& t = p.table(id);
    t = Table(rows, cols);
    fill_uniform(t, bound, rng);
    return t;
  };

  switch (kind) {
    case ModelKind::kTransE:
    case ModelKind::kDistMult:
      make(TableId::kEntity, n_entities, dim);
      make(TableId::kRelation, n_relations, dim);
      break;
    case ModelKind::kTransH:
      make(TableId::kEntity, n_entities, dim);
      make(TableId::kRelation, n_relations, dim);
      normalize_rows(make(TableId::kNormal, n_relations, dim));
      break;
    case ModelKind::kTransR: {
      make(TableId::kEntity, n_entities, dim);
      make(TableId::kRelation, n_relations, dim);
      Table& m = p.table(TableId::kProjection);
      m = Table(n_relations, dim * dim);
      for (std::size_t r = 0; r < n_relations; ++r) {
        for (std::size_t i = 0; i < dim; ++i) m.row(r)[i * dim + i] = 1.0f;
      }
      break;
    }
    case ModelKind::kComplEx:
      make(TableId::kEntity, n_entities, 2 * dim);
      make(TableId::kRelation, n_relations, 2 * dim);
      break;
    case ModelKind::kRotatE: {
      make(TableId::kEntity, n_entities, 2 * dim);
      Table& phase = p.table(TableId::kRelation);
      phase = Table(n_relations, dim);
      std::uniform_real_distribution<float> dist(-std::numbers::pi_v<float>, std::numbers::pi_v<float>);
      for (float& x : phase.data) x = dist(rng);
      break;
    }
    case ModelKind::kSimplE:
      make(TableId::kEntity, n_entities, dim);
      make(TableId::kRelation, n_relations, dim);
      make(TableId::kEntityTail, n_entities, dim);
      make(TableId::kRelationInv, n_relations, dim);
      break;
  }
  return p;
}

void normalize_rows(Table& table) {
  for (std::size_t i = 0; i < table.rows; ++i) normalize_row(table.row(i), table.cols);
}

void normalize_rows(Table& table, std::span<const std::int32_t> rows) {
  for (std::int32_t i : rows) normalize_row(table.row(std::size_t(i)), table.cols);
}

}  // namespace kge
