#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "kge/ckge/model.hpp"
#include "kge/kgdata/kgdata.hpp"

namespace kge {

// Known triples over train, valid and test: candidates to drop in the
// filtered setting.
struct FilterIndex {
  std::unordered_map<std::uint64_t, std::vector<EntityId>> tails;  // pair_key(h, r), sorted
  std::unordered_map<std::uint64_t, std::vector<EntityId>> heads;  // pair_key(r, t), sorted

  const std::vector<EntityId>& known_tails(EntityId h, RelationId r) const;
  const std::vector<EntityId>& known_heads(RelationId r, EntityId t) const;
};

FilterIndex build_filter(const IndexedKG& kg);

struct DirectionMetrics {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
};

struct RankingReport {
  DirectionMetrics head;  // (?, r, t)
  DirectionMetrics tail;  // (h, r, ?)
  DirectionMetrics both;  // mean of the two directions
  std::size_t n_queries = 0;
  // Per-query ranks in query order.
  std::vector<double> head_ranks;
  std::vector<double> tail_ranks;
};

// Mid-rank of a target among competitors:
//   1 + #greater + ceil(#equal / 2)
// where #equal excludes the target itself.
double mid_rank(std::size_t n_greater, std::size_t n_equal);

// Metrics of a rank list, summed in list order.
DirectionMetrics aggregate(std::span<const double> ranks);

struct EvalOptions {
  std::size_t threads = 1;
  // When non-zero, head queries (?, r, t) are scored as (t, r + offset, ?),
  // the inverse-relation convention.
  std::size_t inverse_offset = 0;
};

// Filtered ranking of every query in both directions. Each candidate is
// scored on its own, so results do not depend on the thread count. Throws
// DataError on an empty query list.
RankingReport evaluate(const ModelParams& params, std::span<const Triple> queries, const FilterIndex& filter,
                       const EvalOptions& options = {});

// Deterministic evaluation subset: the first ceil(fraction * n) queries of a
// seed-shuffled copy (at least one).
std::vector<Triple> validation_subset(std::span<const Triple> split, double fraction, std::uint64_t seed);

}  // namespace kge
