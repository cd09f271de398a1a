#pragma once

// Brute-force filtered ranking: every candidate triple is looked up in a
// plain set of all known triples and scored on its own.

#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "kge/ckge/score.hpp"
#include "kge/engine/evaluate.hpp"

namespace kge::test {

struct OracleRanks {
  std::vector<double> head, tail;
};

inline OracleRanks brute_force_ranks(const ModelParams& p, const IndexedKG& kg, std::span<const Triple> queries,
                                     std::size_t inverse_offset = 0) {
  std::set<std::tuple<int, int, int>> known;
  for (const auto* split : {&kg.train, &kg.valid, &kg.test}) {
    for (const Triple& x : *split) known.insert({x.h, x.r, x.t});
  }
  auto s = [&](Triple x) { return score(p, std::span<const Triple>(&x, 1))[0]; };
  auto rank = [&](double target, const std::vector<double>& others) {
    // Competitors scoring higher count fully, ties count half (rounded up).
    std::size_t above = 0, tied = 0;
    for (double o : others) {
      above += o > target;
      tied += o == target;
    }
    return 1.0 + double(above) + double((tied + 1) / 2);
  };
  OracleRanks out;
  for (const Triple& q : queries) {
    std::vector<double> tails, heads;
    for (std::size_t e = 0; e < kg.n_entities; ++e) {
      const int id = int(e);
      if (id != q.t && !known.count({q.h, q.r, id})) tails.push_back(s({q.h, q.r, EntityId(id)}));
      if (id != q.h && !known.count({id, q.r, q.t})) {
        heads.push_back(inverse_offset ? s({q.t, RelationId(q.r + int(inverse_offset)), EntityId(id)})
                                       : s({EntityId(id), q.r, q.t}));
      }
    }
    out.tail.push_back(rank(s(q), tails));
    out.head.push_back(rank(inverse_offset ? s({q.t, RelationId(q.r + int(inverse_offset)), q.h}) : s(q), heads));
  }
  return out;
}

inline DirectionMetrics oracle_metrics(const std::vector<double>& ranks) {
  DirectionMetrics m;
  double rr = 0.0;
  std::size_t h1 = 0, h3 = 0, h10 = 0;
  for (double r : ranks) {
    rr += 1.0 / r;
    h1 += r <= 1;
    h3 += r <= 3;
    h10 += r <= 10;
  }
  const double n = double(ranks.size());
  return {rr / n, double(h1) / n, double(h3) / n, double(h10) / n};
}

inline bool same_metrics(const DirectionMetrics& a, const DirectionMetrics& b) {
  return a.mrr == b.mrr && a.hits1 == b.hits1 && a.hits3 == b.hits3 && a.hits10 == b.hits10;
}

// Full report from the oracle ranks, averaged over directions.
inline bool report_matches_oracle(const RankingReport& r, const OracleRanks& o) {
  if (r.head_ranks != o.head || r.tail_ranks != o.tail) return false;
  const DirectionMetrics h = oracle_metrics(o.head), t = oracle_metrics(o.tail);
  const DirectionMetrics both{(h.mrr + t.mrr) / 2, (h.hits1 + t.hits1) / 2, (h.hits3 + t.hits3) / 2,
                              (h.hits10 + t.hits10) / 2};
  return same_metrics(r.head, h) && same_metrics(r.tail, t) && same_metrics(r.both, both);
}

// Parameters with coarse values so that ties occur often.
inline void quantize(ModelParams& p) {
  for (auto& t : p.tables) {
    for (float& v : t.data) v = float(std::round(v * 2.0f)) / 2.0f;
  }
}

}  // namespace kge::test
