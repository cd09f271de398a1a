#include "kge/engine/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "kge/ckge/score.hpp"
#include "kge/error.hpp"
#include "kge/sampler/sampler.hpp"

namespace kge {
namespace {

const std::vector<EntityId>& lookup(const std::unordered_map<std::uint64_t, std::vector<EntityId>>& m,
                                    std::uint64_t key) {
  static const std::vector<EntityId> kEmpty;
  auto it = m.find(key);
  return it == m.end() ? kEmpty : it->second;
}

void sort_unique(std::unordered_map<std::uint64_t, std::vector<EntityId>>& m) {
  for (auto& [k, v] : m) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

// Ranks `target` among all entities in the varying slot of `make(e)`,
// skipping the known ones (sorted) other than the target.
template <typename Make>
double rank_query(const TripleScorer& scorer, std::size_t n_entities, EntityId target,
                  const std::vector<EntityId>& known, Make make) {
  const double s_target = scorer(make(target));
  std::size_t greater = 0, equal = 0, competitors = 0;
  auto skip = known.begin();
  for (std::size_t e = 0; e < n_entities; ++e) {
    const EntityId id = EntityId(e);
    if (id == target) continue;
    while (skip != known.end() && *skip < id) ++skip;
    if (skip != known.end() && *skip == id) continue;
    ++competitors;
    const double s = scorer(make(id));
    if (s > s_target) ++greater;
    else if (s == s_target) ++equal;
  }
  // A NaN target compares false against everything; rank it last.
  if (std::isnan(s_target)) return double(competitors + 1);
  return mid_rank(greater, equal);
}

}  // namespace

const std::vector<EntityId>& FilterIndex::known_tails(EntityId h, RelationId r) const {
  return lookup(tails, pair_key(h, r));
}

const std::vector<EntityId>& FilterIndex::known_heads(RelationId r, EntityId t) const {
  return lookup(heads, pair_key(r, t));
}

FilterIndex build_filter(const IndexedKG& kg) {
  FilterIndex f;
  for (const auto* split : {&kg.train, &kg.valid, &kg.test}) {
    for (const Triple& x : *split) {
      f.tails[pair_key(x.h, x.r)].push_back(x.t);
      f.heads[pair_key(x.r, x.t)].push_back(x.h);
    }
  }
  sort_unique(f.tails);
  sort_unique(f.heads);
  return f;
}

double mid_rank(std::size_t n_greater, std::size_t n_equal) {
  return double(1 + n_greater + (n_equal + 1) / 2);
}

DirectionMetrics aggregate(std::span<const double> ranks) {
  DirectionMetrics m;
  if (ranks.empty()) return m;
  std::size_t h1 = 0, h3 = 0, h10 = 0;
  double rr = 0.0;
  for (double r : ranks) {
    rr += 1.0 / r;
    h1 += r <= 1.0;
    h3 += r <= 3.0;
    h10 += r <= 10.0;
  }
  const double n = double(ranks.size());
  m.mrr = rr / n;
  m.hits1 = double(h1) / n;
  m.hits3 = double(h3) / n;
  m.hits10 = double(h10) / n;
  return m;
}

RankingReport evaluate(const ModelParams& params, std::span<const Triple> queries, const FilterIndex& filter,
                       const EvalOptions& options) {
  if (queries.empty()) throw DataError("cannot evaluate an empty split");
  check_ids(params, queries);
  if (options.inverse_offset != 0) {
    for (const Triple& q : queries) {
      if (std::size_t(q.r) + options.inverse_offset >= params.n_relations()) {
        throw DataError("inverse relation for " + std::to_string(q.r) + " is out of range");
      }
    }
  }
  const TripleScorer scorer(params);
  const std::size_t ne = params.n_entities();
  const RelationId offset = RelationId(options.inverse_offset);

  RankingReport report;
  report.n_queries = queries.size();
  report.head_ranks.assign(queries.size(), 0.0);
  report.tail_ranks.assign(queries.size(), 0.0);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Triple q = queries[i];
      report.tail_ranks[i] = rank_query(scorer, ne, q.t, filter.known_tails(q.h, q.r),
                                        [&](EntityId e) { return Triple{q.h, q.r, e}; });
      if (offset != 0) {
        report.head_ranks[i] = rank_query(scorer, ne, q.h, filter.known_heads(q.r, q.t),
                                          [&](EntityId e) { return Triple{q.t, RelationId(q.r + offset), e}; });
      } else {
        report.head_ranks[i] = rank_query(scorer, ne, q.h, filter.known_heads(q.r, q.t),
                                          [&](EntityId e) { return Triple{e, q.r, q.t}; });
      }
    }
  };

  const std::size_t n_threads = std::clamp<std::size_t>(options.threads, 1, queries.size());
  if (n_threads == 1) {
    work(0, queries.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (queries.size() + n_threads - 1) / n_threads;
    for (std::size_t b = 0; b < queries.size(); b += chunk) {
      pool.emplace_back(work, b, std::min(queries.size(), b + chunk));
    }
    for (auto& t : pool) t.join();
  }

  report.head = aggregate(report.head_ranks);
  report.tail = aggregate(report.tail_ranks);
  report.both.mrr = (report.head.mrr + report.tail.mrr) / 2.0;
  report.both.hits1 = (report.head.hits1 + report.tail.hits1) / 2.0;
  report.both.hits3 = (report.head.hits3 + report.tail.hits3) / 2.0;
  report.both.hits10 = (report.head.hits10 + report.tail.hits10) / 2.0;
  return report;
}

std::vector<Triple> validation_subset(std::span<const Triple> split, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("limit_val_batches must be in (0, 1]");
  std::vector<Triple> out(split.begin(), split.end());
  if (fraction >= 1.0 || out.empty()) return out;
  Rng rng(seed);
  std::shuffle(out.begin(), out.end(), rng);
  const auto keep = std::max<std::size_t>(1, std::size_t(std::ceil(fraction * double(out.size()))));
  out.resize(std::min(keep, out.size()));
  return out;
}

}  // namespace kge
