#include "kge/sampler/sampler.hpp"

#include <string>

#include "kge/error.hpp"

namespace kge {
namespace {

template <typename HeadProbability>
NegBatch corrupt(std::span<const Triple> batch, std::size_t n_neg, const IndexedKG& kg, Rng& rng,
                 HeadProbability&& p_head) {
  if (n_neg == 0) throw ConfigError("n_neg must be >= 1");
  if (kg.n_entities == 0) throw DataError("cannot sample negatives from an empty entity set");

  NegBatch out;
  out.positives.assign(batch.begin(), batch.end());
  out.n_neg = n_neg;
  out.negatives.reserve(batch.size() * n_neg);
  out.slots.reserve(batch.size() * n_neg);
  out.unfiltered.reserve(batch.size() * n_neg);

  std::uniform_int_distribution<EntityId> pick(0, EntityId(kg.n_entities - 1));
  for (const Triple& pos : batch) {
    std::bernoulli_distribution head_coin(p_head(pos.r));
    for (std::size_t k = 0; k < n_neg; ++k) {
      const Slot slot = head_coin(rng) ? Slot::kHead : Slot::kTail;
      Triple cand = pos;
      bool ok = false;
      for (int attempt = 0; attempt < kRetryCap; ++attempt) {
        cand = pos;
        const EntityId e = pick(rng);
        if (slot == Slot::kHead) {
          cand.h = e;
        } else {
          cand.t = e;
        }
        if (cand != pos && !kg.in_train(cand)) {
          ok = true;
          break;
        }
      }
      out.negatives.push_back(cand);
      out.slots.push_back(slot);
      out.unfiltered.push_back(ok ? 0 : 1);
    }
  }
  return out;
}

}  // namespace

std::vector<Triple> filter_known(std::span<const Triple> candidates, const IndexedKG& kg) {
  std::vector<Triple> out;
  out.reserve(candidates.size());
  for (const Triple& c : candidates) {
    if (!kg.in_train(c)) out.push_back(c);
  }
  return out;
}

NegBatch uniform_negatives(std::span<const Triple> batch, std::size_t n_neg, const IndexedKG& kg, Rng& rng) {
  return corrupt(batch, n_neg, kg, rng, [](RelationId) { return 0.5; });
}

double BernoulliTable::head_probability(RelationId r) const {
  if (r < 0 || std::size_t(r) >= present.size() || !present[std::size_t(r)]) {
    throw DataError("relation " + std::to_string(r) + " does not occur in train");
  }
  return p_head[std::size_t(r)];
}

BernoulliTable bernoulli_table(const IndexedKG& kg) {
  const std::size_t n = kg.n_relations;
  std::vector<std::int64_t> heads(n, 0), tails(n, 0), facts(n, 0);
  for (const auto& [key, ts] : kg.hr2t) {
    const auto r = std::size_t(std::uint32_t(key));
    ++heads[r];
    facts[r] += std::int64_t(ts.size());
  }
  for (const auto& [key, hs] : kg.rt2h) {
    ++tails[std::size_t(key >> 32)];
  }

  BernoulliTable table;
  table.tph.assign(n, 0.0);
  table.hpt.assign(n, 0.0);
  table.p_head.assign(n, 0.5);
  table.present.assign(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    if (facts[r] == 0) continue;
    table.present[r] = 1;
    table.tph[r] = double(facts[r]) / double(heads[r]);
    table.hpt[r] = double(facts[r]) / double(tails[r]);
    table.p_head[r] = table.tph[r] / (table.tph[r] + table.hpt[r]);
  }
  return table;
}

NegBatch bern_negatives(std::span<const Triple> batch, std::size_t n_neg, const BernoulliTable& table,
                        const IndexedKG& kg, Rng& rng) {
  for (const Triple& x : batch) table.head_probability(x.r);
  return corrupt(batch, n_neg, kg, rng, [&](RelationId r) { return table.p_head[std::size_t(r)]; });
}

std::vector<Triple> all_negatives(const Triple& x, Slot slot, std::size_t n_entities) {
  std::vector<Triple> out(n_entities, x);
  for (std::size_t e = 0; e < n_entities; ++e) {
    if (slot == Slot::kHead) {
      out[e].h = EntityId(e);
    } else {
      out[e].t = EntityId(e);
    }
  }
  return out;
}

}  // namespace kge
