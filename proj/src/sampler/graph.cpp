#include "kge/sampler/graph.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "kge/error.hpp"

namespace kge {

void compute_norms(GraphBatch& g) {
  std::unordered_map<std::uint64_t, std::int64_t> per_dst_rel;
  std::vector<std::int64_t> in_degree(g.n_nodes(), 0);
  for (const Triple& e : g.edges) {
    ++per_dst_rel[pair_key(e.t, e.r)];
    ++in_degree[std::size_t(e.t)];
  }
  g.edge_norm.resize(g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    g.edge_norm[i] = 1.0 / double(per_dst_rel[pair_key(g.edges[i].t, g.edges[i].r)]);
  }
  g.node_norm.resize(g.n_nodes());
  for (std::size_t v = 0; v < g.n_nodes(); ++v) {
    g.node_norm[v] = in_degree[v] > 0 ? 1.0 / double(in_degree[v]) : 1.0;
  }
}

void attach_negatives(GraphBatch& g, const IndexedKG& kg, std::size_t n_neg, Rng& rng) {
  if (n_neg == 0) throw ConfigError("n_neg must be >= 1");
  if (g.n_nodes() == 0) throw DataError("graph batch has no nodes");
  g.n_neg = n_neg;
  g.negatives.clear();
  g.negatives.reserve(g.positives.size() * n_neg);
  std::uniform_int_distribution<EntityId> pick(0, EntityId(g.n_nodes() - 1));
  std::bernoulli_distribution head_coin(0.5);
  auto global = [&](const Triple& x) { return Triple{g.node_ids[std::size_t(x.h)], x.r, g.node_ids[std::size_t(x.t)]}; };
  for (const Triple& pos : g.positives) {
    for (std::size_t k = 0; k < n_neg; ++k) {
      const bool head = head_coin(rng);
      Triple cand = pos;
      for (int attempt = 0; attempt < kRetryCap; ++attempt) {
        cand = pos;
        (head ? cand.h : cand.t) = pick(rng);
        if (cand != pos && !kg.in_train(global(cand))) break;
      }
      g.negatives.push_back(cand);
    }
  }
}

GraphBatch sample_graph(const IndexedKG& kg, std::size_t n_edges, std::size_t n_neg, Rng& rng) {
  if (n_edges > kg.train.size()) {
    throw ConfigError("cannot sample " + std::to_string(n_edges) + " edges from " +
                      std::to_string(kg.train.size()) + " train triples");
  }
  std::vector<std::size_t> all(kg.train.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  picked.reserve(n_edges);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), n_edges, rng);

  GraphBatch g;
  for (std::size_t i : picked) {
    g.node_ids.push_back(kg.train[i].h);
    g.node_ids.push_back(kg.train[i].t);
  }
  std::sort(g.node_ids.begin(), g.node_ids.end());
  g.node_ids.erase(std::unique(g.node_ids.begin(), g.node_ids.end()), g.node_ids.end());

  auto local = [&](EntityId e) {
    return EntityId(std::lower_bound(g.node_ids.begin(), g.node_ids.end(), e) - g.node_ids.begin());
  };
  g.edges.reserve(picked.size());
  for (std::size_t i : picked) {
    const Triple& x = kg.train[i];
    g.edges.push_back({local(x.h), x.r, local(x.t)});
  }
  compute_norms(g);
  g.positives = g.edges;
  attach_negatives(g, kg, n_neg, rng);
  return g;
}

GraphBatch full_graph(const IndexedKG& kg) {
  GraphBatch g;
  g.node_ids.resize(kg.n_entities);
  std::iota(g.node_ids.begin(), g.node_ids.end(), EntityId{0});
  g.edges = kg.train;
  compute_norms(g);
  return g;
}

GraphBatch drop_edges(const GraphBatch& g, double rate, Rng& rng) {
  GraphBatch out = g;
  if (rate <= 0.0) return out;
  std::bernoulli_distribution drop(rate);
  out.edges.clear();
  for (const Triple& e : g.edges) {
    if (!drop(rng)) out.edges.push_back(e);
  }
  compute_norms(out);
  return out;
}

}  // namespace kge
