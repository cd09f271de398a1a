#pragma once

#include <vector>

#include "kge/kgdata/kgdata.hpp"
#include "kge/sampler/sampler.hpp"

namespace kge {

// Subgraph for RGCN message passing. Edge and training-triple endpoints are
// local node indices; relation ids stay global.
struct GraphBatch {
  std::vector<EntityId> node_ids;  // local -> global entity id
  std::vector<Triple> edges;
  std::vector<double> edge_norm;  // 1 / #edges sharing (dst, rel)
  std::vector<double> node_norm;  // 1 / in-degree, 1 for nodes without in-edges
  std::vector<Triple> positives;
  std::size_t n_neg = 0;
  std::vector<Triple> negatives;  // [positives.size() x n_neg]

  std::size_t n_nodes() const { return node_ids.size(); }
};

// Recomputes edge_norm and node_norm from the current edge list.
void compute_norms(GraphBatch& g);

// Samples n_edges train triples without replacement. Nodes are the incident
// entities in ascending id order; sampled edges double as positives, each
// with n_neg uniform corruptions drawn over the batch nodes.
GraphBatch sample_graph(const IndexedKG& kg, std::size_t n_edges, std::size_t n_neg, Rng& rng);

// All entities as nodes, all train triples as edges, no training triples.
GraphBatch full_graph(const IndexedKG& kg);

// Uniform corruptions over the batch's own nodes for the given local
// positives, filtered against train through the global ids.
void attach_negatives(GraphBatch& g, const IndexedKG& kg, std::size_t n_neg, Rng& rng);

// Removes each edge independently with probability `rate` and renormalizes.
GraphBatch drop_edges(const GraphBatch& g, double rate, Rng& rng);

}  // namespace kge
