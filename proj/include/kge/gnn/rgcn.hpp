#pragma once

#include <span>
#include <string>
#include <vector>

#include "kge/ckge/grad.hpp"
#include "kge/ckge/model.hpp"
#include "kge/sampler/graph.hpp"

namespace kge {

// Dense row-major double matrix for activations.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
};

enum class Activation { kIdentity, kRelu };

// One relational graph convolution with basis-decomposed relation weights
//   W_r = sum_b coeff[r][b] * bases[b]
//   out(i) = act( sum_{(j,r,i)} edge_norm * in(j) W_r + in(i) W_0 )
// Row vectors multiply from the left, so each basis is d_in x d_out.
struct RgcnLayerParams {
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  Table bases;      // [n_bases x (d_in * d_out)]
  Table coeff;      // [n_relations x n_bases]
  Table self_loop;  // [d_in x d_out]
  Activation act = Activation::kRelu;

  std::size_t n_bases() const { return bases.rows; }
  std::size_t n_relations() const { return coeff.rows; }
};

// Encoder layers plus the learned input table and a DistMult decoder.
struct RgcnModel {
  std::size_t dim = 0;
  Table entity;    // layer-0 input features [n_entities x dim]
  Table relation;  // decoder relation vectors [n_relations x dim]
  std::vector<RgcnLayerParams> layers;
  std::uint64_t version = 0;

  // Flat table list for the optimizer and checkpoints: entity, relation,
  // then bases/coeff/self_loop per layer.
  std::vector<Table*> tables();
  std::vector<const Table*> tables() const;
  std::vector<std::string> table_names() const;
};

RgcnModel init_rgcn(std::size_t n_entities, std::size_t n_relations, std::size_t dim, std::size_t n_layers,
                    std::size_t n_bases, std::uint64_t seed);

// Activations kept for the backward pass.
struct RgcnCache {
  std::vector<Matrix> inputs;  // per layer input
  std::vector<Matrix> basis_proj;  // per layer, [nodes x (n_bases * d_out)]
  std::vector<Matrix> pre;     // per layer pre-activation
};

// Node representations for graph.node_ids. Throws DataError on dimension or
// index mismatches.
Matrix rgcn_forward(std::span<const RgcnLayerParams> layers, const GraphBatch& graph, const Matrix& input,
                    RgcnCache* cache = nullptr);

// Gathers entity rows for the graph's nodes.
Matrix gather_input(const Table& entity, const GraphBatch& graph);

// Layerwise backward. Adds parameter gradients to `out` (table indices as in
// RgcnModel::tables()) and returns dL/d input.
Matrix rgcn_backward(std::span<const RgcnLayerParams> layers, const GraphBatch& graph, const RgcnCache& cache,
                     const Matrix& d_output, SparseGrad& out);

// DistMult over encoded node rows; triples use row indices of `encoded`.
std::vector<double> rgcn_score(const Matrix& encoded, const Table& relation, std::span<const Triple> triples);

struct RgcnBatchLoss {
  double loss = 0.0;
  SparseGrad grad;
};

// BCE over graph.positives (label 1) and graph.negatives (label 0) after
// encoding `graph`; gradients flow through decoder and encoder.
RgcnBatchLoss rgcn_loss_and_grad(const RgcnModel& model, const GraphBatch& graph);

// Encodes every entity over the full train graph and packs the result as
// DistMult parameters, so the conventional evaluation path applies.
ModelParams rgcn_export_distmult(const RgcnModel& model, const IndexedKG& kg);

}  // namespace kge
