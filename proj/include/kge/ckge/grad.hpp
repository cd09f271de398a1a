#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "kge/ckge/loss.hpp"
#include "kge/ckge/model.hpp"
#include "kge/ckge/score.hpp"

namespace kge {

// Gradient rows for the parameter rows a batch touched, in double precision.
// Tables are addressed by index (TableId for KGE models, layer-local indices
// for the RGCN encoder). Rows keep first-touch order.
class SparseGrad {
 public:
  struct TableGrad {
    std::size_t cols = 0;
    std::vector<std::int32_t> rows;
    std::vector<double> values;  // [rows.size() x cols]
    std::unordered_map<std::int32_t, std::size_t> slot;

    std::span<const double> row_at(std::size_t k) const { return {values.data() + k * cols, cols}; }
    std::span<double> row_at(std::size_t k) { return {values.data() + k * cols, cols}; }
  };

  explicit SparseGrad(std::size_t n_tables = kNumTables) : tables_(n_tables) {}

  // grad[table][row] += scale * v. v.size() fixes the table's column count.
  void add(std::size_t table, std::int32_t row, std::span<const double> v, double scale = 1.0);

  // Pointer to the accumulated row, nullptr if untouched.
  const double* find(std::size_t table, std::int32_t row) const;

  const TableGrad& table(std::size_t i) const { return tables_[i]; }
  std::size_t n_tables() const { return tables_.size(); }
  std::size_t touched_rows() const;
  bool empty() const { return touched_rows() == 0; }

  void merge(const SparseGrad& other, double scale = 1.0);

 private:
  std::vector<TableGrad> tables_;
};

// out += coef * d score(x) / d params. Does nothing when coef == 0, so
// triples that do not affect the loss leave no rows behind.
void accumulate_score_grad(const TripleScorer& scorer, const Triple& x, double coef, SparseGrad& out);

struct BatchLoss {
  double loss = 0.0;
  SparseGrad grad;
};

// Loss over positives and their negatives. For bce the positives are labelled
// 1 and negatives 0, smoothed as y (1 - eps) + eps / 2.
BatchLoss loss_and_grad(const ModelParams& params, const NegBatch& batch, const LossSpec& spec);

// Mean bce over explicitly labelled triples; `weight` scales loss and gradient.
BatchLoss labeled_loss_and_grad(const ModelParams& params, std::span<const Triple> triples,
                                std::span<const double> labels, double weight = 1.0);

// Plain gradient entry points.
SparseGrad grad(const ModelParams& params, const NegBatch& batch, const LossSpec& spec);
SparseGrad grad(const ModelParams& params, std::span<const Triple> triples, std::span<const double> labels);

}  // namespace kge
