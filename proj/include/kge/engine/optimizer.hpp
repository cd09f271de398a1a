#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kge/ckge/grad.hpp"
#include "kge/ckge/model.hpp"
#include "kge/engine/config.hpp"

namespace kge {

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::kAdam;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  friend bool operator==(const OptimizerSpec&, const OptimizerSpec&) = default;
};

OptimizerSpec optimizer_spec(const TrainConfig& config);

// Sparse (lazy) optimizer: only rows present in the gradient are updated and
// only their state advances. Parameters stay float32; updates are computed in
// double from the stored values.
//
//   sgd      x -= lr g
//   adagrad  G += g^2;  x -= lr g / (sqrt(G) + 1e-10)
//   adam     per-row step count t; bias-corrected first/second moments
class Optimizer {
 public:
  Optimizer() = default;
  explicit Optimizer(const OptimizerSpec& spec) : spec_(spec) {}

  const OptimizerSpec& spec() const { return spec_; }

  // Gradient table i updates tables[i]. Throws NumericError naming the table
  // and row if any gradient entry is non-finite; nothing is modified then.
  void step(std::span<Table* const> tables, std::span<const std::string> names, const SparseGrad& grad);

  // Convenience for conventional models (table slots as TableId).
  void step(ModelParams& params, const SparseGrad& grad);

  // State tables with stable names, for checkpointing. State for table i is
  // allocated on first use, so the list grows as tables get touched.
  std::vector<std::pair<std::string, const Table*>> state(std::span<const std::string> names) const;

  // Restores a state table saved under `name` for parameter table i.
  void set_state(std::size_t table, std::string_view slot, Table value);

  static std::vector<std::string_view> slot_names(OptimizerKind kind);

  friend bool operator==(const Optimizer&, const Optimizer&) = default;

 private:
  // Per parameter table: adagrad {G}, adam {m, v, t}; t is [rows x 1].
  struct State {
    std::array<Table, 3> slots;
    friend bool operator==(const State&, const State&) = default;
  };

  State& state_for(std::size_t i, const Table& param);

  OptimizerSpec spec_;
  std::vector<State> state_;
};

// Table pointers and names of a conventional model, in TableId order.
std::vector<Table*> param_tables(ModelParams& params);
std::vector<std::string> param_table_names();

}  // namespace kge
