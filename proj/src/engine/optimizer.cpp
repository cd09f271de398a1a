#include "kge/engine/optimizer.hpp"

#include <cmath>
#include <string>

#include "kge/error.hpp"

namespace kge {

OptimizerSpec optimizer_spec(const TrainConfig& config) {
  return {config.optimizer, config.lr, config.adam_beta1, config.adam_beta2, config.adam_eps};
}

std::vector<std::string_view> Optimizer::slot_names(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kSgd: return {};
    case OptimizerKind::kAdagrad: return {"G"};
    case OptimizerKind::kAdam: return {"m", "v", "t"};
  }
  return {};
}

Optimizer::State& Optimizer::state_for(std::size_t i, const Table& param) {
  if (state_.size() <= i) state_.resize(i + 1);
  State& s = state_[i];
  switch (spec_.kind) {
    case OptimizerKind::kSgd:
      break;
    case OptimizerKind::kAdagrad:
      if (s.slots[0].empty()) s.slots[0] = Table(param.rows, param.cols);
      break;
    case OptimizerKind::kAdam:
      if (s.slots[0].empty()) {
        s.slots[0] = Table(param.rows, param.cols);
        s.slots[1] = Table(param.rows, param.cols);
        s.slots[2] = Table(param.rows, 1);
      }
      break;
  }
  return s;
}

void Optimizer::step(std::span<Table* const> tables, std::span<const std::string> names, const SparseGrad& grad) {
  if (grad.n_tables() > tables.size()) throw DataError("gradient has more tables than the model");
  for (std::size_t i = 0; i < grad.n_tables(); ++i) {
    const auto& tg = grad.table(i);
    if (tg.rows.empty()) continue;
    const Table& param = *tables[i];
    const std::string name = i < names.size() ? names[i] : std::to_string(i);
    if (tg.cols != param.cols) throw DataError("gradient width mismatch for table " + name);
    for (std::size_t k = 0; k < tg.rows.size(); ++k) {
      const std::int32_t row = tg.rows[k];
      if (row < 0 || std::size_t(row) >= param.rows) {
        throw DataError("gradient row " + std::to_string(row) + " out of range for table " + name);
      }
      for (double g : tg.row_at(k)) {
        if (!std::isfinite(g)) {
          throw NumericError("non-finite gradient in table " + name + " row " + std::to_string(row));
        }
      }
    }
  }

  const double lr = spec_.lr;
  for (std::size_t i = 0; i < grad.n_tables(); ++i) {
    const auto& tg = grad.table(i);
    if (tg.rows.empty()) continue;
    Table& param = *tables[i];
    State& st = state_for(i, param);
    for (std::size_t k = 0; k < tg.rows.size(); ++k) {
      const std::size_t row = std::size_t(tg.rows[k]);
      const auto g = tg.row_at(k);
      float* x = param.row(row);
      switch (spec_.kind) {
        case OptimizerKind::kSgd:
          for (std::size_t c = 0; c < g.size(); ++c) x[c] = float(double(x[c]) - lr * g[c]);
          break;
        case OptimizerKind::kAdagrad: {
          float* acc = st.slots[0].row(row);
          for (std::size_t c = 0; c < g.size(); ++c) {
            const double G = double(acc[c]) + g[c] * g[c];
            acc[c] = float(G);
            x[c] = float(double(x[c]) - lr * g[c] / (std::sqrt(double(acc[c])) + 1e-10));
          }
          break;
        }
        case OptimizerKind::kAdam: {
          float* m = st.slots[0].row(row);
          float* v = st.slots[1].row(row);
          float& t = st.slots[2].row(row)[0];
          t = float(double(t) + 1.0);
          const double c1 = 1.0 - std::pow(spec_.beta1, double(t));
          const double c2 = 1.0 - std::pow(spec_.beta2, double(t));
          for (std::size_t c = 0; c < g.size(); ++c) {
            m[c] = float(spec_.beta1 * double(m[c]) + (1.0 - spec_.beta1) * g[c]);
            v[c] = float(spec_.beta2 * double(v[c]) + (1.0 - spec_.beta2) * g[c] * g[c]);
            const double mhat = double(m[c]) / c1;
            const double vhat = double(v[c]) / c2;
            x[c] = float(double(x[c]) - lr * mhat / (std::sqrt(vhat) + spec_.eps));
          }
          break;
        }
      }
    }
  }
}

void Optimizer::step(ModelParams& params, const SparseGrad& grad) {
  static const std::vector<std::string> names = param_table_names();
  const std::vector<Table*> tables = param_tables(params);
  step(tables, names, grad);
}

std::vector<std::pair<std::string, const Table*>> Optimizer::state(std::span<const std::string> names) const {
  std::vector<std::pair<std::string, const Table*>> out;
  const auto slots = slot_names(spec_.kind);
  for (std::size_t i = 0; i < state_.size(); ++i) {
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const Table& t = state_[i].slots[s];
      if (t.empty()) continue;
      const std::string base = i < names.size() ? names[i] : std::to_string(i);
      out.emplace_back("opt." + base + "." + std::string(slots[s]), &t);
    }
  }
  return out;
}

void Optimizer::set_state(std::size_t table, std::string_view slot, Table value) {
  const auto slots = slot_names(spec_.kind);
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (slots[s] == slot) {
      if (state_.size() <= table) state_.resize(table + 1);
      state_[table].slots[s] = std::move(value);
      return;
    }
  }
  throw CheckpointError("optimizer " + std::string(optimizer_name(spec_.kind)) + " has no state slot '" +
                        std::string(slot) + "'");
}

std::vector<Table*> param_tables(ModelParams& params) {
  std::vector<Table*> out;
  for (auto& t : params.tables) out.push_back(&t);
  return out;
}

std::vector<std::string> param_table_names() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kNumTables; ++i) out.emplace_back(table_name(TableId(i)));
  return out;
}

}  // namespace kge
