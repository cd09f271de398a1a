#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kge/ckge/model.hpp"
#include "kge/engine/checkpoint.hpp"
#include "kge/engine/config.hpp"
#include "kge/engine/early_stop.hpp"
#include "kge/engine/evaluate.hpp"
#include "kge/gnn/rgcn.hpp"
#include "kge/kgdata/kgdata.hpp"

namespace kge {

// Parameters of any model family. Conventional and rule-injected models use
// `params`; RGCN uses `rgcn`.
struct TrainedModel {
  ModelFamily family = ModelFamily::kConventional;
  ModelParams params;
  RgcnModel rgcn;
};

// The graph a config trains on: inverse relations are added when requested
// and always for RGCN.
IndexedKG prepare_kg(const TrainConfig& config, const IndexedKG& kg);

// Freshly initialized model for a config over a prepared graph.
TrainedModel init_model(const TrainConfig& config, const IndexedKG& kg);

// Parameters the evaluator scores with (the RGCN encoder output packed as
// DistMult, the parameters themselves otherwise).
ModelParams scoring_params(const TrainedModel& model, const IndexedKG& kg);

EvalOptions eval_options(const IndexedKG& kg, std::size_t threads);

// Filtered ranking of a split of the prepared graph.
RankingReport evaluate_model(const TrainedModel& model, const IndexedKG& kg, std::span<const Triple> split,
                             std::size_t threads);

// Rebuilds the model stored in a checkpoint (checked against the graph).
TrainedModel model_from_checkpoint(const Checkpoint& ckpt, const IndexedKG& kg);

struct TrainOptions {
  // When set: `last` and `best` checkpoints and `log.tsv` are written here.
  std::filesystem::path run_dir;
  // Checkpoint directory to continue from; its config hash must match.
  std::filesystem::path resume;
  // Log lines are mirrored to this stream when non-null.
  std::ostream* echo = nullptr;
};

struct TrainResult {
  TrainedModel best;  // best validation MRR (the last model if never evaluated)
  TrainedModel last;
  std::size_t epochs = 0;
  std::size_t best_epoch = 0;
  double best_metric = 0.0;
  bool stopped_early = false;
  MetricHistory history;
  // `epoch<TAB>split<TAB>metric<TAB>value` lines.
  std::vector<std::string> log;
  Checkpoint final_state;
};

// Mini-batch training with periodic validation and early stopping on
// data.kg as prepared by prepare_kg. Throws ConfigError on an invalid config
// before any compute.
TrainResult train(const TrainConfig& config, const Dataset& data, const TrainOptions& options = {});

}  // namespace kge
