#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kge/ckge/loss.hpp"
#include "kge/ckge/model.hpp"

namespace kge {

enum class OptimizerKind { kSgd, kAdagrad, kAdam };
enum class SamplerKind { kUniform, kBernoulli, kAdversarial, kAll };

// Which training loop a config drives.
enum class ModelFamily { kConventional, kRgcn, kRuge };

struct TrainConfig {
  std::string model = "TransE";  // a ModelKind name, "RGCN" or "RUGE"
  std::string dataset;
  std::size_t dim = 64;
  double lr = 0.01;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  LossSpec loss;
  SamplerKind sampler = SamplerKind::kUniform;
  std::size_t n_neg = 32;
  std::size_t batch_size = 256;
  std::size_t max_epochs = 100;
  std::size_t check_per_epoch = 10;
  double limit_val_batches = 1.0;
  std::size_t patience = 3;
  std::uint64_t seed = 42;
  bool inverse = false;
  int p_norm = 1;
  bool renormalize = true;
  // RUGE
  std::string rules;
  std::string groundings;
  double rule_c = 0.5;
  // RGCN
  std::size_t rgcn_layers = 2;
  std::size_t rgcn_bases = 4;
  double edge_dropout = 0.2;
  std::size_t graph_threshold = 50000;
  std::size_t graph_edges = 30000;
  // Runtime only; excluded from the config hash.
  std::size_t threads = 1;
  std::string output;

  ModelFamily family() const;
  // Conventional kind; ComplEx for RUGE. Throws for RGCN.
  ModelKind kge_kind() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

std::string_view optimizer_name(OptimizerKind k);
std::string_view sampler_name(SamplerKind k);

// Sets one field from its textual value. Throws ConfigError naming the key on
// unknown keys or unparsable values.
void apply_setting(TrainConfig& config, const std::string& key, const std::string& value);

bool is_known_key(const std::string& key);

// Canonical key/value listing in fixed key order; apply_setting inverts it.
std::vector<std::pair<std::string, std::string>> settings(const TrainConfig& config);

// Digest over settings that shape the training trajectory (everything except
// max_epochs, patience, threads and output).
std::uint64_t config_hash(const TrainConfig& config);

// Rejects inconsistent configurations before any compute.
void validate(const TrainConfig& config);

}  // namespace kge
