#include "kge/engine/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <map>

#include "kge/error.hpp"

namespace kge {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string l = lower(v);
  if (l == "true" || l == "1" || l == "yes") return true;
  if (l == "false" || l == "0" || l == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

struct Field {
  std::function<void(TrainConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
  bool hashed = true;
};

using FieldMap = std::vector<std::pair<std::string, Field>>;

template <typename T>
Field size_field(T TrainConfig::*m) {
  return {[m](TrainConfig& c, const std::string& k, const std::string& v) { c.*m = T(to_u64(k, v)); },
          [m](const TrainConfig& c) { return std::to_string(c.*m); }};
}

Field double_field(double TrainConfig::*m) {
  return {[m](TrainConfig& c, const std::string& k, const std::string& v) { c.*m = to_double(k, v); },
          [m](const TrainConfig& c) { return fmt(c.*m); }};
}

Field string_field(std::string TrainConfig::*m) {
  return {[m](TrainConfig& c, const std::string&, const std::string& v) { c.*m = v; },
          [m](const TrainConfig& c) { return c.*m; }};
}

Field bool_field(bool TrainConfig::*m) {
  return {[m](TrainConfig& c, const std::string& k, const std::string& v) { c.*m = to_bool(k, v); },
          [m](const TrainConfig& c) { return std::string(c.*m ? "true" : "false"); }};
}

const FieldMap& fields() {
  static const FieldMap f = [] {
    FieldMap m;
    m.emplace_back("model", string_field(&TrainConfig::model));
    m.emplace_back("dataset", string_field(&TrainConfig::dataset));
    m.emplace_back("dim", size_field(&TrainConfig::dim));
    m.emplace_back("lr", double_field(&TrainConfig::lr));
    m.emplace_back("optimizer", Field{[](TrainConfig& c, const std::string& k, const std::string& v) {
                                        const std::string l = lower(v);
                                        if (l == "sgd") c.optimizer = OptimizerKind::kSgd;
                                        else if (l == "adagrad") c.optimizer = OptimizerKind::kAdagrad;
                                        else if (l == "adam") c.optimizer = OptimizerKind::kAdam;
                                        else throw ConfigError(k + ": unknown optimizer '" + v + "'");
                                      },
                                      [](const TrainConfig& c) { return std::string(optimizer_name(c.optimizer)); }});
    m.emplace_back("adam_beta1", double_field(&TrainConfig::adam_beta1));
    m.emplace_back("adam_beta2", double_field(&TrainConfig::adam_beta2));
    m.emplace_back("adam_eps", double_field(&TrainConfig::adam_eps));
    m.emplace_back("loss", Field{[](TrainConfig& c, const std::string& k, const std::string& v) {
                                   try {
                                     c.loss.kind = parse_loss(lower(v));
                                   } catch (const ConfigError&) {
                                     throw ConfigError(k + ": unknown loss '" + v + "'");
                                   }
                                 },
                                 [](const TrainConfig& c) { return std::string(loss_name(c.loss.kind)); }});
    m.emplace_back("margin", Field{[](TrainConfig& c, const std::string& k, const std::string& v) {
                                     c.loss.margin = to_double(k, v);
                                   },
                                   [](const TrainConfig& c) { return fmt(c.loss.margin); }});
    m.emplace_back("adv_temperature", Field{[](TrainConfig& c, const std::string& k, const std::string& v) {
                                              c.loss.adv_temperature = to_double(k, v);
                                            },
                                            [](const TrainConfig& c) { return fmt(c.loss.adv_temperature); }});
    m.emplace_back("label_smoothing", Field{[](TrainConfig& c, const std::string& k, const std::string& v) {
                                              c.loss.label_smoothing = to_double(k, v);
                                            },
                                            [](const TrainConfig& c) { return fmt(c.loss.label_smoothing); }});
    m.emplace_back("sampler", Field{[](TrainConfig& c, const std::string& k, const std::string& v) {
                                      const std::string l = lower(v);
                                      if (l == "uni" || l == "uniform") c.sampler = SamplerKind::kUniform;
                                      else if (l == "bern" || l == "bernoulli") c.sampler = SamplerKind::kBernoulli;
                                      else if (l == "adv") c.sampler = SamplerKind::kAdversarial;
                                      else if (l == "all") c.sampler = SamplerKind::kAll;
                                      else throw ConfigError(k + ": unknown sampler '" + v + "'");
                                    },
                                    [](const TrainConfig& c) { return std::string(sampler_name(c.sampler)); }});
    m.emplace_back("n_neg", size_field(&TrainConfig::n_neg));
    m.emplace_back("batch_size", size_field(&TrainConfig::batch_size));
    m.emplace_back("max_epochs", size_field(&TrainConfig::max_epochs));
    m.back().second.hashed = false;
    m.emplace_back("check_per_epoch", size_field(&TrainConfig::check_per_epoch));
    m.emplace_back("limit_val_batches", double_field(&TrainConfig::limit_val_batches));
    m.emplace_back("patience", size_field(&TrainConfig::patience));
    m.back().second.hashed = false;
    m.emplace_back("seed", size_field(&TrainConfig::seed));
    m.emplace_back("inverse", bool_field(&TrainConfig::inverse));
    m.emplace_back("p_norm", size_field(&TrainConfig::p_norm));
    m.emplace_back("renormalize", bool_field(&TrainConfig::renormalize));
    m.emplace_back("rules", string_field(&TrainConfig::rules));
    m.emplace_back("groundings", string_field(&TrainConfig::groundings));
    m.emplace_back("rule_c", double_field(&TrainConfig::rule_c));
    m.emplace_back("rgcn_layers", size_field(&TrainConfig::rgcn_layers));
    m.emplace_back("rgcn_bases", size_field(&TrainConfig::rgcn_bases));
    m.emplace_back("edge_dropout", double_field(&TrainConfig::edge_dropout));
    m.emplace_back("graph_threshold", size_field(&TrainConfig::graph_threshold));
    m.emplace_back("graph_edges", size_field(&TrainConfig::graph_edges));
    m.emplace_back("threads", size_field(&TrainConfig::threads));
    m.back().second.hashed = false;
    m.emplace_back("output", string_field(&TrainConfig::output));
    m.back().second.hashed = false;
    return m;
  }();
  return f;
}

const Field* find_field(const std::string& key) {
  for (const auto& [name, field] : fields()) {
    if (name == key) return &field;
  }
  return nullptr;
}

}  // namespace

ModelFamily TrainConfig::family() const {
  const std::string l = lower(model);
  if (l == "rgcn") return ModelFamily::kRgcn;
  if (l == "ruge") return ModelFamily::kRuge;
  return ModelFamily::kConventional;
}

ModelKind TrainConfig::kge_kind() const {
  switch (family()) {
    case ModelFamily::kRuge:
      return ModelKind::kComplEx;
    case ModelFamily::kRgcn:
      throw ConfigError("RGCN has no conventional model kind");
    case ModelFamily::kConventional:
      break;
  }
  return parse_model(model);
}

std::string_view optimizer_name(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::kSgd: return "sgd";
    case OptimizerKind::kAdagrad: return "adagrad";
    case OptimizerKind::kAdam: return "adam";
  }
  return "?";
}

std::string_view sampler_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::kUniform: return "uni";
    case SamplerKind::kBernoulli: return "bern";
    case SamplerKind::kAdversarial: return "adv";
    case SamplerKind::kAll: return "all";
  }
  return "?";
}

void apply_setting(TrainConfig& config, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError("unknown config key '" + key + "'");
  f->set(config, key, value);
}

bool is_known_key(const std::string& key) { return find_field(key) != nullptr; }

std::vector<std::pair<std::string, std::string>> settings(const TrainConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, field] : fields()) out.emplace_back(name, field.get(config));
  return out;
}

std::uint64_t config_hash(const TrainConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0x1f;
    h *= 0x100000001b3ULL;
  };
  for (const auto& [name, field] : fields()) {
    if (!field.hashed) continue;
    mix(name);
    mix(field.get(config));
  }
  return h;
}

void validate(const TrainConfig& c) {
  const ModelFamily fam = c.family();
  if (fam == ModelFamily::kConventional) parse_model(c.model);
  if (c.dataset.empty()) throw ConfigError("dataset: required");
  if (c.dim == 0) throw ConfigError("dim: must be >= 1");
  if (!(c.lr > 0.0)) throw ConfigError("lr: must be > 0");
  if (!(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0)) throw ConfigError("adam_beta1: must be in [0, 1)");
  if (!(c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0)) throw ConfigError("adam_beta2: must be in [0, 1)");
  if (!(c.adam_eps > 0.0)) throw ConfigError("adam_eps: must be > 0");
  c.loss.validate();
  if (c.n_neg == 0) throw ConfigError("n_neg: must be >= 1");
  if (c.batch_size == 0) throw ConfigError("batch_size: must be >= 1");
  if (c.check_per_epoch == 0) throw ConfigError("check_per_epoch: must be >= 1");
  if (!(c.limit_val_batches > 0.0 && c.limit_val_batches <= 1.0)) {
    throw ConfigError("limit_val_batches: must be in (0, 1]");
  }
  if (c.patience == 0) throw ConfigError("patience: must be >= 1");
  if (c.p_norm != 1 && c.p_norm != 2) throw ConfigError("p_norm: must be 1 or 2");
  if (c.threads == 0) throw ConfigError("threads: must be >= 1");
  if (c.sampler == SamplerKind::kAdversarial && c.loss.kind != LossKind::kSelfAdversarial) {
    throw ConfigError("sampler: adv requires loss self_adversarial");
  }
  if (c.sampler == SamplerKind::kAll && c.loss.kind != LossKind::kBce) {
    throw ConfigError("sampler: all requires loss bce");
  }
  if (fam == ModelFamily::kRuge) {
    if (c.rules.empty() && c.groundings.empty()) throw ConfigError("rules: RUGE needs a rule or groundings file");
    if (!(c.rule_c >= 0.0)) throw ConfigError("rule_c: must be >= 0");
    if (c.sampler == SamplerKind::kAll || c.sampler == SamplerKind::kAdversarial) {
      throw ConfigError("sampler: RUGE supports uni or bern");
    }
  }
  if (fam == ModelFamily::kRgcn) {
    if (c.rgcn_layers == 0) throw ConfigError("rgcn_layers: must be >= 1");
    if (c.rgcn_bases == 0) throw ConfigError("rgcn_bases: must be >= 1");
    if (!(c.edge_dropout >= 0.0 && c.edge_dropout < 1.0)) throw ConfigError("edge_dropout: must be in [0, 1)");
    if (c.graph_edges == 0) throw ConfigError("graph_edges: must be >= 1");
  }
}

}  // namespace kge
