#include "kge/engine/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "kge/ckge/grad.hpp"
#include "kge/engine/optimizer.hpp"
#include "kge/error.hpp"
#include "kge/kgdata/rules.hpp"
#include "kge/rule/ruge.hpp"
#include "kge/sampler/graph.hpp"
#include "kge/sampler/sampler.hpp"

namespace kge {
namespace fs = std::filesystem;

namespace {

// Separates the training stream from the initialization stream.
constexpr std::uint64_t kTrainStream = 0x5851F42D4C957F2DULL;

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::size_t parse_epoch(const std::string& line) {
  std::size_t e = 0;
  auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), e);
  if (ec != std::errc() || ptr == line.data() || *ptr != '\t') return std::numeric_limits<std::size_t>::max();
  return e;
}

std::vector<Table*> model_tables(TrainedModel& m) {
  return m.family == ModelFamily::kRgcn ? m.rgcn.tables() : param_tables(m.params);
}

std::vector<const Table*> model_tables(const TrainedModel& m) {
  if (m.family == ModelFamily::kRgcn) return m.rgcn.tables();
  std::vector<const Table*> out;
  for (const auto& t : m.params.tables) out.push_back(&t);
  return out;
}

std::vector<std::string> model_table_names(const TrainedModel& m) {
  return m.family == ModelFamily::kRgcn ? m.rgcn.table_names() : param_table_names();
}

std::uint64_t& model_version(TrainedModel& m) {
  return m.family == ModelFamily::kRgcn ? m.rgcn.version : m.params.version;
}

// Copies checkpoint tables over a freshly initialized model of the same shape.
void restore_tables(TrainedModel& m, const Checkpoint& ckpt) {
  const auto tables = model_tables(m);
  const auto names = model_table_names(m);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const Table* saved = ckpt.find(names[i]);
    if (tables[i]->empty() && !saved) continue;
    if (!saved) throw CheckpointError("checkpoint lacks table " + names[i]);
    if (saved->rows != tables[i]->rows || saved->cols != tables[i]->cols) {
      throw CheckpointError("checkpoint table " + names[i] + " has shape " + std::to_string(saved->rows) + "x" +
                            std::to_string(saved->cols) + ", model expects " + std::to_string(tables[i]->rows) +
                            "x" + std::to_string(tables[i]->cols));
    }
    *tables[i] = *saved;
  }
  model_version(m) = ckpt.version;
}

class Session {
 public:
  Session(const TrainConfig& config, const IndexedKG& kg, const Dataset& data)
      : cfg_(config),
        kg_(kg),
        model_(init_model(config, kg)),
        opt_(optimizer_spec(config)),
        rng_(config.seed + kTrainStream),
        names_(model_table_names(model_)),
        vocab_digest_(data.vocab.digest()) {
    const ModelFamily fam = cfg_.family();
    if (fam != ModelFamily::kRgcn && cfg_.sampler == SamplerKind::kBernoulli) bern_ = bernoulli_table(kg_);
    if (fam == ModelFamily::kRuge) {
      std::vector<Grounding> groundings = !cfg_.groundings.empty()
                                              ? read_groundings(cfg_.groundings, data.kg)
                                              : ground_rules(load_rules(cfg_.rules, data.vocab), data.kg);
      pool_ = build_unlabeled_pool(std::move(groundings), kg_);
    }
    if (fam == ModelFamily::kRgcn && !sampled_graphs()) full_ = full_graph(kg_);
  }

  void restore(const Checkpoint& ckpt) {
    if (ckpt.config_hash != config_hash(cfg_)) {
      throw CheckpointError("checkpoint was written under a different configuration (config hash mismatch)");
    }
    if (ckpt.vocab_digest != vocab_digest_) throw CheckpointError("checkpoint vocabulary differs from the dataset");
    restore_tables(model_, ckpt);
    for (const auto& nt : ckpt.tables) {
      if (nt.name.rfind("opt.", 0) != 0) continue;
      const auto dot = nt.name.rfind('.');
      const std::string base = nt.name.substr(4, dot - 4);
      const auto it = std::find(names_.begin(), names_.end(), base);
      if (dot <= 4 || it == names_.end()) throw CheckpointError("unknown optimizer state table " + nt.name);
      opt_.set_state(std::size_t(it - names_.begin()), nt.name.substr(dot + 1), nt.table);
    }
    std::istringstream rs(ckpt.rng_state);
    rs >> rng_;
    if (!rs) throw CheckpointError("unreadable RNG state in checkpoint");
    epoch_ = ckpt.epoch;
    step_ = ckpt.step;
    best_metric_ = ckpt.best_metric;
    best_epoch_ = ckpt.best_epoch;
    stopped_ = ckpt.stopped;
    history_ = ckpt.history;
  }

  Checkpoint snapshot() const {
    Checkpoint c;
    c.config = cfg_;
    c.config_hash = config_hash(cfg_);
    c.vocab_digest = vocab_digest_;
    c.epoch = epoch_;
    c.step = step_;
    c.version = model_.family == ModelFamily::kRgcn ? model_.rgcn.version : model_.params.version;
    c.best_metric = best_metric_;
    c.best_epoch = best_epoch_;
    c.stopped = stopped_;
    c.history = history_;
    std::ostringstream rs;
    rs << rng_;
    c.rng_state = rs.str();
    const auto tables = model_tables(model_);
    for (std::size_t i = 0; i < tables.size(); ++i) {
      if (!tables[i]->empty()) c.tables.push_back({names_[i], *tables[i]});
    }
    for (const auto& [name, t] : opt_.state(names_)) c.tables.push_back({name, *t});
    return c;
  }

  double run_epoch() {
    const double loss = cfg_.family() == ModelFamily::kRgcn ? rgcn_epoch() : kge_epoch();
    ++epoch_;
    return loss;
  }

  const TrainedModel& model() const { return model_; }
  std::size_t epoch() const { return epoch_; }
  bool stopped() const { return stopped_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_metric() const { return best_metric_; }
  const MetricHistory& history() const { return history_; }

  // Records a validation metric; returns true if it is a new best.
  bool record(double metric) {
    history_.emplace_back(epoch_, metric);
    const bool improved = best_epoch_ == 0 || metric > best_metric_;
    if (improved) {
      best_metric_ = metric;
      best_epoch_ = epoch_;
    }
    if (early_stop(history_, cfg_.patience) == StopDecision::kStop) stopped_ = true;
    return improved;
  }

 private:
  bool sampled_graphs() const { return kg_.train.size() > cfg_.graph_threshold; }

  std::vector<std::size_t> shuffled_order() {
    std::vector<std::size_t> order(kg_.train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng_);
    return order;
  }

  void apply(const SparseGrad& grad) {
    auto tables = model_tables(model_);
    opt_.step(tables, names_, grad);
    if (model_.family != ModelFamily::kRgcn && model_.params.kind == ModelKind::kTransH) {
      const auto& touched = grad.table(std::size_t(TableId::kNormal)).rows;
      normalize_rows(model_.params.table(TableId::kNormal), touched);
    }
    ++model_version(model_);
    ++step_;
  }

  BatchLoss kge_batch(std::span<const Triple> batch) {
    const ModelParams& params = model_.params;
    const double eps = cfg_.loss.label_smoothing;
    const double pos_label = 1.0 - eps / 2.0, neg_label = eps / 2.0;

    if (cfg_.sampler == SamplerKind::kAll) {
      std::bernoulli_distribution head_coin(0.5);
      std::vector<Triple> triples;
      std::vector<double> labels;
      triples.reserve(batch.size() * kg_.n_entities);
      for (const Triple& x : batch) {
        const Slot slot = head_coin(rng_) ? Slot::kHead : Slot::kTail;
        for (const Triple& c : all_negatives(x, slot, kg_.n_entities)) {
          triples.push_back(c);
          labels.push_back(kg_.in_train(c) ? pos_label : neg_label);
        }
      }
      return labeled_loss_and_grad(params, triples, labels);
    }

    NegBatch nb = cfg_.sampler == SamplerKind::kBernoulli ? bern_negatives(batch, cfg_.n_neg, *bern_, kg_, rng_)
                                                          : uniform_negatives(batch, cfg_.n_neg, kg_, rng_);
    if (!pool_) return loss_and_grad(params, nb, cfg_.loss);

    std::vector<Triple> labeled(nb.positives);
    labeled.insert(labeled.end(), nb.negatives.begin(), nb.negatives.end());
    std::vector<double> labels(nb.positives.size(), pos_label);
    labels.resize(labeled.size(), neg_label);
    SoftLabelSet soft;
    soft.c = cfg_.rule_c;
    soft.params_version = params.version;
    if (!pool_->conclusions.empty()) {
      // Deterministic sweep over the unlabeled pool, one batch-sized slice per step.
      const std::size_t begin = std::size_t((step_ * cfg_.batch_size) % pool_->conclusions.size());
      soft = predict_soft_labels(params, *pool_, begin, begin + cfg_.batch_size, cfg_.rule_c);
    }
    return ruge_loss_and_grad(params, labeled, labels, soft);
  }

  double kge_epoch() {
    ModelParams& params = model_.params;
    if (cfg_.renormalize && (params.kind == ModelKind::kTransE || params.kind == ModelKind::kTransH)) {
      normalize_rows(params.entity());
    }
    const auto order = shuffled_order();
    double total = 0.0;
    std::size_t n_batches = 0;
    std::vector<Triple> batch;
    for (std::size_t b = 0; b < order.size(); b += cfg_.batch_size) {
      batch.clear();
      for (std::size_t i = b; i < std::min(order.size(), b + cfg_.batch_size); ++i) batch.push_back(kg_.train[order[i]]);
      BatchLoss bl = kge_batch(batch);
      apply(bl.grad);
      total += bl.loss;
      ++n_batches;
    }
    return n_batches ? total / double(n_batches) : 0.0;
  }

  double rgcn_epoch() {
    double total = 0.0;
    std::size_t n_batches = 0;
    if (sampled_graphs()) {
      const std::size_t n_edges = std::min(cfg_.graph_edges, kg_.train.size());
      const std::size_t steps = (kg_.train.size() + n_edges - 1) / n_edges;
      for (std::size_t s = 0; s < steps; ++s) {
        GraphBatch g = sample_graph(kg_, n_edges, cfg_.n_neg, rng_);
        g = drop_edges(g, cfg_.edge_dropout, rng_);
        RgcnBatchLoss bl = rgcn_loss_and_grad(model_.rgcn, g);
        apply(bl.grad);
        total += bl.loss;
        ++n_batches;
      }
    } else {
      const auto order = shuffled_order();
      for (std::size_t b = 0; b < order.size(); b += cfg_.batch_size) {
        GraphBatch g = drop_edges(full_, cfg_.edge_dropout, rng_);
        for (std::size_t i = b; i < std::min(order.size(), b + cfg_.batch_size); ++i) {
          g.positives.push_back(kg_.train[order[i]]);
        }
        attach_negatives(g, kg_, cfg_.n_neg, rng_);
        RgcnBatchLoss bl = rgcn_loss_and_grad(model_.rgcn, g);
        apply(bl.grad);
        total += bl.loss;
        ++n_batches;
      }
    }
    return n_batches ? total / double(n_batches) : 0.0;
  }

  const TrainConfig& cfg_;
  const IndexedKG& kg_;
  TrainedModel model_;
  Optimizer opt_;
  Rng rng_;
  std::vector<std::string> names_;
  std::uint64_t vocab_digest_ = 0;
  std::optional<BernoulliTable> bern_;
  std::optional<UnlabeledPool> pool_;
  GraphBatch full_;

  std::size_t epoch_ = 0;
  std::uint64_t step_ = 0;
  double best_metric_ = 0.0;
  std::size_t best_epoch_ = 0;
  bool stopped_ = false;
  MetricHistory history_;
};

class RunLog {
 public:
  RunLog(fs::path path, std::ostream* echo) : path_(std::move(path)), echo_(echo) {}

  // Keeps lines of epochs up to `epoch` from an earlier run.
  void resume_from(std::size_t epoch) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (parse_epoch(line) <= epoch) lines_.push_back(line);
    }
  }

  void add(std::size_t epoch, const std::string& split, const std::string& metric, double value) {
    lines_.push_back(std::to_string(epoch) + "\t" + split + "\t" + metric + "\t" + num(value));
    if (echo_) *echo_ << lines_.back() << '\n';
  }

  void flush() const {
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::trunc);
    for (const auto& l : lines_) out << l << '\n';
    if (!out) throw CheckpointError("cannot write log " + path_.string());
  }

  const std::vector<std::string>& lines() const { return lines_; }

 private:
  fs::path path_;
  std::ostream* echo_;
  std::vector<std::string> lines_;
};

}  // namespace

IndexedKG prepare_kg(const TrainConfig& config, const IndexedKG& kg) {
  const bool want_inverse = config.inverse || config.family() == ModelFamily::kRgcn;
  if (want_inverse && !kg.has_inverse) return add_inverse_relations(kg);
  return kg;
}

TrainedModel init_model(const TrainConfig& config, const IndexedKG& kg) {
  TrainedModel m;
  m.family = config.family();
  if (m.family == ModelFamily::kRgcn) {
    m.rgcn = init_rgcn(kg.n_entities, kg.n_relations, config.dim, config.rgcn_layers,
                       std::min(config.rgcn_bases, kg.n_relations), config.seed);
  } else {
    m.params = init_params(config.kge_kind(), kg.n_entities, kg.n_relations, config.dim, config.seed,
                           config.p_norm);
  }
  return m;
}

ModelParams scoring_params(const TrainedModel& model, const IndexedKG& kg) {
  if (model.family == ModelFamily::kRgcn) return rgcn_export_distmult(model.rgcn, kg);
  return model.params;
}

EvalOptions eval_options(const IndexedKG& kg, std::size_t threads) {
  EvalOptions o;
  o.threads = threads;
  o.inverse_offset = kg.has_inverse ? kg.n_base_relations : 0;
  return o;
}

RankingReport evaluate_model(const TrainedModel& model, const IndexedKG& kg, std::span<const Triple> split,
                             std::size_t threads) {
  const FilterIndex filter = build_filter(kg);
  if (model.family == ModelFamily::kRgcn) {
    return evaluate(scoring_params(model, kg), split, filter, eval_options(kg, threads));
  }
  return evaluate(model.params, split, filter, eval_options(kg, threads));
}

TrainedModel model_from_checkpoint(const Checkpoint& ckpt, const IndexedKG& kg) {
  TrainedModel m = init_model(ckpt.config, kg);
  restore_tables(m, ckpt);
  return m;
}

TrainResult train(const TrainConfig& config, const Dataset& data, const TrainOptions& options) {
  validate(config);
  const IndexedKG kg = prepare_kg(config, data.kg);
  if (kg.train.empty()) throw DataError("training split is empty");
  Session session(config, kg, data);

  const bool persist = !options.run_dir.empty();
  if (persist) fs::create_directories(options.run_dir);
  RunLog log(persist ? options.run_dir / "log.tsv" : fs::path(), options.echo);

  std::optional<TrainedModel> best;
  if (!options.resume.empty()) {
    session.restore(load_checkpoint(options.resume));
    if (persist) log.resume_from(session.epoch());
    const fs::path best_dir = options.resume.parent_path() / "best";
    if (session.best_epoch() > 0 && fs::exists(best_dir / "meta")) {
      Checkpoint b = load_checkpoint(best_dir);
      if (b.epoch == session.best_epoch()) best = model_from_checkpoint(b, kg);
    }
  }

  std::vector<Triple> valid;
  std::optional<FilterIndex> filter;
  auto validate_now = [&]() -> RankingReport {
    if (!filter) {
      if (kg.valid.empty()) throw DataError("validation split is empty");
      valid = validation_subset(kg.valid, config.limit_val_batches, config.seed);
      filter = build_filter(kg);
    }
    const TrainedModel& m = session.model();
    if (m.family == ModelFamily::kRgcn) {
      return evaluate(scoring_params(m, kg), valid, *filter, eval_options(kg, config.threads));
    }
    return evaluate(m.params, valid, *filter, eval_options(kg, config.threads));
  };

  while (session.epoch() < config.max_epochs && !session.stopped()) {
    const double loss = session.run_epoch();
    const std::size_t e = session.epoch();
    if (!std::isfinite(loss)) throw NumericError("non-finite training loss at epoch " + std::to_string(e));
    log.add(e, "train", "loss", loss);
    bool improved = false;
    if (e % config.check_per_epoch == 0) {
      const RankingReport r = validate_now();
      log.add(e, "valid", "mrr", r.both.mrr);
      log.add(e, "valid", "hits@1", r.both.hits1);
      log.add(e, "valid", "hits@3", r.both.hits3);
      log.add(e, "valid", "hits@10", r.both.hits10);
      improved = session.record(r.both.mrr);
      if (improved) best = session.model();
      if (session.stopped()) log.add(e, "valid", "early_stop", 1.0);
    }
    if (persist) {
      const Checkpoint snap = session.snapshot();
      if (improved) save_checkpoint(snap, options.run_dir / "best");
      save_checkpoint(snap, options.run_dir / "last");
      log.flush();
    }
  }

  TrainResult out;
  out.final_state = session.snapshot();
  if (persist) {
    save_checkpoint(out.final_state, options.run_dir / "last");
    log.flush();
  }
  out.last = session.model();
  out.best = best ? *best : session.model();
  out.epochs = session.epoch();
  out.best_epoch = session.best_epoch();
  out.best_metric = session.best_metric();
  out.stopped_early = session.stopped();
  out.history = session.history();
  out.log = log.lines();
  return out;
}

}  // namespace kge
