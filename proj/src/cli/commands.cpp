#include "kge/cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>

#include "kge/cli/config_file.hpp"
#include "kge/engine/search.hpp"
#include "kge/engine/trainer.hpp"
#include "kge/error.hpp"
#include "kge/kgdata/rules.hpp"
#include "kge/simd/kernels.hpp"

namespace kge {
namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string join_assignment(const Assignment& a) {
  std::string s;
  for (const auto& [k, v] : a) {
    if (!s.empty()) s += ';';
    s += k + "=" + v;
  }
  return s;
}

void print_trial(std::ostream& out, const char* tag, const TrialResult& t) {
  const auto& m = t.valid.both;
  out << tag << '\t' << t.index << '\t' << fixed(m.mrr, 6) << '\t' << fixed(m.hits1, 6) << '\t'
      << fixed(m.hits3, 6) << '\t' << fixed(m.hits10, 6) << '\t' << join_assignment(t.assignment) << '\n';
}

Dataset load_config_dataset(const TrainConfig& cfg) { return load_dataset(resolve_data_path(cfg.dataset)); }

const std::vector<Triple>& split_of(const IndexedKG& kg, const std::string& split) {
  if (split == "train") return kg.train;
  if (split == "valid") return kg.valid;
  if (split == "test") return kg.test;
  throw ConfigError("unknown split '" + split + "' (expected train, valid or test)");
}

int cmd_preprocess(const fs::path& dir, const fs::path& out_dir, std::ostream& out) {
  const Dataset d = load_dataset(resolve_data_path(dir));
  const fs::path dest = out_dir.empty() ? resolve_data_path(dir) : out_dir;
  fs::create_directories(dest);
  d.vocab.write(dest);
  out << "entities=" << d.kg.n_entities << " relations=" << d.kg.n_relations << " train=" << d.kg.train.size()
      << " valid=" << d.kg.valid.size() << " test=" << d.kg.test.size() << '\n';
  return kExitOk;
}

int cmd_ground(const fs::path& dir, const fs::path& rules_path, const fs::path& out_path, std::ostream& out) {
  const Dataset d = load_dataset(resolve_data_path(dir));
  const auto rules = load_rules(rules_path, d.vocab);
  const auto groundings = ground_rules(rules, d.kg);
  write_groundings(out_path, groundings);
  std::size_t in_train = 0;
  for (const auto& g : groundings) in_train += g.conclusion_in_train;
  out << "rules=" << rules.size() << " groundings=" << groundings.size() << " conclusions_in_train=" << in_train
      << '\n';
  return kExitOk;
}

TrainConfig single_config(const ConfigFile& file, const std::string& command) {
  if (!file.space.empty()) {
    const auto& key = file.space.begin()->first;
    throw ConfigError("line " + std::to_string(file.line_of.at(key)) + ": key '" + key +
                      "' lists candidates; lists are only allowed with tune (" + command + " needs single values)");
  }
  return file.base;
}

int cmd_train(const fs::path& config_path, const fs::path& resume, const fs::path& out_dir,
              std::optional<std::size_t> threads, std::ostream& out) {
  TrainConfig cfg = single_config(load_config_file(config_path), "train");
  if (threads) cfg.threads = *threads;
  validate(cfg);
  TrainOptions opts;
  opts.run_dir = !out_dir.empty() ? out_dir : !cfg.output.empty() ? fs::path(cfg.output) : fs::path("runs") / cfg.model;
  opts.resume = resume;
  opts.echo = &out;
  const Dataset data = load_config_dataset(cfg);
  const TrainResult r = train(cfg, data, opts);
  out << "RUN\t" << opts.run_dir.string() << "\tepochs=" << r.epochs << "\tbest_epoch=" << r.best_epoch
      << "\tstopped_early=" << (r.stopped_early ? 1 : 0) << '\n';
  const IndexedKG kg = prepare_kg(cfg, data.kg);
  print_report(out, evaluate_model(r.best, kg, kg.test, cfg.threads), "test");
  return kExitOk;
}

int cmd_eval(const fs::path& ckpt_dir, const std::string& split, std::optional<std::size_t> threads,
             std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(ckpt_dir);
  const Dataset data = load_config_dataset(ckpt.config);
  if (data.vocab.digest() != ckpt.vocab_digest) throw CheckpointError("checkpoint vocabulary differs from the dataset");
  const IndexedKG kg = prepare_kg(ckpt.config, data.kg);
  const TrainedModel model = model_from_checkpoint(ckpt, kg);
  print_report(out, evaluate_model(model, kg, split_of(kg, split), threads.value_or(ckpt.config.threads)), split);
  return kExitOk;
}

int cmd_tune(const fs::path& config_path, const std::string& strategy, std::size_t n_trials,
             std::optional<std::uint64_t> seed, std::optional<std::size_t> threads, std::ostream& out) {
  const ConfigFile file = load_config_file(config_path);
  TrainConfig base = file.base;
  if (threads) base.threads = *threads;
  if (file.space.empty()) throw ConfigError("tune needs at least one list-valued key in " + config_path.string());

  std::map<std::string, Dataset> datasets;
  TrialRunner runner = [&](const TrainConfig& cfg) {
    auto it = datasets.find(cfg.dataset);
    if (it == datasets.end()) it = datasets.emplace(cfg.dataset, load_config_dataset(cfg)).first;
    const TrainResult r = train(cfg, it->second);
    const IndexedKG kg = prepare_kg(cfg, it->second.kg);
    return evaluate_model(r.best, kg, kg.valid, cfg.threads);
  };
  auto on_trial = [&](const TrialResult& t) {
    print_trial(out, "TRIAL", t);
    out.flush();
  };

  SearchResult result;
  if (strategy == "grid") {
    result = grid_search(file.space, base, runner, on_trial);
  } else if (strategy == "random") {
    result = random_search(file.space, base, n_trials, seed.value_or(base.seed), runner, on_trial);
  } else {
    throw ConfigError("unknown strategy '" + strategy + "' (expected grid or random)");
  }
  print_trial(out, "BEST", result.best_trial());
  return kExitOk;
}

}  // namespace

fs::path resolve_data_path(const fs::path& p) {
  if (p.is_absolute() || fs::exists(p)) return p;
  if (const char* root = std::getenv(kDataRootEnv); root && *root) {
    const fs::path candidate = fs::path(root) / p;
    if (fs::exists(candidate)) return candidate;
  }
  return p;
}

void print_report(std::ostream& out, const RankingReport& r, const std::string& split) {
  char line[128];
  std::snprintf(line, sizeof line, "%-10s %8s %8s %8s %8s\n", split.c_str(), "MRR", "Hits@1", "Hits@3", "Hits@10");
  out << line;
  auto row = [&](const char* name, const DirectionMetrics& m) {
    std::snprintf(line, sizeof line, "%-10s %8.4f %8.4f %8.4f %8.4f\n", name, m.mrr, m.hits1, m.hits3, m.hits10);
    out << line;
  };
  row("head", r.head);
  row("tail", r.tail);
  row("both", r.both);
  out << "RESULT\t" << split << '\t' << fixed(r.both.mrr, 6) << '\t' << fixed(r.both.hits1, 6) << '\t'
      << fixed(r.both.hits3, 6) << '\t' << fixed(r.both.hits10, 6) << '\t' << r.n_queries << '\n';
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Knowledge graph embedding toolkit", "kge"};
  app.require_subcommand(1);
  std::optional<std::size_t> threads;
  bool scalar = false;
  app.add_option("--threads", threads, "Worker threads for evaluation")->check(CLI::PositiveNumber);
  app.add_flag("--scalar", scalar, "Force the scalar reference kernels");

  std::string dataset, rules_path, out_path, config_path, resume, ckpt_dir, split = "test", strategy = "grid";
  std::size_t n_trials = 10;
  std::optional<std::uint64_t> search_seed;

  auto* pre = app.add_subcommand("preprocess", "Index a dataset and dump its vocabularies");
  pre->add_option("dataset", dataset, "Directory with train.txt/valid.txt/test.txt")->required();
  pre->add_option("--out", out_path, "Where to write entities.tsv/relations.tsv (default: dataset dir)");

  auto* ground = app.add_subcommand("ground", "Ground rules over the training split");
  ground->add_option("dataset", dataset, "Dataset directory")->required();
  ground->add_option("rules", rules_path, "Rule file")->required();
  ground->add_option("out", out_path, "Groundings output file")->required();

  auto* tr = app.add_subcommand("train", "Train a model from a config file");
  tr->add_option("config", config_path, "Config file")->required();
  tr->add_option("--resume", resume, "Checkpoint directory to continue from");
  tr->add_option("--out", out_path, "Run directory (checkpoints and log)");

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint");
  ev->add_option("checkpoint", ckpt_dir, "Checkpoint directory")->required();
  ev->add_option("--split", split, "valid or test")->check(CLI::IsMember({"valid", "test"}));

  auto* tune = app.add_subcommand("tune", "Hyperparameter search over list-valued config keys");
  tune->add_option("config", config_path, "Config file with search lists")->required();
  tune->add_option("--strategy", strategy, "grid or random")->check(CLI::IsMember({"grid", "random"}));
  tune->add_option("--trials", n_trials, "Trials for random search")->check(CLI::PositiveNumber);
  tune->add_option("--seed", search_seed, "Seed for random search (default: config seed)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (scalar) simd::set_level(simd::Level::kScalar);
    if (*pre) return cmd_preprocess(dataset, out_path, out);
    if (*ground) return cmd_ground(dataset, rules_path, out_path, out);
    if (*tr) return cmd_train(config_path, resume, out_path, threads, out);
    if (*ev) return cmd_eval(ckpt_dir, split, threads, out);
    if (*tune) return cmd_tune(config_path, strategy, n_trials, search_seed, threads, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace kge
