// Acceptance suite: `acceptance N` checks criterion N and prints one line per
// sub-check plus a verdict line. Exit 0 = pass, 1 = fail, 77 = cannot be
// checked here (e.g. the benchmark dataset is not present).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "gradcheck.hpp"
#include "kge/engine/checkpoint.hpp"
#include "kge/engine/search.hpp"
#include "kge/engine/trainer.hpp"
#include "kge/rule/ruge.hpp"
#include "rank_oracle.hpp"
#include "rgcn_oracle.hpp"
#include "support.hpp"
#include "synthetic.hpp"

using namespace kge;
using namespace kge::test;
namespace fs = std::filesystem;

namespace {

// ---- tolerances and budgets ------------------------------------------------

constexpr double kFbMrrMin = 0.30;         // full recipe, test MRR
constexpr double kFbHits10Min = 0.49;      // full recipe, test Hits@10
constexpr double kFbSmokeMrrMin = 0.25;    // d = 64, 50 epochs
constexpr double kFbSmokeSeconds = 20 * 60;
constexpr double kFbFullSeconds = 4 * 3600;
constexpr double kRgcnOracleTol = 1e-5;
constexpr std::size_t kRgcnOracleGraphs = 100;
constexpr double kRgcnGradTol = 1e-3;
constexpr double kRgcnGainMin = 0.3;
constexpr double kRugeGainMin = 0.05;
constexpr std::size_t kRugeSeeds = 5;
constexpr std::size_t kRankKgs = 50;
constexpr double kRankSeconds = 60;
constexpr double kGradTol = 1e-4;
constexpr std::size_t kGradProbes = 20;
constexpr double kGradSeconds = 120;
constexpr double kBernTol = 0.01;
constexpr std::size_t kBernDraws = 100000;
constexpr std::size_t kFilterCandidates = 1000000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Report {
  int criterion;
  bool ok = true;

  void check(bool pass, const std::string& what) {
    std::printf("  [%s] %s\n", pass ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
    ok = ok && pass;
  }
  int verdict(const std::string& title) const {
    std::printf("criterion %d %s: %s\n", criterion, title.c_str(), ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
  }
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::size_t hw_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---- 1: TransE on FB15k-237 --------------------------------------------------

TrainConfig fb_config(const fs::path& dir, std::size_t dim, SamplerKind sampler, std::size_t epochs) {
  TrainConfig c;
  c.model = "TransE";
  c.dataset = dir.string();
  c.dim = dim;
  c.optimizer = OptimizerKind::kAdam;
  c.lr = dim <= 64 ? 1e-3 : 5e-4;
  c.loss.kind = LossKind::kSelfAdversarial;
  c.loss.margin = 9.0;
  c.loss.adv_temperature = 1.0;
  c.sampler = sampler;
  c.n_neg = 128;
  c.batch_size = 1024;
  c.max_epochs = epochs;
  c.check_per_epoch = 10;
  c.limit_val_batches = 0.2;
  c.patience = 3;
  c.renormalize = false;
  c.threads = hw_threads();
  c.seed = 1;
  return c;
}

int criterion_1() {
  Report rep{1};
  const char* env = std::getenv("KGE_FB15K237");
  const fs::path dir = env ? fs::path(env) : fs::path();
  if (dir.empty() || !fs::exists(dir / "train.txt")) {
    std::printf("  [UNVERIFIED] FB15k-237 not found (set KGE_FB15K237 to a directory with train/valid/test.txt)\n");
    std::printf("criterion 1 TransE on FB15k-237: UNVERIFIED\n");
    return 77;
  }
  const Dataset data = load_dataset(dir);
  auto run = [&](const TrainConfig& c) {
    const TrainResult r = train(c, data);
    const IndexedKG kg = prepare_kg(c, data.kg);
    return evaluate_model(r.best, kg, kg.test, c.threads);
  };

  const auto t0 = Clock::now();
  const RankingReport smoke = run(fb_config(dir, 64, SamplerKind::kAdversarial, 50));
  const double smoke_s = seconds_since(t0);
  rep.check(smoke.both.mrr >= kFbSmokeMrrMin,
            fmt("smoke d=64, 50 epochs: test MRR %.4f (min %.2f)", smoke.both.mrr, kFbSmokeMrrMin));
  rep.check(smoke_s <= kFbSmokeSeconds, fmt("smoke runtime %.0f s (max %.0f s)", smoke_s, kFbSmokeSeconds));

  if (std::getenv("KGE_ACCEPT_FULL")) {
    SearchSpace space{{"dim", {"256", "512"}}, {"sampler", {"uni", "adv"}}};
    double best_time = 0;
    const SearchResult s = grid_search(space, fb_config(dir, 256, SamplerKind::kUniform, 300),
                                       [&](const TrainConfig& c) {
                                         const auto t = Clock::now();
                                         const TrainResult r = train(c, data);
                                         best_time = std::max(best_time, seconds_since(t));
                                         const IndexedKG kg = prepare_kg(c, data.kg);
                                         return evaluate_model(r.best, kg, kg.valid, c.threads);
                                       });
    const TrainConfig& bc = s.best_trial().config;
    const auto t1 = Clock::now();
    const RankingReport full = run(bc);
    const double full_s = seconds_since(t1);
    rep.check(full.both.mrr >= kFbMrrMin, fmt("tuned: test MRR %.4f (min %.2f)", full.both.mrr, kFbMrrMin));
    rep.check(full.both.hits10 >= kFbHits10Min,
              fmt("tuned: test Hits@10 %.4f (min %.2f)", full.both.hits10, kFbHits10Min));
    rep.check(full_s <= kFbFullSeconds, fmt("best config runtime %.0f s (max %.0f s)", full_s, kFbFullSeconds));
  } else {
    std::printf("  [SKIP] tuned run (d in {256, 512}) needs KGE_ACCEPT_FULL=1\n");
  }
  return rep.verdict("TransE on FB15k-237");
}

// ---- 2: RGCN -----------------------------------------------------------------

TrainConfig rgcn_config(std::uint64_t seed) {
  TrainConfig c;
  c.model = "RGCN";
  c.dataset = "clusters";
  c.dim = 32;
  c.lr = 0.01;
  c.loss.kind = LossKind::kBce;
  c.n_neg = 4;
  c.batch_size = 100;
  c.max_epochs = 200;
  c.check_per_epoch = 10;
  c.patience = 5;
  c.rgcn_layers = 2;
  c.rgcn_bases = 2;
  c.edge_dropout = 0.2;
  c.seed = seed;
  return c;
}

int criterion_2() {
  Report rep{2};
  {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (std::size_t g = 0; g < kRgcnOracleGraphs; ++g) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 50)(rng);
      const std::size_t nr = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
      const std::size_t nb = std::uniform_int_distribution<std::size_t>(1, nr)(rng);
      const std::size_t ne = std::uniform_int_distribution<std::size_t>(0, 4 * n)(rng);
      const GraphBatch graph = random_graph(n, nr, ne, rng);
      const std::vector<RgcnLayerParams> layers{random_layer(8, 8, nr, nb, Activation::kRelu, rng),
                                                random_layer(8, 8, nr, nb, Activation::kIdentity, rng)};
      const Matrix x = random_matrix(n, 8, rng);
      worst = std::max(worst, dense_mismatch(rgcn_forward(layers, graph, x), dense_forward(layers, graph, x)));
    }
    rep.check(worst < kRgcnOracleTol, fmt("(a) forward vs dense oracle on %zu graphs: max rel. error %.2e (tol %.0e)",
                                          kRgcnOracleGraphs, worst, kRgcnOracleTol));
  }
  {
    double worst = 0.0;
    std::size_t checked = 0, rejected = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const RgcnProbeStats s = probe_rgcn(random_rgcn_case(seed), 20, seed);
      worst = std::max(worst, s.max_rel_error);
      checked += s.checked;
      rejected += s.rejected;
    }
    rep.check(worst < kRgcnGradTol && checked == 200,
              fmt("(b) encoder+decoder gradient: %zu probes (%zu near kinks redrawn), max rel. error %.2e (tol %.0e)",
                  checked, rejected, worst, kRgcnGradTol));
  }
  {
    std::vector<double> gains;
    std::string detail;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const Dataset data = build_dataset(cluster_splits(seed));
      TrainConfig c = rgcn_config(seed);
      const IndexedKG kg = prepare_kg(c, data.kg);
      const TrainResult trained = train(c, data);
      c.max_epochs = 0;
      const TrainResult untrained = train(c, data);
      const double a = evaluate_model(trained.best, kg, kg.valid, 1).both.mrr;
      const double b = evaluate_model(untrained.best, kg, kg.valid, 1).both.mrr;
      gains.push_back(a - b);
      detail += fmt(" seed %d: %.3f vs %.3f;", int(seed), a, b);
    }
    const double g = median(gains);
    rep.check(g >= kRgcnGainMin, fmt("(c) clustered KG, valid MRR gain over untrained (median of 3) %.3f (min %.1f):",
                                     g, kRgcnGainMin) + detail);
  }
  return rep.verdict("R-GCN");
}

// ---- 3: rule injection ---------------------------------------------------------

TrainConfig ruge_config(const fs::path& rules, std::uint64_t seed, double c) {
  TrainConfig cfg;
  cfg.model = "RUGE";
  cfg.dataset = "rules";
  cfg.rules = rules.string();
  cfg.rule_c = c;
  cfg.dim = 32;
  cfg.lr = 0.01;
  cfg.loss.kind = LossKind::kBce;
  cfg.sampler = SamplerKind::kUniform;
  cfg.n_neg = 4;
  cfg.batch_size = 128;
  cfg.max_epochs = 60;
  cfg.check_per_epoch = 60;
  cfg.patience = 1;
  cfg.seed = seed;
  return cfg;
}

int criterion_3() {
  Report rep{3};
  TempDir tmp;
  {
    const RuleKG g = rule_splits(11);
    write_text(tmp / "rules.txt", g.rules);
    const Dataset data = build_dataset(g.splits);
    TrainConfig ruge = ruge_config(tmp / "rules.txt", 3, 0.0);
    ruge.max_epochs = 10;
    ruge.check_per_epoch = 5;
    TrainConfig plain = ruge;
    plain.model = "ComplEx";
    plain.rules.clear();
    const TrainResult a = train(ruge, data), b = train(plain, data);
    bool same = a.last.params.tables == b.last.params.tables && a.history == b.history;
    rep.check(same, "(a) C = 0 trajectory equals ComplEx + bce bitwise (10 epochs, parameters and validation history)");
  }
  {
    std::vector<double> gains;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= kRugeSeeds; ++seed) {
      const RuleKG g = rule_splits(100 + seed);
      const fs::path rules = tmp / ("rules" + std::to_string(seed) + ".txt");
      write_text(rules, g.rules);
      const Dataset data = build_dataset(g.splits);
      auto mrr = [&](double c) {
        const TrainConfig cfg = ruge_config(rules, seed, c);
        const TrainResult r = train(cfg, data);
        const IndexedKG kg = prepare_kg(cfg, data.kg);
        return evaluate_model(r.last, kg, kg.test, 1).both.mrr;
      };
      const double with = mrr(1.0), without = mrr(0.0);
      gains.push_back(with - without);
      detail += fmt(" %.3f-%.3f;", with, without);
    }
    const double m = median(gains);
    rep.check(m >= kRugeGainMin,
              fmt("(b) 30%% rule-conclusion test set, test MRR gain C=1 over C=0 (median of %zu seeds) %.3f (min %.2f):",
                  kRugeSeeds, m, kRugeGainMin) + detail);
  }
  {
    // pi(u) = sigmoid(h r t) with d = 1 ComplEx and zero imaginary parts.
    RawSplits s;
    s.train = {{"e0", "r0", "e1"}, {"e1", "r1", "e2"}};
    s.valid = {{"e2", "r0", "e0"}};
    s.test = {{"e2", "r1", "e0"}};
    const Dataset d = build_dataset(s);
    ModelParams p = init_params(ModelKind::kComplEx, 3, 2, 1, 1);
    for (float& v : p.entity().data) v = 0.0f;
    for (std::size_t e = 0; e < 3; ++e) p.entity().row(e)[0] = 1.0f;
    p.relation().data = {50.0f, 0.0f, float(std::log(0.3 / 0.7)), 0.0f};
    Grounding gr{{{0, 0, 1}}, {0, 1, 1}, 1.0, false};
    const double pi_u = triple_truth(p, std::vector<Triple>{{0, 1, 1}})[0];
    auto label = [&](double c, double lambda) {
      gr.confidence = lambda;
      return predict_soft_labels(p, std::vector<Grounding>{gr}, c, d.kg).labels.at(0);
    };
    const bool body_saturated = triple_truth(p, std::vector<Triple>{{0, 0, 1}})[0] == 1.0;
    const bool c0 = label(0.0, 1.0) == pi_u;
    const bool c05 = label(0.5, 1.0) == pi_u + 0.5 && std::fabs(label(0.5, 1.0) - 0.8) < 1e-6;
    const bool clip = label(1.0, 1.0) == 1.0;
    const bool lambda = label(0.5, 0.4) == pi_u + 0.2;
    rep.check(body_saturated && c0 && c05 && clip && lambda,
              fmt("(c) soft-label unit cases: C=0 -> pi(u) %s, pi=0.3 & C=0.5 -> 0.8 %s, clip -> 1 %s, lambda %s",
                  c0 ? "ok" : "MISMATCH", c05 ? "ok" : "MISMATCH", clip ? "ok" : "MISMATCH",
                  lambda ? "ok" : "MISMATCH"));
  }
  return rep.verdict("rule-guided training");
}

// ---- 4: ranking oracle ---------------------------------------------------------

int criterion_4() {
  Report rep{4};
  std::mt19937_64 rng(4444);
  std::size_t exact = 0;
  const auto t0 = Clock::now();
  for (std::size_t k = 0; k < kRankKgs; ++k) {
    const std::size_t ne = std::uniform_int_distribution<std::size_t>(5, 50)(rng);
    const std::size_t nr = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    const std::size_t total = std::min<std::size_t>(std::uniform_int_distribution<std::size_t>(10, 300)(rng),
                                                    ne * ne * nr / 2);
    const std::size_t n_test = std::max<std::size_t>(1, total / 10);
    const Dataset d = build_dataset(random_splits(ne, nr, total - 2 * n_test, n_test, n_test, rng()));
    ModelParams p = init_params(kAllModels[k % kAllModels.size()], d.kg.n_entities, d.kg.n_relations, 4, rng());
    if (k % 3 == 0) quantize(p);  // force score ties
    const RankingReport r = evaluate(p, d.kg.test, build_filter(d.kg));
    exact += report_matches_oracle(r, brute_force_ranks(p, d.kg, d.kg.test));
  }
  const double secs = seconds_since(t0);
  rep.check(exact == kRankKgs, fmt("evaluate equals brute-force oracle exactly on %zu/%zu random KGs", exact, kRankKgs));
  rep.check(secs < kRankSeconds, fmt("runtime %.2f s (max %.0f s)", secs, kRankSeconds));
  return rep.verdict("ranking-oracle equivalence");
}

// ---- 5: gradient suite ---------------------------------------------------------

int criterion_5() {
  Report rep{5};
  const Dataset data = build_dataset(random_splits(9, 3, 30, 1, 1, 5));
  const std::vector<LossSpec> losses{{LossKind::kMargin, 2.0, 1.0, 0.0},
                                     {LossKind::kSelfAdversarial, 1.0, 0.7, 0.0},
                                     {LossKind::kBce, 0.0, 1.0, 0.0}};
  const auto t0 = Clock::now();
  for (ModelKind kind : kAllModels) {
    for (const LossSpec& spec : losses) {
      const ModelParams p = probe_params(kind, data.kg.n_entities, data.kg.n_relations, 4, 17);
      const NegBatch nb = probe_batch(data.kg, 4, 3, 17);
      const ProbeSummary s = probe_gradient(p, nb, spec, kGradProbes, 99);
      rep.check(s.probes.size() == kGradProbes && s.max_rel_error < kGradTol,
                fmt("%-8s x %-16s %zu probes, max rel. error %.2e (tol %.0e)", std::string(model_name(kind)).c_str(),
                    std::string(loss_name(spec.kind)).c_str(), s.probes.size(), s.max_rel_error, kGradTol));
    }
  }
  const double secs = seconds_since(t0);
  rep.check(secs < kGradSeconds, fmt("runtime %.2f s (max %.0f s)", secs, kGradSeconds));
  return rep.verdict("gradient suite");
}

// ---- 6: sampler statistics -----------------------------------------------------

int criterion_6() {
  Report rep{6};
  {
    RawSplits s;
    s.train = {{"a", "r", "b"}, {"a", "r", "c"}, {"d", "r", "b"}};
    Dataset d;
    d.vocab = build_vocab(s.train, {}, {});
    d.kg = index_kg(s.train, {}, {}, d.vocab);
    const BernoulliTable table = bernoulli_table(d.kg);
    Rng rng(6);
    std::vector<Triple> batch(kBernDraws / 10);
    for (std::size_t i = 0; i < batch.size(); ++i) batch[i] = d.kg.train[i % 3];
    const NegBatch nb = bern_negatives(batch, 10, table, d.kg, rng);
    std::size_t heads = 0;
    for (Slot sl : nb.slots) heads += sl == Slot::kHead;
    const double freq = double(heads) / double(nb.slots.size());
    rep.check(table.p_head[0] == 0.5 && std::fabs(freq - 0.5) <= kBernTol,
              fmt("bernoulli head frequency %.4f over %zu draws, p_head %.3f (tol %.2f)", freq, nb.slots.size(),
                  table.p_head[0], kBernTol));
  }
  {
    const Dataset d = build_dataset(random_splits(30, 3, 900, 10, 10, 66));
    Rng rng(66);
    std::uniform_int_distribution<EntityId> pe(0, EntityId(d.kg.n_entities - 1));
    std::uniform_int_distribution<RelationId> pr(0, RelationId(d.kg.n_relations - 1));
    std::unordered_set<Triple, TripleHash> train(d.kg.train.begin(), d.kg.train.end());
    std::size_t leaked = 0, kept = 0, expected_kept = 0;
    for (std::size_t done = 0; done < kFilterCandidates; done += 10000) {
      std::vector<Triple> cands(10000);
      for (auto& x : cands) {
        x = {pe(rng), pr(rng), pe(rng)};
        expected_kept += !train.count(x);
      }
      for (const Triple& x : filter_known(cands, d.kg)) {
        leaked += train.count(x);
        ++kept;
      }
    }
    rep.check(leaked == 0 && kept == expected_kept,
              fmt("filter_known over %zu candidates: %zu train triples emitted, %zu kept (expected %zu)",
                  kFilterCandidates, leaked, kept, expected_kept));
  }
  return rep.verdict("sampler statistics");
}

// ---- 7: determinism and persistence --------------------------------------------

bool same_tree(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> fa, fb;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) fa.push_back(fs::relative(e.path(), a));
  }
  for (const auto& e : fs::recursive_directory_iterator(b)) {
    if (e.is_regular_file()) fb.push_back(fs::relative(e.path(), b));
  }
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) return false;
  for (const auto& f : fa) {
    if (read_text(a / f) != read_text(b / f)) return false;
  }
  return true;
}

int criterion_7() {
  Report rep{7};
  TempDir tmp;
  const Dataset data = build_dataset(random_splits(30, 4, 300, 20, 20, 7));
  TrainConfig c;
  c.model = "RotatE";
  c.dataset = "random";
  c.dim = 8;
  c.lr = 0.01;
  c.sampler = SamplerKind::kAdversarial;
  c.n_neg = 8;
  c.batch_size = 32;
  c.max_epochs = 6;
  c.check_per_epoch = 2;
  c.seed = 77;

  train(c, data, {tmp / "a", {}, nullptr});
  train(c, data, {tmp / "b", {}, nullptr});
  rep.check(same_tree(tmp / "a", tmp / "b"), "identical reruns give byte-identical logs and checkpoints");

  TrainConfig part = c;
  part.max_epochs = 3;
  train(part, data, {tmp / "r", {}, nullptr});
  train(c, data, {tmp / "r", tmp / "r" / "last", nullptr});
  rep.check(same_tree(tmp / "a", tmp / "r"), "resume after epoch 3 of 6 equals the uninterrupted run (files byte-identical)");

  const Checkpoint ck = load_checkpoint(tmp / "a" / "last");
  save_checkpoint(ck, tmp / "copy");
  const bool round = load_checkpoint(tmp / "copy") == ck && same_tree(tmp / "a" / "last", tmp / "copy");
  rep.check(round, "checkpoint load/save round-trip is bitwise");
  return rep.verdict("determinism and persistence");
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<int()>> criteria{{1, criterion_1}, {2, criterion_2}, {3, criterion_3},
                                                     {4, criterion_4}, {5, criterion_5}, {6, criterion_6},
                                                     {7, criterion_7}};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (const auto& [k, _] : criteria) which.push_back(k);
  }
  int status = 0;
  for (int k : which) {
    auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      return 2;
    }
    int rc = 0;
    try {
      rc = it->second();
    } catch (const std::exception& e) {
      std::printf("criterion %d: FAIL (exception: %s)\n", k, e.what());
      rc = 1;
    }
    if (rc == 1 || (rc == 77 && status == 0)) status = rc;
  }
  return status;
}
