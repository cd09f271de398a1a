#include "kge/rule/ruge.hpp"

#include <algorithm>
#include <string>

#include "kge/ckge/score.hpp"
#include "kge/error.hpp"

namespace kge {
namespace {

void require_complex(const ModelParams& params) {
  if (params.kind != ModelKind::kComplEx) throw ConfigError("rule injection requires ComplEx parameters");
}

void check_fresh(const ModelParams& params, const SoftLabelSet& soft) {
  if (soft.params_version != params.version) {
    throw DataError("soft labels predicted at parameter version " + std::to_string(soft.params_version) +
                    ", current version is " + std::to_string(params.version));
  }
}

}  // namespace

UnlabeledPool build_unlabeled_pool(std::vector<Grounding> groundings, const IndexedKG& kg) {
  UnlabeledPool pool;
  std::unordered_map<Triple, std::size_t, TripleHash> slot;
  for (std::size_t i = 0; i < groundings.size(); ++i) {
    const Triple& u = groundings[i].conclusion;
    if (kg.in_train(u)) continue;
    auto [it, inserted] = slot.try_emplace(u, pool.conclusions.size());
    if (inserted) {
      pool.conclusions.push_back(u);
      pool.groundings_of.emplace_back();
    }
    pool.groundings_of[it->second].push_back(i);
  }
  pool.groundings = std::move(groundings);
  return pool;
}

std::vector<double> triple_truth(const ModelParams& params, std::span<const Triple> triples) {
  require_complex(params);
  std::vector<double> s = score(params, triples);
  for (double& v : s) v = sigmoid(v);
  return s;
}

SoftLabelSet predict_soft_labels(const ModelParams& params, const UnlabeledPool& pool, std::size_t begin,
                                 std::size_t end, double c) {
  require_complex(params);
  if (!(c >= 0.0)) throw ConfigError("rule weight C must be >= 0");
  end = std::min(end, pool.conclusions.size());
  TripleScorer scorer(params);
  SoftLabelSet out;
  out.c = c;
  out.params_version = params.version;
  for (std::size_t u = begin; u < end; ++u) {
    double push = 0.0;
    for (std::size_t gi : pool.groundings_of[u]) {
      const Grounding& g = pool.groundings[gi];
      double body = 1.0;
      for (const Triple& b : g.body) body *= sigmoid(scorer(b));
      push += g.confidence * body;
    }
    const double s = sigmoid(scorer(pool.conclusions[u])) + c * push;
    out.unlabeled.push_back(pool.conclusions[u]);
    out.labels.push_back(std::clamp(s, 0.0, 1.0));
  }
  return out;
}

SoftLabelSet predict_soft_labels(const ModelParams& params, std::span<const Grounding> groundings, double c,
                                 const IndexedKG& kg) {
  require_complex(params);
  for (const Grounding& g : groundings) {
    check_ids(params, std::span<const Triple>(&g.conclusion, 1));
    check_ids(params, g.body);
  }
  const UnlabeledPool pool = build_unlabeled_pool(std::vector<Grounding>(groundings.begin(), groundings.end()), kg);
  return predict_soft_labels(params, pool, 0, pool.conclusions.size(), c);
}

double ruge_loss(const ModelParams& params, std::span<const Triple> labeled, std::span<const double> labels,
                 const SoftLabelSet& soft) {
  return ruge_loss_and_grad(params, labeled, labels, soft).loss;
}

BatchLoss ruge_loss_and_grad(const ModelParams& params, std::span<const Triple> labeled,
                             std::span<const double> labels, const SoftLabelSet& soft) {
  require_complex(params);
  check_fresh(params, soft);
  BatchLoss out = labeled_loss_and_grad(params, labeled, labels);
  if (!soft.unlabeled.empty()) {
    BatchLoss extra = labeled_loss_and_grad(params, soft.unlabeled, soft.labels);
    out.loss += extra.loss;
    out.grad.merge(extra.grad);
  }
  return out;
}

}  // namespace kge
