#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "kge/ckge/grad.hpp"
#include "kge/ckge/model.hpp"
#include "kge/kgdata/rules.hpp"

namespace kge {

// Soft truth targets for grounded conclusions that are absent from train.
struct SoftLabelSet {
  std::vector<Triple> unlabeled;
  std::vector<double> labels;
  double c = 0.0;
  // ModelParams::version the labels were predicted with.
  std::uint64_t params_version = 0;
};

// Groundings indexed by their (not-in-train) conclusion, deduplicated in
// first-occurrence order. Built once per grounding file.
struct UnlabeledPool {
  std::vector<Triple> conclusions;
  // groundings_of[i] lists indices into `groundings` concluding conclusions[i].
  std::vector<std::vector<std::size_t>> groundings_of;
  std::vector<Grounding> groundings;
};

UnlabeledPool build_unlabeled_pool(std::vector<Grounding> groundings, const IndexedKG& kg);

// sigmoid(ComplEx score). Requires ComplEx parameters.
std::vector<double> triple_truth(const ModelParams& params, std::span<const Triple> triples);

// s(u) = clip( pi(u) + C * sum_g lambda_g * prod_{b in body(g)} pi(b), 0, 1 )
// over the groundings g concluding u (product t-norm for conjunctions).
SoftLabelSet predict_soft_labels(const ModelParams& params, std::span<const Grounding> groundings, double c,
                                 const IndexedKG& kg);

// Same, for a slice [begin, end) of a prebuilt pool.
SoftLabelSet predict_soft_labels(const ModelParams& params, const UnlabeledPool& pool, std::size_t begin,
                                 std::size_t end, double c);

// bce(labeled) + bce(soft), each mean-reduced; an empty soft set contributes
// nothing. Throws DataError if soft labels were predicted for other params.
double ruge_loss(const ModelParams& params, std::span<const Triple> labeled, std::span<const double> labels,
                 const SoftLabelSet& soft);

BatchLoss ruge_loss_and_grad(const ModelParams& params, std::span<const Triple> labeled,
                             std::span<const double> labels, const SoftLabelSet& soft);

}  // namespace kge
