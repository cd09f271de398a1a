#pragma once

#include <span>
#include <vector>

#include "kge/ckge/model.hpp"

namespace kge {

// Scores triples against fixed parameters. Higher is more plausible for every
// model; distance models return negated distances.
//
//   TransE    -||h + r - t||_p
//   TransH    -||h_perp + d_r - t_perp||^2,  x_perp = x - (w.x) w
//   TransR    -||M_r h + r - M_r t||^2
//   DistMult  sum h r t
//   ComplEx   Re(sum h r conj(t))
//   RotatE    -||h o exp(i theta) - t||_2
//   SimplE    (<h_head, r, t_tail> + <t_head, r_inv, h_tail>) / 2
//
// A triple's score depends only on its own rows, so batched and one-by-one
// scoring agree bitwise. No id range checks; use score() for that.
class TripleScorer {
 public:
  explicit TripleScorer(const ModelParams& params);

  double operator()(const Triple& x) const;

  const ModelParams& params() const { return params_; }
  // RotatE only: cached cos/sin of relation phases, [n_relations x dim].
  const double* cos_row(RelationId r) const { return cos_.data() + std::size_t(r) * params_.dim; }
  const double* sin_row(RelationId r) const { return sin_.data() + std::size_t(r) * params_.dim; }

 private:
  const ModelParams& params_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

// Throws DataError when an id is out of range.
void check_ids(const ModelParams& params, std::span<const Triple> triples);

std::vector<double> score(const ModelParams& params, std::span<const Triple> triples);

// Logistic function and log(1 + e^x), both overflow-safe.
double sigmoid(double x);
double softplus(double x);

}  // namespace kge
