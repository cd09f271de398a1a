#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace kge {

enum class LossKind { kMargin, kSelfAdversarial, kBce };

std::string_view loss_name(LossKind kind);
LossKind parse_loss(std::string_view name);

struct LossSpec {
  LossKind kind = LossKind::kSelfAdversarial;
  double margin = 6.0;           // gamma, margin and self-adversarial losses
  double adv_temperature = 1.0;  // alpha, self-adversarial loss
  double label_smoothing = 0.0;  // epsilon, bce only

  // Throws ConfigError on out-of-range parameters.
  void validate() const;

  friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

// Loss value plus dL/ds for every score it consumed.
struct LossGrad {
  double loss = 0.0;
  std::vector<double> d_pos;
  std::vector<double> d_neg;
};

// mean over (positive, negative) pairs of max(0, gamma - s_pos + s_neg).
// neg is row-major [pos.size() x n]; each negative pairs with its row's positive.
double margin_loss(std::span<const double> pos, std::span<const double> neg, double gamma);
LossGrad margin_loss_grad(std::span<const double> pos, std::span<const double> neg, double gamma);

// mean over rows of -log sig(gamma + s_pos) - sum_i w_i log sig(-gamma - s_neg_i),
// w = softmax(alpha * s_neg) per row, held constant in the gradient.
double self_adversarial_loss(std::span<const double> pos, std::span<const double> neg, double gamma, double alpha);
LossGrad self_adversarial_loss_grad(std::span<const double> pos, std::span<const double> neg, double gamma,
                                    double alpha);

// Softmax of alpha * scores.
std::vector<double> adversarial_weights(std::span<const double> neg_scores, double alpha);

// mean of -[y log sig(s) + (1 - y) log(1 - sig(s))]. d_pos holds dL/ds.
double bce_loss(std::span<const double> scores, std::span<const double> labels);
LossGrad bce_loss_grad(std::span<const double> scores, std::span<const double> labels);

}  // namespace kge
