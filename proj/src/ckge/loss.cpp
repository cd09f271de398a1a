#include "kge/ckge/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kge/ckge/score.hpp"
#include "kge/error.hpp"

namespace kge {
namespace {

std::size_t negatives_per_row(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty()) throw DataError("loss over an empty batch");
  if (neg.size() % pos.size() != 0 || neg.empty()) {
    throw DataError("negative scores (" + std::to_string(neg.size()) + ") do not tile positives (" +
                    std::to_string(pos.size()) + ")");
  }
  return neg.size() / pos.size();
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("adversarial temperature must be > 0");
}

}  // namespace

std::string_view loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::kMargin: return "margin";
    case LossKind::kSelfAdversarial: return "self_adversarial";
    case LossKind::kBce: return "bce";
  }
  return "?";
}

LossKind parse_loss(std::string_view name) {
  if (name == "margin") return LossKind::kMargin;
  if (name == "self_adversarial" || name == "adv") return LossKind::kSelfAdversarial;
  if (name == "bce") return LossKind::kBce;
  throw ConfigError("unknown loss '" + std::string(name) + "'");
}

void LossSpec::validate() const {
  if (!(margin >= 0.0)) throw ConfigError("margin must be >= 0");
  if (kind == LossKind::kSelfAdversarial) check_alpha(adv_temperature);
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) throw ConfigError("label_smoothing must be in [0, 1)");
}

double margin_loss(std::span<const double> pos, std::span<const double> neg, double gamma) {
  return margin_loss_grad(pos, neg, gamma).loss;
}

LossGrad margin_loss_grad(std::span<const double> pos, std::span<const double> neg, double gamma) {
  if (!(gamma >= 0.0)) throw ConfigError("margin must be >= 0");
  const std::size_t n = negatives_per_row(pos, neg);
  const double scale = 1.0 / double(neg.size());
  LossGrad g;
  g.d_pos.assign(pos.size(), 0.0);
  g.d_neg.assign(neg.size(), 0.0);
  double total = 0.0;
  for (std::size_t b = 0; b < pos.size(); ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = gamma - pos[b] + neg[b * n + i];
      if (v > 0.0) {
        total += v;
        g.d_pos[b] -= scale;
        g.d_neg[b * n + i] += scale;
      }
    }
  }
  g.loss = total * scale;
  return g;
}

std::vector<double> adversarial_weights(std::span<const double> neg_scores, double alpha) {
  check_alpha(alpha);
  std::vector<double> w(neg_scores.size());
  if (w.empty()) return w;
  double mx = alpha * neg_scores[0];
  for (double s : neg_scores) mx = std::max(mx, alpha * s);
  double z = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(alpha * neg_scores[i] - mx);
    z += w[i];
  }
  for (double& x : w) x /= z;
  return w;
}

double self_adversarial_loss(std::span<const double> pos, std::span<const double> neg, double gamma,
                             double alpha) {
  return self_adversarial_loss_grad(pos, neg, gamma, alpha).loss;
}

LossGrad self_adversarial_loss_grad(std::span<const double> pos, std::span<const double> neg, double gamma,
                                    double alpha) {
  check_alpha(alpha);
  const std::size_t n = negatives_per_row(pos, neg);
  const double scale = 1.0 / double(pos.size());
  LossGrad g;
  g.d_pos.resize(pos.size());
  g.d_neg.resize(neg.size());
  double total = 0.0;
  for (std::size_t b = 0; b < pos.size(); ++b) {
    const auto row = neg.subspan(b * n, n);
    const auto w = adversarial_weights(row, alpha);
    // -log sig(x) = softplus(-x)
    double term = softplus(-(gamma + pos[b]));
    g.d_pos[b] = -sigmoid(-(gamma + pos[b])) * scale;
    for (std::size_t i = 0; i < n; ++i) {
      term += w[i] * softplus(gamma + row[i]);
      g.d_neg[b * n + i] = w[i] * sigmoid(gamma + row[i]) * scale;
    }
    total += term;
  }
  g.loss = total * scale;
  return g;
}

double bce_loss(std::span<const double> scores, std::span<const double> labels) {
  return bce_loss_grad(scores, labels).loss;
}

LossGrad bce_loss_grad(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw DataError("bce: scores and labels differ in length");
  LossGrad g;
  g.d_pos.resize(scores.size());
  if (scores.empty()) return g;
  for (double y : labels) {
    if (!(y >= 0.0 && y <= 1.0)) throw DataError("bce label " + std::to_string(y) + " outside [0, 1]");
  }
  const double scale = 1.0 / double(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    // -[y log sig(s) + (1-y) log sig(-s)] = softplus(s) - y s
    total += softplus(scores[i]) - labels[i] * scores[i];
    g.d_pos[i] = (sigmoid(scores[i]) - labels[i]) * scale;
  }
  g.loss = total * scale;
  return g;
}

}  // namespace kge
