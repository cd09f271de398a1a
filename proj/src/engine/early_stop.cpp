#include "kge/engine/early_stop.hpp"

#include <limits>

#include "kge/error.hpp"

namespace kge {

StopDecision early_stop(std::span<const std::pair<std::size_t, double>> history, std::size_t patience) {
  if (patience == 0) throw ConfigError("patience must be >= 1");
  double best = -std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  for (const auto& [epoch, metric] : history) {
    if (metric > best) {
      best = metric;
      stale = 0;
    } else {
      ++stale;
    }
  }
  return stale >= patience ? StopDecision::kStop : StopDecision::kContinue;
}

}  // namespace kge
