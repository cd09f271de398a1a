#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace kge {

enum class StopDecision { kContinue, kStop };

// (epoch, validation metric) pairs in evaluation order.
using MetricHistory = std::vector<std::pair<std::size_t, double>>;

// Stop iff each of the last `patience` evaluations failed to exceed the best
// metric seen before it. Throws ConfigError when patience is 0.
StopDecision early_stop(std::span<const std::pair<std::size_t, double>> history, std::size_t patience);

}  // namespace kge
