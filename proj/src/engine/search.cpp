#include "kge/engine/search.hpp"

#include <random>

#include "kge/error.hpp"

namespace kge {

void check_space(const SearchSpace& space) {
  if (space.empty()) throw ConfigError("search space is empty");
  for (const auto& [key, values] : space) {
    if (!is_known_key(key)) throw ConfigError("unknown config key '" + key + "' in search space");
    if (values.empty()) throw ConfigError("search space key '" + key + "' has no values");
  }
}

std::vector<Assignment> grid_assignments(const SearchSpace& space) {
  check_space(space);
  std::vector<Assignment> out(1);
  for (const auto& [key, values] : space) {
    std::vector<Assignment> next;
    next.reserve(out.size() * values.size());
    for (const auto& partial : out) {
      for (const auto& v : values) {
        next.push_back(partial);
        next.back().emplace_back(key, v);
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<Assignment> random_assignments(const SearchSpace& space, std::size_t n_trials, std::uint64_t seed) {
  check_space(space);
  if (n_trials == 0) throw ConfigError("random search needs at least one trial");
  std::mt19937_64 rng(seed);
  std::vector<Assignment> out;
  for (std::size_t i = 0; i < n_trials; ++i) {
    Assignment a;
    for (const auto& [key, values] : space) {
      std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
      a.emplace_back(key, values[pick(rng)]);
    }
    out.push_back(std::move(a));
  }
  return out;
}

TrainConfig apply_assignment(const TrainConfig& base, const Assignment& assignment) {
  TrainConfig c = base;
  for (const auto& [k, v] : assignment) apply_setting(c, k, v);
  validate(c);
  return c;
}

SearchResult run_search(const TrainConfig& base, const std::vector<Assignment>& assignments, const TrialRunner& runner,
                        const std::function<void(const TrialResult&)>& on_trial) {
  // Reject every bad cell before spending compute on any of them.
  std::vector<TrainConfig> configs;
  for (const auto& a : assignments) configs.push_back(apply_assignment(base, a));
  SearchResult out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    TrialResult t{i, assignments[i], configs[i], runner(configs[i])};
    if (on_trial) on_trial(t);
    if (out.trials.empty() || t.valid.both.mrr > out.trials[out.best].valid.both.mrr) out.best = i;
    out.trials.push_back(std::move(t));
  }
  return out;
}

SearchResult grid_search(const SearchSpace& space, const TrainConfig& base, const TrialRunner& runner,
                         const std::function<void(const TrialResult&)>& on_trial) {
  return run_search(base, grid_assignments(space), runner, on_trial);
}

SearchResult random_search(const SearchSpace& space, const TrainConfig& base, std::size_t n_trials,
                           std::uint64_t seed, const TrialRunner& runner,
                           const std::function<void(const TrialResult&)>& on_trial) {
  return run_search(base, random_assignments(space, n_trials, seed), runner, on_trial);
}

}  // namespace kge
