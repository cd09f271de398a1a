#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kge/engine/config.hpp"
#include "kge/engine/evaluate.hpp"

namespace kge {

// Candidate values per config key. Keys iterate in sorted order.
using SearchSpace = std::map<std::string, std::vector<std::string>>;

// Key/value assignments of one trial, in key order.
using Assignment = std::vector<std::pair<std::string, std::string>>;

struct TrialResult {
  std::size_t index = 0;
  Assignment assignment;
  TrainConfig config;
  RankingReport valid;
};

struct SearchResult {
  std::vector<TrialResult> trials;
  std::size_t best = 0;  // index into trials

  const TrialResult& best_trial() const { return trials.at(best); }
};

// Trains a config and reports its validation ranking.
using TrialRunner = std::function<RankingReport(const TrainConfig&)>;

// Throws ConfigError on unknown keys or empty value lists.
void check_space(const SearchSpace& space);

// Cartesian product; the last key varies fastest.
std::vector<Assignment> grid_assignments(const SearchSpace& space);

// n_trials independent uniform draws per key, reproducible from the seed.
std::vector<Assignment> random_assignments(const SearchSpace& space, std::size_t n_trials, std::uint64_t seed);

// Applies an assignment to a base config and validates the result.
TrainConfig apply_assignment(const TrainConfig& base, const Assignment& assignment);

// Runs every assignment in order. Best = highest averaged validation MRR,
// earliest trial on ties. `on_trial` sees each result as it completes.
SearchResult run_search(const TrainConfig& base, const std::vector<Assignment>& assignments, const TrialRunner& runner,
                        const std::function<void(const TrialResult&)>& on_trial = {});

SearchResult grid_search(const SearchSpace& space, const TrainConfig& base, const TrialRunner& runner,
                         const std::function<void(const TrialResult&)>& on_trial = {});
SearchResult random_search(const SearchSpace& space, const TrainConfig& base, std::size_t n_trials,
                           std::uint64_t seed, const TrialRunner& runner,
                           const std::function<void(const TrialResult&)>& on_trial = {});

}  // namespace kge
