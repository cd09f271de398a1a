#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "kge/kgdata/kgdata.hpp"

namespace kge {

// All randomness flows through an explicitly passed engine.
using Rng = std::mt19937_64;

enum class Slot : std::uint8_t { kHead = 0, kTail = 1 };

// Filtered resampling gives up after this many draws and keeps the last one.
inline constexpr int kRetryCap = 10;

struct NegBatch {
  std::vector<Triple> positives;
  std::size_t n_neg = 0;
  // Row-major [positives.size() x n_neg].
  std::vector<Triple> negatives;
  std::vector<Slot> slots;
  // Set when the retry cap was hit; such a negative may be a train triple.
  std::vector<std::uint8_t> unfiltered;

  std::span<const Triple> negatives_of(std::size_t i) const {
    return std::span<const Triple>(negatives).subspan(i * n_neg, n_neg);
  }
};

// Candidates that do not occur in train, order preserved.
std::vector<Triple> filter_known(std::span<const Triple> candidates, const IndexedKG& kg);

// Head or tail (probability 1/2 each) replaced by a uniform entity.
NegBatch uniform_negatives(std::span<const Triple> batch, std::size_t n_neg, const IndexedKG& kg, Rng& rng);

struct BernoulliTable {
  std::vector<double> tph;  // mean distinct tails per (h, r)
  std::vector<double> hpt;  // mean distinct heads per (r, t)
  std::vector<double> p_head;
  std::vector<std::uint8_t> present;

  // Throws DataError if r never occurs in train.
  double head_probability(RelationId r) const;
};

BernoulliTable bernoulli_table(const IndexedKG& kg);

// Head replaced with probability p_head(r), tail otherwise.
NegBatch bern_negatives(std::span<const Triple> batch, std::size_t n_neg, const BernoulliTable& table,
                        const IndexedKG& kg, Rng& rng);

// Every entity substituted into `slot`; index i holds entity i, so the
// positive itself sits at the index of its own entity.
std::vector<Triple> all_negatives(const Triple& x, Slot slot, std::size_t n_entities);

}  // namespace kge
