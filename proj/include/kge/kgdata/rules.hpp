#pragma once

#include <filesystem>
#include <vector>

#include "kge/kgdata/kgdata.hpp"

namespace kge {

// Horn rule over relations with one or two body atoms.
//   1 atom:  body0(x, y)              => head(x, y)
//   2 atoms: body0(x, y) & body1(y, z) => head(x, z)
struct Rule {
  std::vector<RelationId> body;
  RelationId head = 0;
  double confidence = 1.0;

  friend bool operator==(const Rule&, const Rule&) = default;
};

// A rule with its variables bound to entities; every body triple is in train.
struct Grounding {
  std::vector<Triple> body;
  Triple conclusion;
  double confidence = 1.0;
  // The conclusion itself already occurs in train.
  bool conclusion_in_train = false;

  friend bool operator==(const Grounding&, const Grounding&) = default;
};

// One rule per line: `confidence<TAB>head<TAB>body1[<TAB>body2]` with relation
// labels. Blank lines are skipped; an empty file yields no rules.
std::vector<Rule> load_rules(const std::filesystem::path& path, const Vocab& vocab);

// Groundings in rule order, then in train order of the first body atom.
std::vector<Grounding> ground_rules(const std::vector<Rule>& rules, const IndexedKG& kg);

// `lambda<TAB>h,r,t<TAB>h,r,t[<TAB>h,r,t]`, conclusion first.
void write_groundings(const std::filesystem::path& path, const std::vector<Grounding>& groundings);

// Reads a groundings file; conclusion_in_train is recomputed against kg.
std::vector<Grounding> read_groundings(const std::filesystem::path& path, const IndexedKG& kg);

}  // namespace kge
