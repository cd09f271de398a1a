#include "kge/kgdata/kgdata.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "kge/error.hpp"

namespace kge {
namespace {

const std::vector<EntityId> kEmpty;

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h ^= 0xff;  // separator
  h *= 0x100000001b3ULL;
  return h;
}

Triple encode(const LabeledTriple& x, const Vocab& vocab) {
  return Triple{vocab.entity_id(x.h), vocab.relation_id(x.r), vocab.entity_id(x.t)};
}

std::vector<Triple> encode_all(const std::vector<LabeledTriple>& xs, const Vocab& vocab) {
  std::vector<Triple> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(encode(x, vocab));
  return out;
}

void sort_unique(std::unordered_map<std::uint64_t, std::vector<EntityId>>& m) {
  for (auto& [key, ids] : m) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
}

}  // namespace

std::vector<LabeledTriple> load_triples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open triple file: " + path.string());

  std::vector<LabeledTriple> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw DataError(path.string() + ": line " + std::to_string(lineno) + ": expected 3 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    out.push_back({std::move(fields[0]), std::move(fields[1]), std::move(fields[2])});
  }
  if (out.empty()) throw DataError("empty triple file: " + path.string());
  return out;
}

EntityId Vocab::add_entity(const std::string& label) {
  auto [it, inserted] = entity_to_id_.try_emplace(label, EntityId(id_to_entity_.size()));
  if (inserted) id_to_entity_.push_back(label);
  return it->second;
}

RelationId Vocab::add_relation(const std::string& label) {
  auto [it, inserted] = relation_to_id_.try_emplace(label, RelationId(id_to_relation_.size()));
  if (inserted) id_to_relation_.push_back(label);
  return it->second;
}

EntityId Vocab::entity_id(const std::string& label) const {
  auto it = entity_to_id_.find(label);
  if (it == entity_to_id_.end()) throw DataError("unknown entity label: " + label);
  return it->second;
}

RelationId Vocab::relation_id(const std::string& label) const {
  auto it = relation_to_id_.find(label);
  if (it == relation_to_id_.end()) throw DataError("unknown relation label: " + label);
  return it->second;
}

std::uint64_t Vocab::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& s : id_to_entity_) h = fnv1a(h, s);
  h = fnv1a(h, "\x01relations");
  for (const auto& s : id_to_relation_) h = fnv1a(h, s);
  return h;
}

void Vocab::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto dump = [](const std::filesystem::path& p, const std::vector<std::string>& labels) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw DataError("cannot write " + p.string());
    for (std::size_t i = 0; i < labels.size(); ++i) out << labels[i] << '\t' << i << '\n';
    if (!out) throw DataError("write failed: " + p.string());
  };
  dump(dir / "entities.tsv", id_to_entity_);
  dump(dir / "relations.tsv", id_to_relation_);
}

Vocab build_vocab(const std::vector<LabeledTriple>& train,
                  const std::vector<LabeledTriple>& valid,
                  const std::vector<LabeledTriple>& test) {
  Vocab v;
  for (const auto* split : {&train, &valid, &test}) {
    for (const auto& x : *split) {
      v.add_entity(x.h);
      v.add_relation(x.r);
      v.add_entity(x.t);
    }
  }
  return v;
}

bool IndexedKG::in_train(const Triple& x) const {
  const auto& ts = tails(x.h, x.r);
  return std::binary_search(ts.begin(), ts.end(), x.t);
}

const std::vector<EntityId>& IndexedKG::tails(EntityId h, RelationId r) const {
  auto it = hr2t.find(pair_key(h, r));
  return it == hr2t.end() ? kEmpty : it->second;
}

const std::vector<EntityId>& IndexedKG::heads(RelationId r, EntityId t) const {
  auto it = rt2h.find(pair_key(r, t));
  return it == rt2h.end() ? kEmpty : it->second;
}

void IndexedKG::rebuild_statistics() {
  hr2t.clear();
  rt2h.clear();
  freq_hr.clear();
  freq_rt.clear();
  for (const Triple& x : train) {
    hr2t[pair_key(x.h, x.r)].push_back(x.t);
    rt2h[pair_key(x.r, x.t)].push_back(x.h);
    ++freq_hr[pair_key(x.h, x.r)];
    ++freq_rt[pair_key(x.r, x.t)];
  }
  sort_unique(hr2t);
  sort_unique(rt2h);
}

IndexedKG index_kg(const std::vector<LabeledTriple>& train,
                   const std::vector<LabeledTriple>& valid,
                   const std::vector<LabeledTriple>& test,
                   const Vocab& vocab) {
  IndexedKG kg;
  kg.train = encode_all(train, vocab);
  kg.valid = encode_all(valid, vocab);
  kg.test = encode_all(test, vocab);
  kg.n_entities = vocab.n_entities();
  kg.n_relations = vocab.n_relations();
  kg.n_base_relations = kg.n_relations;
  kg.rebuild_statistics();
  return kg;
}

IndexedKG add_inverse_relations(const IndexedKG& kg) {
  if (kg.has_inverse) throw DataError("inverse relations already added");
  IndexedKG out;
  out.valid = kg.valid;
  out.test = kg.test;
  out.n_entities = kg.n_entities;
  out.n_base_relations = kg.n_relations;
  out.n_relations = 2 * kg.n_relations;
  out.has_inverse = true;
  out.train = kg.train;
  out.train.reserve(2 * kg.train.size());
  const auto n = RelationId(kg.n_relations);
  for (const Triple& x : kg.train) out.train.push_back({x.t, x.r + n, x.h});
  out.rebuild_statistics();
  return out;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  for (const char* name : {"train.txt", "valid.txt", "test.txt"}) {
    if (!std::filesystem::exists(dir / name)) throw DataError("missing dataset file: " + (dir / name).string());
  }
  const auto train = load_triples(dir / "train.txt");
  const auto valid = load_triples(dir / "valid.txt");
  const auto test = load_triples(dir / "test.txt");
  Dataset ds;
  ds.vocab = build_vocab(train, valid, test);
  ds.kg = index_kg(train, valid, test, ds.vocab);
  return ds;
}

}  // namespace kge
