#include "support.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kge::test {
namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::mt19937_64 rng(std::random_device{}());
  for (int attempt = 0; attempt < 100; ++attempt) {
    const fs::path p = fs::temp_directory_path() / ("kge-test-" + std::to_string(rng()));
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_triples(const fs::path& path, const std::vector<LabeledTriple>& triples) {
  std::string text;
  for (const auto& x : triples) text += x.h + "\t" + x.r + "\t" + x.t + "\n";
  write_text(path, text);
}

void write_dataset(const fs::path& dir, const RawSplits& s) {
  fs::create_directories(dir);
  write_triples(dir / "train.txt", s.train);
  write_triples(dir / "valid.txt", s.valid);
  write_triples(dir / "test.txt", s.test);
}

Dataset build_dataset(const RawSplits& s) {
  Dataset d;
  d.vocab = build_vocab(s.train, s.valid, s.test);
  d.kg = index_kg(s.train, s.valid, s.test, d.vocab);
  return d;
}

RawSplits chain_splits() {
  auto e = [](int i) { return "e" + std::to_string(i); };
  RawSplits s;
  const std::vector<LabeledTriple> valid = {{e(2), "next", e(3)}, {e(4), "skip", e(6)}};
  const std::vector<LabeledTriple> test = {{e(4), "next", e(5)}, {e(1), "skip", e(3)}};
  auto held_out = [&](const LabeledTriple& x) {
    for (const auto& y : valid) if (x == y) return true;
    for (const auto& y : test) if (x == y) return true;
    return false;
  };
  for (int i = 0; i < 7; ++i) {
    LabeledTriple x{e(i), "next", e(i + 1)};
    if (!held_out(x)) s.train.push_back(x);
  }
  for (int i = 0; i < 6; ++i) {
    LabeledTriple x{e(i), "skip", e(i + 2)};
    if (!held_out(x)) s.train.push_back(x);
  }
  s.valid = valid;
  s.test = test;
  return s;
}

RawSplits random_splits(std::size_t n_entities, std::size_t n_relations, std::size_t n_train, std::size_t n_valid,
                        std::size_t n_test, std::uint64_t seed) {
  const std::size_t total = n_train + n_valid + n_test;
  if (total > n_entities * n_entities * n_relations) throw std::invalid_argument("too many triples requested");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pe(0, n_entities - 1), pr(0, n_relations - 1);
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  std::vector<LabeledTriple> all;
  while (all.size() < total) {
    const auto h = pe(rng), r = pr(rng), t = pe(rng);
    if (!seen.emplace(h, r, t).second) continue;
    all.push_back({"e" + std::to_string(h), "r" + std::to_string(r), "e" + std::to_string(t)});
  }
  RawSplits s;
  s.train.assign(all.begin(), all.begin() + std::ptrdiff_t(n_train));
  s.valid.assign(all.begin() + std::ptrdiff_t(n_train), all.begin() + std::ptrdiff_t(n_train + n_valid));
  s.test.assign(all.begin() + std::ptrdiff_t(n_train + n_valid), all.end());
  return s;
}

}  // namespace kge::test
