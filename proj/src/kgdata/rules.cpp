#include "kge/kgdata/rules.hpp"

#include <charconv>
#include <fstream>
#include <unordered_set>

#include "kge/error.hpp"

namespace kge {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_int(const std::string& s, std::int32_t& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string format_triple(const Triple& x) {
  return std::to_string(x.h) + "," + std::to_string(x.r) + "," + std::to_string(x.t);
}

Triple parse_triple(const std::string& s, const std::string& where) {
  const auto c1 = s.find(',');
  const auto c2 = c1 == std::string::npos ? c1 : s.find(',', c1 + 1);
  Triple x;
  if (c2 == std::string::npos || s.find(',', c2 + 1) != std::string::npos ||
      !parse_int(s.substr(0, c1), x.h) || !parse_int(s.substr(c1 + 1, c2 - c1 - 1), x.r) ||
      !parse_int(s.substr(c2 + 1), x.t)) {
    throw DataError(where + ": malformed triple '" + s + "'");
  }
  return x;
}

// Train triples with duplicates removed, first-occurrence order.
std::vector<Triple> distinct_train(const IndexedKG& kg) {
  std::unordered_set<Triple, TripleHash> seen;
  std::vector<Triple> out;
  out.reserve(kg.train.size());
  for (const Triple& x : kg.train) {
    if (seen.insert(x).second) out.push_back(x);
  }
  return out;
}

}  // namespace

std::vector<Rule> load_rules(const std::filesystem::path& path, const Vocab& vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open rule file: " + path.string());

  std::vector<Rule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);

    const auto fields = split_tabs(line);
    if (fields.size() != 3 && fields.size() != 4) {
      throw DataError(where + ": expected confidence, head and 1 or 2 body relations");
    }
    Rule rule;
    if (!parse_double(fields[0], rule.confidence)) throw DataError(where + ": bad confidence '" + fields[0] + "'");
    if (!(rule.confidence > 0.0 && rule.confidence <= 1.0)) {
      throw DataError(where + ": confidence " + fields[0] + " outside (0, 1]");
    }
    try {
      rule.head = vocab.relation_id(fields[1]);
      for (std::size_t i = 2; i < fields.size(); ++i) rule.body.push_back(vocab.relation_id(fields[i]));
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<Grounding> ground_rules(const std::vector<Rule>& rules, const IndexedKG& kg) {
  const std::vector<Triple> facts = distinct_train(kg);
  std::vector<Grounding> out;
  for (const Rule& rule : rules) {
    if (rule.body.size() == 1) {
      for (const Triple& x : facts) {
        if (x.r != rule.body[0]) continue;
        Grounding g;
        g.body = {x};
        g.conclusion = {x.h, rule.head, x.t};
        g.confidence = rule.confidence;
        g.conclusion_in_train = kg.in_train(g.conclusion);
        out.push_back(std::move(g));
      }
    } else if (rule.body.size() == 2) {
      for (const Triple& first : facts) {
        if (first.r != rule.body[0]) continue;
        for (EntityId z : kg.tails(first.t, rule.body[1])) {
          Grounding g;
          g.body = {first, Triple{first.t, rule.body[1], z}};
          g.conclusion = {first.h, rule.head, z};
          g.confidence = rule.confidence;
          g.conclusion_in_train = kg.in_train(g.conclusion);
          out.push_back(std::move(g));
        }
      }
    } else {
      throw DataError("rule body must have 1 or 2 atoms");
    }
  }
  return out;
}

void write_groundings(const std::filesystem::path& path, const std::vector<Grounding>& groundings) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write groundings file: " + path.string());
  char buf[32];
  for (const Grounding& g : groundings) {
    auto res = std::to_chars(buf, buf + sizeof buf, g.confidence);
    out.write(buf, res.ptr - buf);
    out << '\t' << format_triple(g.conclusion);
    for (const Triple& b : g.body) out << '\t' << format_triple(b);
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<Grounding> read_groundings(const std::filesystem::path& path, const IndexedKG& kg) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open groundings file: " + path.string());
  std::vector<Grounding> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    const auto fields = split_tabs(line);
    if (fields.size() != 3 && fields.size() != 4) throw DataError(where + ": expected 3 or 4 fields");
    Grounding g;
    if (!parse_double(fields[0], g.confidence) || !(g.confidence > 0.0 && g.confidence <= 1.0)) {
      throw DataError(where + ": bad confidence '" + fields[0] + "'");
    }
    g.conclusion = parse_triple(fields[1], where);
    for (std::size_t i = 2; i < fields.size(); ++i) g.body.push_back(parse_triple(fields[i], where));
    auto in_range = [&](const Triple& x) {
      return x.h >= 0 && x.t >= 0 && x.r >= 0 && std::size_t(x.h) < kg.n_entities &&
             std::size_t(x.t) < kg.n_entities && std::size_t(x.r) < kg.n_relations;
    };
    if (!in_range(g.conclusion)) throw DataError(where + ": id out of range");
    for (const Triple& b : g.body) {
      if (!in_range(b)) throw DataError(where + ": id out of range");
    }
    g.conclusion_in_train = kg.in_train(g.conclusion);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace kge
