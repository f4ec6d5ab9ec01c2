#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wforge/core.hpp"

namespace wforge::chase {

// Ground atom over constants and labeled nulls.
using Fact = Atom;

struct ChaseStep {
  std::string rule;
  std::vector<std::pair<std::string, Term>> substitution;
  Fact produced;
};

struct ChaseInstance {
  std::set<Fact> facts;
  std::map<std::string, std::vector<std::vector<Term>>> relations;
  std::uint64_t next_null = 0;
  std::vector<ChaseStep> steps;

  bool add(Fact f) {
    if (facts.contains(f)) return false;
    relations[f.predicate].push_back(f.terms);
    facts.insert(std::move(f));
    return true;
  }

  bool contains(const Fact& f) const { return facts.contains(f); }

  const std::vector<std::vector<Term>>& relation(const std::string& pred) const {
    static const std::vector<std::vector<Term>> empty;
    auto it = relations.find(pred);
    return it == relations.end() ? empty : it->second;
  }

  std::size_t count(const std::string& pred) const { return relation(pred).size(); }

  Term fresh_null() { return Term::labeled_null(next_null++); }
};

inline Fact fact(std::string pred, const std::vector<std::string>& values) {
  Fact f{std::move(pred), {}};
  for (const auto& v : values) f.terms.push_back(Term::constant(v));
  return f;
}

// Predicates whose facts come from outside: @input ones plus body predicates
// no rule derives (dom excluded).
inline std::set<std::string> edb_predicates(const Program& p) {
  std::set<std::string> out;
  for (const auto& [pred, ann] : p.annotations)
    if (ann.input) out.insert(pred);
  auto heads = head_predicates(p);
  for (const auto& r : p.rules)
    for (const auto& a : r.body)
      if (!a.is_skolem_binding() && !heads.contains(a.predicate) && !is_dom_predicate(a.predicate))
        out.insert(a.predicate);
  return out;
}

inline std::set<std::string> program_constants(const Program& p) {
  std::set<std::string> out;
  auto note = [&](const Atom& a) {
    for (const auto& t : a.terms)
      if (t.is_constant()) out.insert(t.name);
  };
  for (const auto& r : p.rules) {
    note(r.head);
    for (const auto& a : r.body) note(a);
  }
  return out;
}

// Adds dom / dom<k> facts for every arity used by the program: all k-tuples
// over the constants of the instance and of the program (active domain).
inline void materialize_dom(const Program& p, ChaseInstance& inst) {
  std::set<std::size_t> arities;
  for (const auto& r : p.rules)
    for (const auto& a : r.body)
      if (is_dom_predicate(a.predicate)) arities.insert(a.arity());
  if (arities.empty()) return;
  std::set<std::string> consts = program_constants(p);
  for (const auto& f : inst.facts)
    if (!is_dom_predicate(f.predicate))
      for (const auto& t : f.terms)
        if (t.is_constant()) consts.insert(t.name);
  std::vector<std::string> dom(consts.begin(), consts.end());
  for (auto k : arities) {
    std::vector<std::size_t> idx(k, 0);
    if (dom.empty()) continue;
    for (;;) {
      Fact f{dom_predicate(k), {}};
      for (auto i : idx) f.terms.push_back(Term::constant(dom[i]));
      inst.add(std::move(f));
      std::size_t pos = 0;
      while (pos < k && ++idx[pos] == dom.size()) idx[pos++] = 0;
      if (pos == k) break;
    }
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    auto b = s.find_first_not_of(' ');
    auto e = s.find_last_not_of(' ');
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

}  // namespace detail

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(detail::split_csv_line(line));
  }
  return rows;
}

// One fact per CSV row of every @bind-ed predicate (relative paths resolve
// against `dir`), then dom facts.
inline ChaseInstance load_edb(const Program& p, const std::filesystem::path& dir) {
  ChaseInstance inst;
  auto arities = predicate_arities(p);
  for (const auto& [pred, ann] : p.annotations) {
    if (!ann.bind) continue;
    std::filesystem::path path = ann.bind->path;
    if (path.is_relative()) path = dir / path;
    auto rows = read_csv(path);
    auto it = arities.find(pred);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (it != arities.end() && rows[i].size() != it->second)
        throw ArityMismatch(path.string() + " row " + std::to_string(i + 1) + " has " +
                            std::to_string(rows[i].size()) + " columns, " + pred + " has arity " +
                            std::to_string(it->second));
      inst.add(fact(pred, rows[i]));
    }
  }
  materialize_dom(p, inst);
  return inst;
}

// Random EDB over at most `max_constants` constants and `max_facts` facts.
inline ChaseInstance random_database(const Program& p, std::mt19937_64& rng, std::size_t max_constants = 6,
                                     std::size_t max_facts = 20) {
  auto arities = predicate_arities(p);
  std::vector<std::string> preds;
  for (const auto& pred : edb_predicates(p))
    if (arities.contains(pred)) preds.push_back(pred);
  ChaseInstance inst;
  if (preds.empty()) return inst;
  auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  std::size_t nconst = 2 + below(std::max<std::size_t>(1, max_constants - 1));
  std::size_t nfacts = 1 + below(max_facts);
  for (std::size_t i = 0; i < nfacts; ++i) {
    const auto& pred = preds[below(preds.size())];
    std::vector<std::string> vals;
    for (std::size_t k = 0; k < arities.at(pred); ++k) vals.push_back(std::to_string(below(nconst)));
    inst.add(fact(pred, vals));
  }
  return inst;
}

inline std::string print(const ChaseInstance& inst) {
  std::string out;
  for (const auto& f : inst.facts) out += wforge::print(f) + ".\n";
  return out;
}

}  // namespace wforge::chase
