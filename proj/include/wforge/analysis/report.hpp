#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wforge/analysis/affectedness.hpp"
#include "wforge/analysis/causes.hpp"

namespace wforge::analysis {

enum class JoinKind { None, Harmless, HarmlessHarmful, HarmfulHarmful };

inline const char* to_string(JoinKind k) {
  switch (k) {
    case JoinKind::None: return "linear";
    case JoinKind::Harmless: return "harmless";
    case JoinKind::HarmlessHarmful: return "harmless-harmful";
    case JoinKind::HarmfulHarmful: return "harmful-harmful";
  }
  return "?";
}

inline std::size_t regular_atom_count(const Rule& r) {
  return static_cast<std::size_t>(
      std::count_if(r.body.begin(), r.body.end(), [](const Atom& a) { return !a.is_skolem_binding(); }));
}

// A join variable is "affected in an atom" when all its slots in that atom are
// affected. Harmful-harmful: affected in every atom holding it; harmless-harmful:
// affected in some; harmless: in none. The rule takes its worst join variable.
inline JoinKind join_kind(const Rule& r, const PositionSet& affected) {
  if (regular_atom_count(r) < 2) return JoinKind::None;
  JoinKind worst = JoinKind::Harmless;
  for (const auto& v : body_vars(r)) {
    std::size_t holders = 0, affected_holders = 0;
    for (const auto& a : r.body) {
      if (a.is_skolem_binding() || !atom_has_var(a, v)) continue;
      ++holders;
      bool all = true;
      for (std::size_t k = 0; k < a.terms.size(); ++k)
        if (a.terms[k].is_var() && a.terms[k].name == v && !affected.contains(Position{a.predicate, k + 1}))
          all = false;
      if (all) ++affected_holders;
    }
    if (holders < 2) continue;
    JoinKind k = affected_holders == 0        ? JoinKind::Harmless
                 : affected_holders == holders ? JoinKind::HarmfulHarmful
                                               : JoinKind::HarmlessHarmful;
    worst = std::max(worst, k);
  }
  return worst;
}

enum class Recursion { None, Direct, Indirect };

// Rule recursion from the predicate dependency graph: Direct when the head
// predicate occurs in the body, Indirect when it shares a strongly connected
// component with some body predicate.
inline std::map<std::string, Recursion> recursion(const Program& p) {
  std::map<std::string, std::set<std::string>> succ;
  for (const auto& r : p.rules)
    for (const auto& a : r.body)
      if (!a.is_skolem_binding()) succ[a.predicate].insert(r.head.predicate);
  auto reaches = [&](const std::string& from, const std::string& to) {
    std::set<std::string> seen{from};
    std::vector<std::string> stack{from};
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      if (cur == to) return true;
      for (const auto& n : succ[cur])
        if (seen.insert(n).second) stack.push_back(n);
    }
    return false;
  };
  std::map<std::string, Recursion> out;
  for (const auto& r : p.rules) {
    Recursion kind = Recursion::None;
    for (const auto& a : r.body) {
      if (a.is_skolem_binding()) continue;
      if (a.predicate == r.head.predicate) {
        kind = Recursion::Direct;
        break;
      }
      if (reaches(r.head.predicate, a.predicate)) kind = Recursion::Indirect;
    }
    out[r.id] = kind;
  }
  return out;
}

// Structural counts a generated program is checked against.
struct StructuralCounts {
  std::size_t rules = 0;
  std::size_t linear = 0;
  std::size_t harmless_joins = 0;
  std::size_t harmless_harmful_joins = 0;
  std::size_t harmful_harmful_joins = 0;
  std::size_t existential = 0;
  std::size_t recursive_direct = 0;
  std::size_t recursive_indirect = 0;
  std::size_t conditions = 0;

  friend bool operator==(const StructuralCounts&, const StructuralCounts&) = default;
};

inline StructuralCounts structural_counts(const Program& p, const PositionSet& affected) {
  StructuralCounts c;
  auto rec = recursion(p);
  for (const auto& r : p.rules) {
    ++c.rules;
    switch (join_kind(r, affected)) {
      case JoinKind::None: ++c.linear; break;
      case JoinKind::Harmless: ++c.harmless_joins; break;
      case JoinKind::HarmlessHarmful: ++c.harmless_harmful_joins; break;
      case JoinKind::HarmfulHarmful: ++c.harmful_harmful_joins; break;
    }
    if (!r.existentials.empty()) ++c.existential;
    if (rec[r.id] == Recursion::Direct) ++c.recursive_direct;
    if (rec[r.id] == Recursion::Indirect) ++c.recursive_indirect;
    c.conditions += r.conditions.size();
  }
  return c;
}

inline StructuralCounts structural_counts(const Program& p) {
  return structural_counts(p, affected_positions(p));
}

struct HarmfulRuleReport {
  std::string rule;
  std::vector<std::string> join_vars;
  DhMdh dh;
};

struct AffectednessReport {
  PositionSet affected;
  ClassMap classes;
  std::vector<HarmfulJoin> harmful_joins;
  CauseGraph causes;
  std::vector<HarmfulRuleReport> per_harmful_rule;
  WardednessResult wardedness;
  StructuralCounts counts;
};

inline AffectednessReport analyze(const Program& p) {
  AffectednessReport rep;
  rep.affected = affected_positions(p);
  rep.classes = classify(p, rep.affected);
  rep.harmful_joins = harmful_joins(p, rep.affected);
  rep.causes = cause_graph(p, rep.affected);
  rep.wardedness = is_warded(p);
  rep.counts = structural_counts(p, rep.affected);
  for (const auto& r : p.rules) {
    auto jv = harmful_join_vars(r, rep.affected);
    if (jv.empty()) continue;
    rep.per_harmful_rule.push_back({r.id, jv, dh_mdh(p, r, rep.affected)});
  }
  return rep;
}

}  // namespace wforge::analysis
