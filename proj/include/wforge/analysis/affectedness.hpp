#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wforge/core/model.hpp"

namespace wforge::analysis {

// Argument slot of a predicate, 1-based.
struct Position {
  std::string predicate;
  std::size_t index = 1;

  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
};

using PositionSet = std::set<Position>;

enum class VariableClass { Harmless, Harmful, Dangerous };

inline const char* to_string(VariableClass c) {
  switch (c) {
    case VariableClass::Harmless: return "harmless";
    case VariableClass::Harmful: return "harmful";
    case VariableClass::Dangerous: return "dangerous";
  }
  return "?";
}

// Where a variable occurs in the body of a rule. Skolem-binding literals and
// Skolem arguments count as non-affected occurrences; conditions don't count.
struct Occurrence {
  std::size_t atom = 0;
  std::size_t index = 1;  // 1-based position in the atom, 0 for a binding literal
};

inline std::vector<Occurrence> occurrences(const Rule& r, const std::string& var) {
  std::vector<Occurrence> out;
  for (std::size_t i = 0; i < r.body.size(); ++i) {
    const Atom& a = r.body[i];
    if (a.is_skolem_binding()) {
      if (atom_has_var(a, var)) out.push_back({i, 0});
      continue;
    }
    for (std::size_t k = 0; k < a.terms.size(); ++k) {
      const Term& t = a.terms[k];
      if (t.is_var() && t.name == var) {
        out.push_back({i, k + 1});
      } else if (t.is_skolem()) {
        std::vector<std::string> inner;
        collect_vars(t, inner);
        if (contains(inner, var)) out.push_back({i, 0});
      }
    }
  }
  return out;
}

inline bool occurrence_affected(const Rule& r, const Occurrence& o, const PositionSet& affected) {
  if (o.index == 0) return false;
  return affected.contains(Position{r.body[o.atom].predicate, o.index});
}

// True iff every body occurrence of var is at an affected position.
inline bool only_affected(const Rule& r, const std::string& var, const PositionSet& affected) {
  auto occ = occurrences(r, var);
  if (occ.empty()) return false;
  return std::all_of(occ.begin(), occ.end(),
                     [&](const Occurrence& o) { return occurrence_affected(r, o, affected); });
}

// Least fixpoint: existential head slots are affected; a head slot holding a
// body variable that occurs only in affected slots is affected.
inline PositionSet affected_positions(const Program& p) {
  PositionSet affected;
  for (const auto& r : p.rules)
    for (std::size_t k = 0; k < r.head.terms.size(); ++k) {
      const Term& t = r.head.terms[k];
      if (t.is_var() && r.existentials.contains(t.name)) affected.insert({r.head.predicate, k + 1});
    }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : p.rules)
      for (std::size_t k = 0; k < r.head.terms.size(); ++k) {
        const Term& t = r.head.terms[k];
        if (!t.is_var() || r.existentials.contains(t.name)) continue;
        Position pos{r.head.predicate, k + 1};
        if (affected.contains(pos)) continue;
        if (only_affected(r, t.name, affected)) {
          affected.insert(pos);
          changed = true;
        }
      }
  }
  return affected;
}

using ClassMap = std::map<std::pair<std::string, std::string>, VariableClass>;

inline VariableClass classify_var(const Rule& r, const std::string& var, const PositionSet& affected) {
  if (!only_affected(r, var, affected)) return VariableClass::Harmless;
  return atom_has_var(r.head, var) ? VariableClass::Dangerous : VariableClass::Harmful;
}

inline bool is_harmful(VariableClass c) { return c != VariableClass::Harmless; }

// (rule id, body variable) -> class, for every body variable of every rule.
inline ClassMap classify(const Program& p, const PositionSet& affected) {
  ClassMap out;
  for (const auto& r : p.rules)
    for (const auto& v : body_vars(r)) out[{r.id, v}] = classify_var(r, v, affected);
  return out;
}

struct WardViolation {
  std::string rule;
  std::string variable;
  std::string reason;
};

struct WardednessResult {
  bool warded = true;
  std::vector<WardViolation> violations;
};

// Ward check for one rule; returns the violation, if any.
inline std::optional<WardViolation> ward_violation(const Rule& r, const PositionSet& affected) {
  // canonical order = first occurrence in the rule
  const auto vars = body_vars(r);
  std::vector<std::string> dangerous;
  for (const auto& v : vars)
    if (classify_var(r, v, affected) == VariableClass::Dangerous) dangerous.push_back(v);
  if (dangerous.empty()) return std::nullopt;
  std::string first_shared_harmful;
  bool has_candidate = false;
  for (std::size_t i = 0; i < r.body.size(); ++i) {
    const Atom& ward = r.body[i];
    if (ward.is_skolem_binding()) continue;
    bool holds_all = std::all_of(dangerous.begin(), dangerous.end(),
                                 [&](const std::string& d) { return atom_has_var(ward, d); });
    if (!holds_all) continue;
    has_candidate = true;
    std::string offending;
    for (const auto& v : vars) {
      if (!atom_has_var(ward, v) || !is_harmful(classify_var(r, v, affected))) continue;
      for (std::size_t j = 0; j < r.body.size(); ++j)
        if (j != i && atom_has_var(r.body[j], v)) {
          offending = v;
          break;
        }
      if (!offending.empty()) break;
    }
    if (offending.empty()) return std::nullopt;
    if (first_shared_harmful.empty() ||
        std::find(vars.begin(), vars.end(), offending) <
            std::find(vars.begin(), vars.end(), first_shared_harmful))
      first_shared_harmful = offending;
  }
  if (!has_candidate)
    return WardViolation{r.id, dangerous.front(), "dangerous variables are not contained in a single body atom"};
  return WardViolation{r.id, first_shared_harmful, "ward shares a harmful variable with another body atom"};
}

inline WardednessResult is_warded(const Program& p) {
  WardednessResult res;
  const auto affected = affected_positions(p);
  for (const auto& r : p.rules)
    if (auto v = ward_violation(r, affected)) {
      res.warded = false;
      res.violations.push_back(std::move(*v));
    }
  return res;
}

struct HarmfulJoin {
  std::string rule;
  std::string variable;
  std::vector<std::size_t> atoms;  // 0-based body indices holding the variable

  friend bool operator==(const HarmfulJoin&, const HarmfulJoin&) = default;
};

// Harmful variables joining two or more distinct body atoms.
inline std::vector<HarmfulJoin> harmful_joins(const Program& p, const PositionSet& affected) {
  std::vector<HarmfulJoin> out;
  for (const auto& r : p.rules)
    for (const auto& v : body_vars(r)) {
      if (!is_harmful(classify_var(r, v, affected))) continue;
      HarmfulJoin hj{r.id, v, {}};
      for (std::size_t i = 0; i < r.body.size(); ++i)
        if (atom_has_var(r.body[i], v)) hj.atoms.push_back(i);
      if (hj.atoms.size() >= 2) out.push_back(std::move(hj));
    }
  return out;
}

inline std::vector<HarmfulJoin> harmful_joins(const Program& p) {
  return harmful_joins(p, affected_positions(p));
}

// Harmful join variables of a single rule, first-occurrence order.
inline std::vector<std::string> harmful_join_vars(const Rule& r, const PositionSet& affected) {
  std::vector<std::string> out;
  for (const auto& v : body_vars(r)) {
    if (!is_harmful(classify_var(r, v, affected))) continue;
    std::size_t n = 0;
    for (const auto& a : r.body)
      if (atom_has_var(a, v)) ++n;
    if (n >= 2) out.push_back(v);
  }
  return out;
}

}  // namespace wforge::analysis
