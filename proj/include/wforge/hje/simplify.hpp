#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wforge/core.hpp"

namespace wforge::hje {

namespace detail {

// Merges bindings of the same variable. Same functor: frontiers are unified.
// Distinct functors, or a binding whose variable became a constant: the rule
// can never activate and nullopt is returned.
inline std::optional<Rule> merge_bindings(Rule r) {
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::string, std::size_t> first;
    for (std::size_t i = 0; i < r.body.size() && !changed; ++i) {
      const Atom& b = r.body[i];
      if (!b.is_skolem_binding()) continue;
      if (!b.terms[0].is_var()) return std::nullopt;
      auto [it, fresh] = first.emplace(b.terms[0].name, i);
      if (fresh) continue;
      const Atom& a = r.body[it->second];
      if (a.terms[1].name != b.terms[1].name) return std::nullopt;
      Subst s;
      if (!unify(b.terms[1], a.terms[1], s)) return std::nullopt;
      r.body.erase(r.body.begin() + static_cast<std::ptrdiff_t>(i));
      r = substitute(r, s);
      changed = true;
    }
  }
  return r;
}

// Conditions whose left side became a constant are decided statically.
inline std::optional<Rule> decide_conditions(Rule r) {
  std::vector<Condition> keep;
  for (const auto& c : r.conditions) {
    if (c.lhs.is_constant()) {
      if (!compare_values(c.lhs.name, c.op, c.constant)) return std::nullopt;
      continue;
    }
    if (std::find(keep.begin(), keep.end(), c) == keep.end()) keep.push_back(c);
  }
  r.conditions = std::move(keep);
  return r;
}

inline bool used_outside(const Rule& r, std::size_t skip, const std::string& v) {
  if (atom_has_var(r.head, v)) return true;
  for (const auto& c : r.conditions)
    if (c.lhs.is_var() && c.lhs.name == v) return true;
  for (std::size_t i = 0; i < r.body.size(); ++i) {
    if (i == skip) continue;
    if (atom_has_var(r.body[i], v)) return true;
  }
  return false;
}

inline void drop_dead_bindings(Rule& r) {
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      const Atom& b = r.body[i];
      if (!b.is_skolem_binding() || used_outside(r, i, b.terms[0].name)) continue;
      r.body.erase(r.body.begin() + static_cast<std::ptrdiff_t>(i));
      changed = true;
      break;
    }
  }
}

// Removes body atoms the rest of the body already implies: atom i goes when
// the whole body maps into body \ {i} fixing head and condition variables.
inline void minimize_body(Rule& r) {
  std::set<std::string> fixed;
  {
    std::vector<std::string> hv;
    collect_vars(r.head, hv);
    for (const auto& c : r.conditions) collect_vars(c.lhs, hv);
    fixed.insert(hv.begin(), hv.end());
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < r.body.size() && r.body.size() > 1; ++i) {
      std::vector<Atom> rest = r.body;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      if (find_match(r.body, rest, MatchMode::Homomorphism, {}, fixed)) {
        r.body = std::move(rest);
        changed = true;
        break;
      }
    }
  }
  // exact duplicates are covered above; keep body order stable otherwise
}

inline bool tautology(const Rule& r) {
  return r.existentials.empty() && std::find(r.body.begin(), r.body.end(), r.head) != r.body.end();
}

}  // namespace detail

// Cleans up rules produced by unfolding: merges bindings of one variable,
// drops rules that need two distinct Skolem functors (or a Skolem value equal
// to a constant) to coincide, deletes bindings of otherwise unused variables,
// removes implied body atoms and keeps one rule per isomorphism class.
inline std::vector<Rule> skolem_simplify(const std::vector<Rule>& rules) {
  std::vector<Rule> out;
  for (const auto& r0 : rules) {
    auto r = detail::merge_bindings(r0);
    if (!r) continue;
    r = detail::decide_conditions(std::move(*r));
    if (!r) continue;
    detail::drop_dead_bindings(*r);
    detail::minimize_body(*r);
    if (detail::tautology(*r)) continue;
    bool dup = std::any_of(out.begin(), out.end(), [&](const Rule& o) { return isomorphic(o, *r); });
    if (!dup) out.push_back(std::move(*r));
  }
  return out;
}

}  // namespace wforge::hje
