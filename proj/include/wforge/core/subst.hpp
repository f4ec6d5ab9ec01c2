#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wforge/core/model.hpp"

namespace wforge {

// Variable name -> term. Bindings may chain; resolve() follows them.
using Subst = std::map<std::string, Term>;

inline Term resolve(const Term& t, const Subst& s) {
  if (t.is_var()) {
    auto it = s.find(t.name);
    if (it != s.end()) return resolve(it->second, s);
    return t;
  }
  if (t.is_skolem()) {
    Term out = t;
    for (auto& a : out.args) a = resolve(a, s);
    return out;
  }
  return t;
}

inline Atom substitute(const Atom& a, const Subst& s) {
  Atom out{a.predicate, {}};
  out.terms.reserve(a.terms.size());
  for (const auto& t : a.terms) out.terms.push_back(resolve(t, s));
  return out;
}

inline Condition substitute(const Condition& c, const Subst& s) {
  return Condition{resolve(c.lhs, s), c.op, c.constant};
}

// Applies s to every part of the rule. Existentials follow variable renamings;
// an existential bound to a non-variable term is dropped from the set.
inline Rule substitute(const Rule& r, const Subst& s) {
  Rule out;
  out.id = r.id;
  for (const auto& a : r.body) out.body.push_back(substitute(a, s));
  out.head = substitute(r.head, s);
  for (const auto& e : r.existentials) {
    Term t = resolve(Term::var(e), s);
    if (t.is_var()) out.existentials.insert(t.name);
  }
  for (const auto& c : r.conditions) out.conditions.push_back(substitute(c, s));
  return out;
}

// One-shot application for match substitutions, whose domain and range may
// share names (X->Y, Y->X): no chains are followed.
inline Term instantiate(const Term& t, const Subst& s) {
  if (t.is_var()) {
    auto it = s.find(t.name);
    return it == s.end() ? t : it->second;
  }
  if (t.is_skolem()) {
    Term out = t;
    for (auto& a : out.args) a = instantiate(a, s);
    return out;
  }
  return t;
}

inline Atom instantiate(const Atom& a, const Subst& s) {
  Atom out{a.predicate, {}};
  for (const auto& t : a.terms) out.terms.push_back(instantiate(t, s));
  return out;
}

inline Condition instantiate(const Condition& c, const Subst& s) {
  return Condition{instantiate(c.lhs, s), c.op, c.constant};
}

namespace detail {

inline bool occurs(const std::string& var, const Term& t, const Subst& s) {
  Term r = resolve(t, s);
  if (r.is_var()) return r.name == var;
  if (r.is_skolem())
    for (const auto& a : r.args)
      if (occurs(var, a, s)) return true;
  return false;
}

}  // namespace detail

// Extends s to a unifier of a and b. When both sides are variables the left one
// is bound to the right one, so callers put the side to be renamed on the left.
inline bool unify(const Term& a, const Term& b, Subst& s) {
  Term x = resolve(a, s);
  Term y = resolve(b, s);
  if (x == y) return true;
  if (x.is_var()) {
    if (detail::occurs(x.name, y, s)) return false;
    s[x.name] = y;
    return true;
  }
  if (y.is_var()) {
    if (detail::occurs(y.name, x, s)) return false;
    s[y.name] = x;
    return true;
  }
  if (x.is_skolem() && y.is_skolem()) {
    if (x.name != y.name || x.args.size() != y.args.size()) return false;
    for (std::size_t i = 0; i < x.args.size(); ++i)
      if (!unify(x.args[i], y.args[i], s)) return false;
    return true;
  }
  return false;
}

inline bool unify(const Atom& a, const Atom& b, Subst& s) {
  if (a.predicate != b.predicate || a.terms.size() != b.terms.size()) return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i)
    if (!unify(a.terms[i], b.terms[i], s)) return false;
  return true;
}

// Fully resolved copy of s (no chains), restricted to its own domain.
inline Subst flatten(const Subst& s) {
  Subst out;
  for (const auto& [k, v] : s) out[k] = resolve(v, s);
  return out;
}

// Renames every variable of r with `prefix` + counter, skipping names in `avoid`.
inline Rule rename_apart(const Rule& r, const std::vector<std::string>& avoid, std::size_t& counter,
                         const std::string& prefix = "U") {
  Subst s;
  const auto own = rule_vars(r);
  for (const auto& v : own) {
    std::string fresh;
    do {
      fresh = prefix + std::to_string(counter++);
    } while (contains(avoid, fresh) || contains(own, fresh));
    s[v] = Term::var(fresh);
  }
  return substitute(r, s);
}

// Canonical variable naming V0, V1, ... in first-occurrence order (body,
// conditions, head). Idempotent; the rule id is left untouched.
inline Rule canonical(const Rule& r) {
  Subst s;
  std::size_t n = 0;
  for (const auto& v : rule_vars(r)) s[v] = Term::var("V" + std::to_string(n++));
  // two-phase to avoid clashes between old and new names
  Subst tmp, back;
  std::size_t k = 0;
  for (const auto& [old, target] : s) {
    std::string mid = "\x01" + std::to_string(k++);
    tmp[old] = Term::var(mid);
    back[mid] = target;
  }
  return substitute(substitute(r, tmp), back);
}

// Equality modulo canonical variable renaming (ids ignored).
inline bool same_rule(const Rule& a, const Rule& b) {
  Rule x = canonical(a), y = canonical(b);
  x.id.clear();
  y.id.clear();
  return x == y;
}

}  // namespace wforge
