#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wforge/core.hpp"

namespace wforge::hje {

struct UnfoldResult {
  Rule rule;
  Subst mgu;  // rule variable -> its image, only for variables that changed
};

namespace detail {

inline bool term_mentions(const Term& t, const std::string& var) {
  std::vector<std::string> vs;
  collect_vars(t, vs);
  return contains(vs, var);
}

}  // namespace detail

// Resolution of rule.body[atom_idx] against cause's head. Cause existentials
// that meet a rule variable y become a binding `y = sk_<cause>_<z>(frontier)`
// appended to the body. `counter` feeds fresh variable names.
inline UnfoldResult unfold_step(const Rule& rule, std::size_t atom_idx, const Rule& cause,
                                std::size_t& counter) {
  if (atom_idx >= rule.body.size()) throw InvalidProgram("atom index out of range in " + rule.id);
  const Atom& target = rule.body[atom_idx];
  if (target.is_skolem_binding() || cause.head.predicate != target.predicate ||
      cause.head.arity() != target.arity())
    throw PredicateMismatch("cannot unfold " + target.predicate + " in " + rule.id + " with " + cause.id +
                            " (head " + cause.head.predicate + ")");

  const auto rvars = rule_vars(rule);
  Rule c = rename_apart(cause, rvars, counter);
  // original names of the cause's existentials, by position in rule_vars order
  std::map<std::string, std::string> original;
  {
    auto before = rule_vars(cause), after = rule_vars(c);
    for (std::size_t i = 0; i < before.size(); ++i) original[after[i]] = before[i];
  }

  Subst s;
  if (!unify(c.head, target, s))
    throw NonUnifiable("head of " + cause.id + " does not unify with " + print(target) + " in " + rule.id);

  std::vector<Atom> bindings;
  std::set<std::string> bound;
  for (const auto& z : c.existentials) {
    Term img = resolve(Term::var(z), s);
    if (!img.is_var() || !contains(rvars, img.name))
      throw NonUnifiable("existential of " + cause.id + " meets " + print(img) + " in " + rule.id);
    if (!bound.insert(img.name).second)
      throw NonUnifiable("two existentials of " + cause.id + " meet " + img.name + " in " + rule.id);
    std::vector<Term> args;
    for (const auto& f : frontier(c)) {
      Term a = resolve(Term::var(f), s);
      if (detail::term_mentions(a, img.name))
        throw NonUnifiable("fresh null of " + cause.id + " would equal its own frontier in " + rule.id);
      args.push_back(a);
    }
    bindings.push_back(skolem_binding(img.name, skolem_functor(cause.id, original.at(z)), std::move(args)));
  }

  Rule out;
  out.id = rule.id;
  for (std::size_t i = 0; i < rule.body.size(); ++i) {
    if (i == atom_idx) {
      for (const auto& a : c.body) out.body.push_back(substitute(a, s));
    } else {
      out.body.push_back(substitute(rule.body[i], s));
    }
  }
  for (auto& b : bindings) out.body.push_back(substitute(b, s));
  out.head = substitute(rule.head, s);
  for (const auto& e : rule.existentials) {
    Term t = resolve(Term::var(e), s);
    if (t.is_var()) out.existentials.insert(t.name);
  }
  for (const auto& cond : rule.conditions) out.conditions.push_back(substitute(cond, s));
  for (const auto& cond : c.conditions) out.conditions.push_back(substitute(cond, s));

  UnfoldResult res{std::move(out), {}};
  for (const auto& v : rvars) {
    Term t = resolve(Term::var(v), s);
    if (!(t.is_var() && t.name == v)) res.mgu[v] = t;
  }
  return res;
}

inline Rule unfold(const Rule& rule, std::size_t atom_idx, const Rule& cause) {
  std::size_t counter = 0;
  return unfold_step(rule, atom_idx, cause, counter).rule;
}

// A way of seeing ancestor.body inside rule.body.
struct FoldMatch {
  Subst theta;                     // ancestor variable -> rule variable (injective)
  std::vector<std::size_t> matched;  // rule body indices covered by the image
  std::vector<Atom> residual;
  std::vector<Condition> residual_conditions;
};

// Subset isomorphism of ancestor.body into rule.body extending `pre`, with the
// ancestor's conditions required among the rule's. `keep_out` variables must
// not occur in the residual part.
inline std::optional<FoldMatch> find_fold(const Rule& rule, const Rule& ancestor, const Subst& pre = {},
                                          const std::vector<std::string>& keep_out = {}) {
  if (ancestor.body.size() > rule.body.size()) return std::nullopt;
  std::optional<FoldMatch> found;
  for_each_match(ancestor.body, rule.body, MatchMode::Isomorphic, pre,
                 [&](const Subst& s, const std::vector<std::size_t>& chosen) {
                   FoldMatch m;
                   m.theta = s;
                   std::vector<bool> used(rule.body.size(), false);
                   for (auto j : chosen) used[j] = true;
                   for (std::size_t j = 0; j < rule.body.size(); ++j) {
                     if (used[j]) m.matched.push_back(j);
                     else m.residual.push_back(rule.body[j]);
                   }
                   std::vector<Condition> rest = rule.conditions;
                   for (const auto& c : ancestor.conditions) {
                     Condition img = instantiate(c, s);
                     auto it = std::find(rest.begin(), rest.end(), img);
                     if (it == rest.end()) return false;
                     rest.erase(it);
                   }
                   m.residual_conditions = rest;
                   for (const auto& v : keep_out) {
                     for (const auto& a : m.residual)
                       if (atom_has_var(a, v)) return false;
                     for (const auto& c : m.residual_conditions)
                       if (detail::term_mentions(c.lhs, v)) return false;
                   }
                   found = std::move(m);
                   return true;
                 });
  return found;
}

// If a subset of rule.body is a renaming of ancestor.body, that subset is
// replaced by the ancestor's head under the same renaming.
inline std::optional<Rule> fold(const Rule& rule, const Rule& ancestor) {
  auto m = find_fold(rule, ancestor);
  if (!m) return std::nullopt;
  Rule out;
  out.id = rule.id;
  out.head = rule.head;
  out.existentials = rule.existentials;
  out.body.push_back(instantiate(ancestor.head, m->theta));
  for (auto& a : m->residual) out.body.push_back(a);
  out.conditions = m->residual_conditions;
  return out;
}

}  // namespace wforge::hje
