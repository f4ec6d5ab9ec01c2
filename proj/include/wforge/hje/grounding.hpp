#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "wforge/analysis/affectedness.hpp"
#include "wforge/core.hpp"

namespace wforge::hje {

// Fresh predicate names `<base>__<tag><k>` and rule ids, never colliding with
// anything already in the program. One counter per tag, deterministic.
class FreshNames {
 public:
  FreshNames() = default;
  explicit FreshNames(const Program& p) {
    for (const auto& r : p.rules) {
      ids_.insert(r.id);
      preds_.insert(r.head.predicate);
      for (const auto& a : r.body) preds_.insert(a.predicate);
    }
    for (const auto& [pred, ann] : p.annotations) preds_.insert(pred);
  }

  std::string predicate(const std::string& base, const std::string& tag) {
    auto& k = counters_[tag];
    std::string name;
    do {
      name = base + "__" + tag + std::to_string(++k);
    } while (preds_.contains(name));
    preds_.insert(name);
    return name;
  }

  std::string rule_id(const std::string& base) {
    if (ids_.insert(base).second) return base;
    for (std::size_t k = 2;; ++k) {
      std::string id = base + "_" + std::to_string(k);
      if (ids_.insert(id).second) return id;
    }
  }

 private:
  std::set<std::string> ids_;
  std::set<std::string> preds_;
  std::map<std::string, std::size_t> counters_;
};

// Rewrites a harmful join over the active domain. For the first join atom A
// holding join variables h:
//   A'(args) :- dom(h), A(args).
//   A(args)  :- A'(args).
//   head     :- A'(args), <rest of the body>.
// If the last rule still has a harmful join (variables A does not hold), the
// next join atom is grounded the same way. Always at least three rules.
inline std::vector<Rule> grounding(const Rule& rule, const analysis::PositionSet& affected, FreshNames& names) {
  auto join = analysis::harmful_join_vars(rule, affected);
  if (join.empty()) throw NotHarmfulJoin("rule " + rule.id + " has no harmful join");
  std::vector<Rule> out;
  analysis::PositionSet aff = affected;
  Rule cur = rule;
  int step = 0;
  while (!join.empty()) {
    std::size_t ai = cur.body.size();
    std::vector<std::string> h;
    for (std::size_t i = 0; i < cur.body.size() && ai == cur.body.size(); ++i) {
      if (cur.body[i].is_skolem_binding()) continue;
      for (const auto& v : join)
        if (atom_has_var(cur.body[i], v)) h.push_back(v);
      if (!h.empty()) ai = i;
    }
    const Atom a = cur.body[ai];
    std::string prime = names.predicate(a.predicate, "g");
    Atom ap{prime, a.terms};
    Atom dom{dom_predicate(h.size()), {}};
    for (const auto& v : h) dom.terms.push_back(Term::var(v));
    for (std::size_t k = 0; k < a.terms.size(); ++k) {
      const Term& t = a.terms[k];
      bool in_dom = t.is_var() && contains(h, t.name);
      if (!in_dom && aff.contains(analysis::Position{a.predicate, k + 1})) aff.insert({prime, k + 1});
    }
    std::string tag = step == 0 ? "" : std::to_string(step);
    Rule r1{names.rule_id(rule.id + "_g" + tag + "a"), {dom, a}, ap, {}, {}};
    Rule r2{names.rule_id(rule.id + "_g" + tag + "b"), {ap}, a, {}, {}};
    out.push_back(std::move(r1));
    out.push_back(std::move(r2));
    cur.body[ai] = ap;
    join = analysis::harmful_join_vars(cur, aff);
    ++step;
  }
  cur.id = names.rule_id(rule.id + "_gc");
  out.push_back(std::move(cur));
  return out;
}

}  // namespace wforge::hje
