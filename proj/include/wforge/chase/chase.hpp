#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wforge/chase/instance.hpp"

namespace wforge::chase {

using Env = std::map<std::string, Term>;

// Value an existential rule gave its existential for one frontier tuple:
// the minted null, or the witness that blocked it.
using SkolemTable = std::map<std::pair<std::string, std::vector<Term>>, Term>;

struct ChaseResult {
  ChaseInstance instance;
  bool completed = false;
  std::size_t fired = 0;
};

namespace detail {

inline bool bind(const Term& pattern, const Term& value, Env& env, std::vector<std::string>& added) {
  if (pattern.is_var()) {
    auto it = env.find(pattern.name);
    if (it != env.end()) return it->second == value;
    env.emplace(pattern.name, value);
    added.push_back(pattern.name);
    return true;
  }
  return pattern == value;
}

inline Term ground(const Term& t, const Env& env) {
  if (t.is_var()) {
    auto it = env.find(t.name);
    return it == env.end() ? t : it->second;
  }
  return t;
}

inline bool all_bound(const Atom& binding, const Env& env) {
  std::vector<std::string> vs;
  collect_vars(binding.terms[1], vs);
  for (const auto& v : vs)
    if (!env.contains(v)) return false;
  return true;
}

inline bool condition_holds(const Condition& c, const Env& env) {
  Term v = ground(c.lhs, env);
  if (!v.is_constant()) return false;  // nulls satisfy no comparison
  return compare_values(v.name, c.op, c.constant);
}

class BodyMatcher {
 public:
  BodyMatcher(const Rule& r, const ChaseInstance& inst, const SkolemTable& sk) : r_(r), inst_(inst), sk_(sk) {
    for (std::size_t i = 0; i < r.body.size(); ++i)
      (r.body[i].is_skolem_binding() ? bindings_ : atoms_).push_back(i);
  }

  void run(const std::function<void(const Env&)>& out) {
    Env env;
    std::vector<bool> done(bindings_.size(), false);
    step(0, env, done, out);
  }

 private:
  void step(std::size_t i, Env& env, std::vector<bool>& done, const std::function<void(const Env&)>& out) {
    // evaluate any binding whose Skolem arguments are known
    for (std::size_t b = 0; b < bindings_.size(); ++b) {
      if (done[b]) continue;
      const Atom& a = r_.body[bindings_[b]];
      if (!all_bound(a, env)) continue;
      std::vector<Term> args;
      for (const auto& t : a.terms[1].args) args.push_back(ground(t, env));
      auto it = sk_.find({a.terms[1].name, args});
      if (it == sk_.end()) return;
      std::vector<std::string> added;
      if (!bind(a.terms[0], it->second, env, added)) return;
      done[b] = true;
      step(i, env, done, out);
      done[b] = false;
      for (const auto& v : added) env.erase(v);
      return;
    }
    if (i == atoms_.size()) {
      for (bool d : done)
        if (!d) return;
      for (const auto& c : r_.conditions)
        if (!condition_holds(c, env)) return;
      out(env);
      return;
    }
    const Atom& a = r_.body[atoms_[i]];
    for (const auto& tuple : inst_.relation(a.predicate)) {
      if (tuple.size() != a.terms.size()) continue;
      std::vector<std::string> added;
      bool ok = true;
      for (std::size_t k = 0; k < tuple.size() && ok; ++k) ok = bind(a.terms[k], tuple[k], env, added);
      if (ok) step(i + 1, env, done, out);
      for (const auto& v : added) env.erase(v);
    }
  }

  const Rule& r_;
  const ChaseInstance& inst_;
  const SkolemTable& sk_;
  std::vector<std::size_t> atoms_, bindings_;
};

// Extension of env to the head's existentials that lands on an existing fact.
inline std::optional<Env> head_witness(const Rule& r, const Env& env, const ChaseInstance& inst) {
  for (const auto& tuple : inst.relation(r.head.predicate)) {
    if (tuple.size() != r.head.terms.size()) continue;
    Env e = env;
    std::vector<std::string> added;
    bool ok = true;
    for (std::size_t k = 0; k < tuple.size() && ok; ++k) ok = bind(r.head.terms[k], tuple[k], e, added);
    if (ok) return e;
  }
  return std::nullopt;
}

}  // namespace detail

// Restricted chase, round-robin over rules in program order. A trigger fires
// only if no extension of its head is already present; existentials get fresh
// labeled nulls. Stops after step_bound firings (completed = false).
inline ChaseResult run_chase(const Program& p, ChaseInstance inst, std::size_t step_bound = 10'000) {
  ChaseResult res;
  SkolemTable sk;
  std::vector<std::vector<std::string>> fronts;
  for (const auto& r : p.rules) fronts.push_back(frontier(r));

  for (;;) {
    bool progress = false;
    for (std::size_t ri = 0; ri < p.rules.size(); ++ri) {
      const Rule& r = p.rules[ri];
      std::vector<Env> triggers;
      detail::BodyMatcher(r, inst, sk).run([&](const Env& e) { triggers.push_back(e); });
      for (const auto& env : triggers) {
        std::vector<Term> fvals;
        for (const auto& v : fronts[ri]) fvals.push_back(env.at(v));
        if (auto w = detail::head_witness(r, env, inst)) {
          for (const auto& z : r.existentials)
            if (sk.emplace(std::make_pair(skolem_functor(r.id, z), fvals), w->at(z)).second) progress = true;
          continue;
        }
        if (res.fired == step_bound) {
          res.instance = std::move(inst);
          return res;
        }
        Env full = env;
        for (const auto& z : r.existentials) {
          Term n = inst.fresh_null();
          full[z] = n;
          sk.emplace(std::make_pair(skolem_functor(r.id, z), fvals), n);
        }
        Fact f{r.head.predicate, {}};
        for (const auto& t : r.head.terms) f.terms.push_back(detail::ground(t, full));
        ChaseStep s{r.id, {}, f};
        for (const auto& [k, v] : full) s.substitution.emplace_back(k, v);
        inst.steps.push_back(std::move(s));
        inst.add(std::move(f));
        ++res.fired;
        progress = true;
      }
    }
    if (!progress) break;
  }
  res.completed = true;
  res.instance = std::move(inst);
  return res;
}

// EDB facts plus dom, then the chase.
inline ChaseResult chase(const Program& p, const ChaseInstance& edb, std::size_t step_bound = 10'000) {
  ChaseInstance inst = edb;
  materialize_dom(p, inst);
  return run_chase(p, std::move(inst), step_bound);
}

}  // namespace wforge::chase
