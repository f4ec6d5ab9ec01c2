#pragma once

#include <algorithm>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wforge/chase/chase.hpp"

namespace wforge::chase {

enum class Verdict { Equal, NotEqual, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Equal: return "Equal";
    case Verdict::NotEqual: return "NotEqual";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct EquivalenceResult {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Fact> witness;  // a fact of one side with no image in the other
  std::string detail;
  std::size_t left_facts = 0;
  std::size_t right_facts = 0;
};

namespace detail {

inline bool has_null(const Fact& f) {
  return std::any_of(f.terms.begin(), f.terms.end(), [](const Term& t) { return t.is_null(); });
}

// Maps the nulls of `facts` (a null-connected group) into `target`.
inline bool map_component(const std::vector<Fact>& facts, std::size_t i, std::map<std::uint64_t, Term>& h,
                          const ChaseInstance& target) {
  if (i == facts.size()) return true;
  const Fact& f = facts[i];
  for (const auto& tuple : target.relation(f.predicate)) {
    if (tuple.size() != f.terms.size()) continue;
    std::vector<std::uint64_t> added;
    bool ok = true;
    for (std::size_t k = 0; k < tuple.size() && ok; ++k) {
      const Term& t = f.terms[k];
      if (!t.is_null()) {
        ok = t == tuple[k];
        continue;
      }
      auto it = h.find(t.null_id);
      if (it != h.end()) {
        ok = it->second == tuple[k];
      } else {
        h.emplace(t.null_id, tuple[k]);
        added.push_back(t.null_id);
      }
    }
    if (ok && map_component(facts, i + 1, h, target)) return true;
    for (auto n : added) h.erase(n);
  }
  return false;
}

}  // namespace detail

// Homomorphism from the facts of `from` over `preds` into `to`, constants fixed.
// Returns the first fact that cannot be mapped, or nullopt on success.
inline std::optional<Fact> homomorphism_gap(const ChaseInstance& from, const ChaseInstance& to,
                                            const std::set<std::string>& preds) {
  std::vector<Fact> with_nulls;
  for (const auto& f : from.facts) {
    if (!preds.contains(f.predicate)) continue;
    if (!detail::has_null(f)) {
      if (!to.contains(f)) return f;
      continue;
    }
    with_nulls.push_back(f);
  }
  // null-connected components via union-find over null ids
  std::map<std::uint64_t, std::uint64_t> parent;
  std::function<std::uint64_t(std::uint64_t)> find = [&](std::uint64_t x) {
    auto it = parent.find(x);
    if (it == parent.end() || it->second == x) return parent[x] = x;
    return it->second = find(it->second);
  };
  for (const auto& f : with_nulls) {
    std::optional<std::uint64_t> first;
    for (const auto& t : f.terms)
      if (t.is_null()) {
        if (!first) first = find(t.null_id);
        else parent[find(t.null_id)] = *first;
      }
  }
  std::map<std::uint64_t, std::vector<Fact>> comps;
  for (const auto& f : with_nulls)
    for (const auto& t : f.terms)
      if (t.is_null()) {
        comps[find(t.null_id)].push_back(f);
        break;
      }
  for (auto& [root, facts] : comps) {
    // most constrained first: fewer candidate tuples
    std::stable_sort(facts.begin(), facts.end(), [&](const Fact& a, const Fact& b) {
      return to.count(a.predicate) < to.count(b.predicate);
    });
    std::map<std::uint64_t, Term> h;
    if (!detail::map_component(facts, 0, h, to)) return facts.front();
  }
  return std::nullopt;
}

// Predicates compared: @output ones of either program, else head predicates
// both programs share.
inline std::set<std::string> compared_predicates(const Program& a, const Program& b) {
  std::set<std::string> out;
  for (const auto* p : {&a, &b})
    for (const auto& [pred, ann] : p->annotations)
      if (ann.output) out.insert(pred);
  if (!out.empty()) return out;
  auto ha = head_predicates(a), hb = head_predicates(b);
  std::set_intersection(ha.begin(), ha.end(), hb.begin(), hb.end(), std::inserter(out, out.end()));
  return out;
}

inline EquivalenceResult compare_on(const Program& p1, const Program& p2, const ChaseInstance& db,
                                    std::size_t step_bound = 10'000) {
  EquivalenceResult res;
  auto c1 = chase(p1, db, step_bound);
  auto c2 = chase(p2, db, step_bound);
  auto preds = compared_predicates(p1, p2);
  for (const auto& f : c1.instance.facts) res.left_facts += preds.contains(f.predicate);
  for (const auto& f : c2.instance.facts) res.right_facts += preds.contains(f.predicate);
  if (!c1.completed || !c2.completed) {
    res.verdict = Verdict::Inconclusive;
    res.detail = std::string("step bound reached by ") + (!c1.completed ? "left" : "right") + " chase";
    return res;
  }
  if (auto gap = homomorphism_gap(c1.instance, c2.instance, preds)) {
    res.verdict = Verdict::NotEqual;
    res.witness = gap;
    res.detail = "left fact without image on the right: " + print(*gap);
    return res;
  }
  if (auto gap = homomorphism_gap(c2.instance, c1.instance, preds)) {
    res.verdict = Verdict::NotEqual;
    res.witness = gap;
    res.detail = "right fact without image on the left: " + print(*gap);
    return res;
  }
  res.verdict = Verdict::Equal;
  return res;
}

inline std::vector<EquivalenceResult> equivalent(const Program& p1, const Program& p2,
                                                 const std::vector<ChaseInstance>& databases,
                                                 std::size_t step_bound = 10'000) {
  std::vector<EquivalenceResult> out;
  for (const auto& db : databases) out.push_back(compare_on(p1, p2, db, step_bound));
  return out;
}

// `n` random databases for the EDB predicates of p (seeded, reproducible).
inline std::vector<ChaseInstance> random_databases(const Program& p, std::size_t n, std::uint64_t seed,
                                                   std::size_t max_constants = 6, std::size_t max_facts = 20) {
  std::mt19937_64 rng(seed);
  std::vector<ChaseInstance> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_database(p, rng, max_constants, max_facts));
  return out;
}

}  // namespace wforge::chase
