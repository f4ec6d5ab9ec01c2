#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wforge/analysis/affectedness.hpp"

namespace wforge::analysis {

struct CauseEdge {
  std::string rule;
  bool direct = false;

  friend bool operator==(const CauseEdge&, const CauseEdge&) = default;
};

// A body atom occurrence: (rule id, 0-based body index).
struct AtomRef {
  std::string rule;
  std::size_t atom = 0;

  friend bool operator==(const AtomRef&, const AtomRef&) = default;
  friend auto operator<=>(const AtomRef&, const AtomRef&) = default;
};

// Rules that can put a labeled null into one of `positions` (1-based) of
// `predicate`: Direct when the head slot is an existential of the rule,
// Indirect when it holds a variable whose body occurrences are all affected.
// Program order.
inline std::vector<CauseEdge> causes_for(const Program& p, const std::string& predicate,
                                         const std::set<std::size_t>& positions,
                                         const PositionSet& affected) {
  std::vector<CauseEdge> out;
  for (const auto& r : p.rules) {
    if (r.head.predicate != predicate) continue;
    bool direct = false, indirect = false;
    for (auto pos : positions) {
      if (pos == 0 || pos > r.head.terms.size()) continue;
      const Term& t = r.head.terms[pos - 1];
      if (!t.is_var()) continue;
      if (r.existentials.contains(t.name)) direct = true;
      else if (only_affected(r, t.name, affected)) indirect = true;
    }
    if (direct || indirect) out.push_back({r.id, direct});
  }
  return out;
}

// For an indirect cause, the body atoms that carry the propagated nulls on to
// the head slots in `positions`, with the slots they occupy.
struct PropagationSource {
  std::size_t atom = 0;
  std::set<std::size_t> positions;
};

inline std::vector<PropagationSource> propagation_sources(const Rule& cause,
                                                          const std::set<std::size_t>& positions,
                                                          const PositionSet& affected) {
  std::vector<std::string> carried;
  for (auto pos : positions) {
    if (pos == 0 || pos > cause.head.terms.size()) continue;
    const Term& t = cause.head.terms[pos - 1];
    if (t.is_var() && !cause.existentials.contains(t.name) && only_affected(cause, t.name, affected) &&
        !contains(carried, t.name))
      carried.push_back(t.name);
  }
  std::vector<PropagationSource> out;
  for (std::size_t i = 0; i < cause.body.size(); ++i) {
    const Atom& a = cause.body[i];
    if (a.is_skolem_binding()) continue;
    PropagationSource src{i, {}};
    for (std::size_t k = 0; k < a.terms.size(); ++k)
      if (a.terms[k].is_var() && contains(carried, a.terms[k].name)) src.positions.insert(k + 1);
    if (!src.positions.empty()) out.push_back(std::move(src));
  }
  return out;
}

// Slots of `atom` holding any of `vars` that are affected.
inline std::set<std::size_t> tracked_positions(const Atom& atom, const std::vector<std::string>& vars,
                                               const PositionSet& affected) {
  std::set<std::size_t> out;
  if (atom.is_skolem_binding()) return out;
  for (std::size_t k = 0; k < atom.terms.size(); ++k) {
    const Term& t = atom.terms[k];
    if (t.is_var() && contains(vars, t.name) && affected.contains(Position{atom.predicate, k + 1}))
      out.insert(k + 1);
  }
  return out;
}

struct CauseGraph {
  // immediate causes of every atom occurrence reached backwards from a harmful join
  std::map<AtomRef, std::vector<CauseEdge>> edges;
  // Γ_A: transitive causes for each join atom of each harmful join rule
  std::map<AtomRef, std::set<std::string>> gamma;
};

inline CauseGraph cause_graph(const Program& p, const PositionSet& affected) {
  CauseGraph g;
  struct Item {
    AtomRef ref;
    std::string predicate;
    std::set<std::size_t> positions;
  };
  std::map<AtomRef, std::set<std::size_t>> seen;

  auto expand = [&](const Item& start) {
    std::set<std::string> closure;
    std::deque<Item> work{start};
    std::set<std::pair<AtomRef, std::set<std::size_t>>> local;
    while (!work.empty()) {
      Item it = work.front();
      work.pop_front();
      if (!local.insert({it.ref, it.positions}).second) continue;
      auto cs = causes_for(p, it.predicate, it.positions, affected);
      auto& edges = g.edges[it.ref];
      for (const auto& c : cs)
        if (std::find(edges.begin(), edges.end(), c) == edges.end()) edges.push_back(c);
      seen[it.ref].insert(it.positions.begin(), it.positions.end());
      for (const auto& c : cs) {
        closure.insert(c.rule);
        if (c.direct) continue;
        const Rule& cause = *p.find_rule(c.rule);
        for (const auto& src : propagation_sources(cause, it.positions, affected))
          work.push_back(Item{{cause.id, src.atom}, cause.body[src.atom].predicate, src.positions});
      }
    }
    return closure;
  };

  for (const auto& r : p.rules) {
    auto join_vars = harmful_join_vars(r, affected);
    if (join_vars.empty()) continue;
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      auto pos = tracked_positions(r.body[i], join_vars, affected);
      if (pos.empty()) continue;
      g.gamma[{r.id, i}] = expand(Item{{r.id, i}, r.body[i].predicate, pos});
    }
  }
  return g;
}

inline CauseGraph cause_graph(const Program& p) { return cause_graph(p, affected_positions(p)); }

// One root-to-leaf combination of causes for a harmful join rule, in the order
// the HU-tree applies them (join atoms left to right, each chased depth-first
// down to a direct cause). A chain revisiting a rule id is cut after the revisit.
struct GammaCandidate {
  std::vector<std::string> sequence;

  std::size_t dh() const noexcept { return sequence.size(); }
  // Γ as a sorted multiset.
  std::vector<std::string> multiset() const {
    auto m = sequence;
    std::sort(m.begin(), m.end());
    return m;
  }
};

struct DhMdh {
  std::vector<GammaCandidate> candidates;
  std::size_t mdh = 0;
};

namespace detail {

struct PendingAtom {
  std::string predicate;
  std::set<std::size_t> positions;
  std::vector<std::string> chain;  // causes already applied on this atom's path
};

inline void enumerate_gamma(const Program& p, const PositionSet& affected, std::deque<PendingAtom> pending,
                            std::vector<std::string>& sequence, std::vector<GammaCandidate>& out,
                            std::size_t limit) {
  if (out.size() >= limit) throw NonTerminating("more than " + std::to_string(limit) + " Γ candidates");
  if (pending.empty()) {
    out.push_back(GammaCandidate{sequence});
    return;
  }
  PendingAtom item = std::move(pending.front());
  pending.pop_front();
  auto cs = causes_for(p, item.predicate, item.positions, affected);
  if (cs.empty()) {
    enumerate_gamma(p, affected, pending, sequence, out, limit);
    return;
  }
  for (const auto& c : cs) {
    sequence.push_back(c.rule);
    const bool revisit = contains(item.chain, c.rule);
    if (c.direct || revisit) {
      enumerate_gamma(p, affected, pending, sequence, out, limit);
    } else {
      const Rule& cause = *p.find_rule(c.rule);
      auto next = pending;
      auto srcs = propagation_sources(cause, item.positions, affected);
      auto chain = item.chain;
      chain.push_back(c.rule);
      for (auto it = srcs.rbegin(); it != srcs.rend(); ++it)
        next.push_front(PendingAtom{cause.body[it->atom].predicate, it->positions, chain});
      enumerate_gamma(p, affected, std::move(next), sequence, out, limit);
    }
    sequence.pop_back();
  }
}

}  // namespace detail

// Enumerates every Γ candidate of `rule` and the maximum distance from
// harmlessness. Throws NotHarmfulJoin when the rule has no harmful join.
inline DhMdh dh_mdh(const Program& p, const Rule& rule, const PositionSet& affected,
                    std::size_t limit = 1'000'000) {
  auto join_vars = harmful_join_vars(rule, affected);
  if (join_vars.empty()) throw NotHarmfulJoin("rule " + rule.id + " has no harmful join");
  std::deque<detail::PendingAtom> pending;
  for (const auto& a : rule.body) {
    auto pos = tracked_positions(a, join_vars, affected);
    if (!pos.empty()) pending.push_back({a.predicate, pos, {}});
  }
  DhMdh res;
  std::vector<std::string> seq;
  detail::enumerate_gamma(p, affected, std::move(pending), seq, res.candidates, limit);
  for (const auto& c : res.candidates) res.mdh = std::max(res.mdh, c.dh());
  return res;
}

inline DhMdh dh_mdh(const Program& p, const Rule& rule) { return dh_mdh(p, rule, affected_positions(p)); }

}  // namespace wforge::analysis
