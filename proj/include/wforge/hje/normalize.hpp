#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wforge/analysis/affectedness.hpp"
#include "wforge/hje/grounding.hpp"
#include "wforge/hje/simplify.hpp"
#include "wforge/hje/tree.hpp"

namespace wforge::hje {

struct NormalizationTrace {
  std::vector<HUTree> trees;  // every tree built, before Recognition
  std::size_t num_nodes = 0;
  std::size_t num_folds = 0;
  std::size_t rounds = 0;
  std::vector<std::string> log;
};

// Trees whose roots are the same rule up to renaming; merged[i] is the index
// of the tree kept for tree i (itself when kept).
inline std::vector<std::size_t> recognition(const std::vector<HUTree>& trees) {
  std::vector<std::size_t> merged(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) {
    merged[i] = i;
    for (std::size_t j = 0; j < i; ++j)
      if (merged[j] == j && isomorphic(trees[j].root, trees[i].root)) {
        merged[i] = j;
        break;
      }
  }
  return merged;
}

namespace detail {

struct FoldTarget {
  std::string predicate;
  std::vector<std::string> args;
};

inline Atom conclusion(const HUTree& t, const std::map<int, FoldTarget>& targets, int x) {
  for (int a = t.nodes[static_cast<std::size_t>(x)].parent; a != -1; a = t.nodes[static_cast<std::size_t>(a)].parent) {
    auto it = targets.find(a);
    if (it == targets.end()) continue;
    Atom out{it->second.predicate, {}};
    for (const auto& v : it->second.args) out.terms.push_back(walk(t, a, x, Term::var(v)));
    return out;
  }
  return t.nodes[static_cast<std::size_t>(x)].rule.head;
}

inline void check_safe(const Rule& r) {
  auto bv = body_vars(r);
  std::vector<std::string> hv;
  collect_vars(r.head, hv);
  for (const auto& v : hv)
    if (!contains(bv, v) && !r.existentials.contains(v))
      throw InvalidProgram("normalization produced unsafe rule " + print(r));
}

}  // namespace detail

// Rules that replace a tree's root. Leaves conclude the root head. A node that
// some descendant folded into gets a definition predicate N over its
// non-join variables: the subtree below concludes N, the folded descendant
// becomes `N(theta args), residual -> ...`, and `N(args) -> conclusion` bridges
// back up.
inline std::vector<Rule> tree_rules(const HUTree& t, FreshNames& names) {
  std::map<int, detail::FoldTarget> targets;
  for (const auto& [child, anc] : t.fold_edges) {
    if (targets.contains(anc)) continue;
    const HUNode& a = t.nodes[static_cast<std::size_t>(anc)];
    targets[anc] = {names.predicate(t.root.head.predicate, "f"), detail::fold_args(a)};
  }
  std::vector<Rule> out;
  std::size_t nl = 0, nf = 0, nb = 0;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const HUNode& n = t.nodes[i];
    int id = static_cast<int>(i);
    if (auto it = targets.find(id); it != targets.end()) {
      Atom def{it->second.predicate, {}};
      for (const auto& v : it->second.args) def.terms.push_back(Term::var(v));
      Rule r{names.rule_id(t.root.id + "_b" + std::to_string(++nb)), {def}, detail::conclusion(t, targets, id), {}, {}};
      if (id == 0) r.existentials = t.root.existentials;
      out.push_back(std::move(r));
    }
    if (n.leaf) {
      Rule r{names.rule_id(t.root.id + "_l" + std::to_string(++nl)), n.rule.body, detail::conclusion(t, targets, id),
             {}, n.rule.conditions};
      if (detail::conclusion(t, targets, id) == t.nodes[i].rule.head) r.existentials = n.rule.existentials;
      out.push_back(std::move(r));
    }
    if (n.fold_to >= 0) {
      const auto& tg = targets.at(n.fold_to);
      Atom def{tg.predicate, {}};
      for (const auto& v : tg.args) def.terms.push_back(instantiate(Term::var(v), n.fold.theta));
      Rule r{names.rule_id(t.root.id + "_f" + std::to_string(++nf)), {def}, detail::conclusion(t, targets, id), {},
             n.fold.residual_conditions};
      for (const auto& a : n.fold.residual) r.body.push_back(a);
      if (detail::conclusion(t, targets, id) == n.rule.head) r.existentials = n.rule.existentials;
      out.push_back(std::move(r));
    }
  }
  for (const auto& r : out) detail::check_safe(r);
  return out;
}

// Replaces every harmful join rule by the rules of its HU-tree plus grounding
// over the active domain, until the program is Harmless. A harmful rule with
// existentials keeps its id as `head :- H(frontier)` so Skolem bindings that
// name it stay meaningful; the tree and grounding conclude H instead.
inline std::pair<Program, NormalizationTrace> hje(const Program& input, const HJEOptions& opt = {}) {
  {
    auto w = analysis::is_warded(input);
    if (!w.warded) {
      std::string msg;
      for (const auto& v : w.violations) msg += (msg.empty() ? "" : "; ") + v.rule + " (" + v.variable + "): " + v.reason;
      throw NotWarded(msg);
    }
  }
  NormalizationTrace trace;
  Program cur = input;
  FreshNames names(input);
  for (std::size_t round = 0;; ++round) {
    auto affected = analysis::affected_positions(cur);
    std::vector<const Rule*> harmful;
    for (const auto& r : cur.rules)
      if (!analysis::harmful_join_vars(r, affected).empty()) harmful.push_back(&r);
    if (harmful.empty()) break;
    if (round == opt.max_rounds)
      throw NonTerminating("harmful joins remain after " + std::to_string(opt.max_rounds) + " rounds");
    ++trace.rounds;

    std::vector<Rule> bridges, working;
    std::vector<HUTree> trees;
    for (const Rule* r : harmful) {
      Rule w = *r;
      if (!r->existentials.empty()) {
        Atom h{names.predicate(r->head.predicate, "h"), {}};
        for (const auto& v : frontier(*r)) h.terms.push_back(Term::var(v));
        w.head = h;
        w.existentials.clear();
      }
      working.push_back(w);
      HUTree t = back_composition(cur, w, affected, opt);
      t.root = *r;  // recognition compares the original rules
      trace.num_nodes += t.num_nodes;
      trace.num_folds += t.num_folds;
      trees.push_back(std::move(t));
    }
    auto merged = recognition(trees);
    std::size_t kept = 0;
    std::vector<Rule> produced;
    for (std::size_t i = 0; i < trees.size(); ++i) {
      const Rule& orig = *harmful[i];
      const std::size_t j = merged[i];
      if (!orig.existentials.empty()) {
        Atom h = working[j].head;
        h.terms.clear();
        for (const auto& v : frontier(orig)) h.terms.push_back(Term::var(v));
        bridges.push_back(Rule{orig.id, {h}, orig.head, orig.existentials, {}});
      }
      if (j != i) continue;
      ++kept;
      HUTree local = trees[i];
      local.root = working[i];
      for (auto& r : tree_rules(local, names)) produced.push_back(std::move(r));
      for (auto& r : grounding(working[i], affected, names)) produced.push_back(std::move(r));
    }
    produced = skolem_simplify(produced);
    trace.log.push_back("round " + std::to_string(round + 1) + ": " + std::to_string(harmful.size()) +
                        " harmful join rules, " + std::to_string(kept) + " trees after recognition, " +
                        std::to_string(produced.size() + bridges.size()) + " rules produced");

    Program next;
    next.annotations = cur.annotations;
    std::set<std::string> gone;
    for (const Rule* r : harmful) gone.insert(r->id);
    for (const auto& r : cur.rules)
      if (!gone.contains(r.id)) next.rules.push_back(r);
    for (auto& r : bridges) next.rules.push_back(std::move(r));
    for (auto& r : produced) next.rules.push_back(std::move(r));
    for (auto& t : trees) trace.trees.push_back(std::move(t));
    cur = std::move(next);
  }
  if (!analysis::harmful_joins(cur).empty()) throw NonTerminating("harmful joins remain after normalization");
  if (auto w = analysis::is_warded(cur); !w.warded)
    throw InvalidProgram("normalized program is not warded: rule " + w.violations.front().rule);
  validate(cur);
  return {std::move(cur), std::move(trace)};
}

}  // namespace wforge::hje
