#pragma once

#include <string>
#include <vector>

#include "wforge/analysis/affectedness.hpp"
#include "wforge/analysis/causes.hpp"
#include "wforge/hje/unfold.hpp"

namespace wforge::hje {

struct HJEOptions {
  bool folding = true;
  // created nodes per tree before giving up
  std::size_t node_budget = 10'000;
  std::size_t max_rounds = 8;
};

struct HUNode {
  Rule rule;
  int parent = -1;
  std::size_t atom = 0;  // body index unfolded in the parent
  std::string cause;     // rule id used for that unfolding
  std::size_t depth = 0;
  Subst step;            // parent variable -> image under the unfolding mgu
  std::vector<std::string> tracked;
  std::vector<int> children;
  int fold_to = -1;      // ancestor this node folded with
  FoldMatch fold;
  bool leaf = false;
  bool dead = false;     // selected atom has no causes: no null can get there
};

struct HUTree {
  Rule root;
  std::vector<HUNode> nodes;  // nodes[0] is the root
  std::vector<std::pair<int, int>> fold_edges;
  std::vector<int> leaves;
  std::size_t num_nodes = 0;  // nodes created by unfolding
  std::size_t num_folds = 0;  // folding checks, successful or not
};

namespace detail {

inline Term walk(const HUTree& t, int from, int to, Term term) {
  std::vector<int> path;
  for (int n = to; n != from; n = t.nodes[static_cast<std::size_t>(n)].parent) path.push_back(n);
  for (auto it = path.rbegin(); it != path.rend(); ++it) term = instantiate(term, t.nodes[static_cast<std::size_t>(*it)].step);
  return term;
}

inline std::vector<std::string> fold_args(const HUNode& a) {
  std::vector<std::string> out;
  for (const auto& v : body_vars(a.rule))
    if (!contains(a.tracked, v)) out.push_back(v);
  return out;
}

inline bool try_fold(HUTree& t, int child, int anc) {
  const HUNode& c = t.nodes[static_cast<std::size_t>(child)];
  const HUNode& a = t.nodes[static_cast<std::size_t>(anc)];
  if (fold_args(a).empty()) return false;
  Subst pre;
  std::vector<std::string> images;
  for (const auto& y : a.tracked) {
    Term img = walk(t, anc, child, Term::var(y));
    if (!img.is_var() || !contains(c.tracked, img.name)) return false;
    pre[y] = img;
    images.push_back(img.name);
  }
  if (images.size() != c.tracked.size()) return false;
  auto m = find_fold(c.rule, a.rule, pre, c.tracked);
  if (!m) return false;
  HUNode& cm = t.nodes[static_cast<std::size_t>(child)];
  cm.fold_to = anc;
  cm.fold = std::move(*m);
  t.fold_edges.emplace_back(child, anc);
  return true;
}

}  // namespace detail

// First regular body atom holding a tracked variable at an affected slot.
inline std::optional<std::size_t> selected_atom(const Rule& r, const std::vector<std::string>& tracked,
                                                const analysis::PositionSet& affected) {
  for (std::size_t i = 0; i < r.body.size(); ++i)
    if (!analysis::tracked_positions(r.body[i], tracked, affected).empty()) return i;
  return std::nullopt;
}

// Builds the HU-tree of a harmful join rule: the join atoms are unfolded with
// their causes of affectedness, depth first, until the join variables sit in
// no affected position (a leaf) or the node folds with an ancestor.
inline HUTree back_composition(const Program& p, const Rule& rule, const analysis::PositionSet& affected,
                               const HJEOptions& opt = {}) {
  auto tracked = analysis::harmful_join_vars(rule, affected);
  if (tracked.empty()) throw NotHarmfulJoin("rule " + rule.id + " has no harmful join");
  HUTree t;
  t.root = rule;
  HUNode root;
  root.rule = rule;
  root.tracked = tracked;
  t.nodes.push_back(std::move(root));

  std::size_t counter = 0;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    auto idx = static_cast<std::size_t>(id);
    auto sel = selected_atom(t.nodes[idx].rule, t.nodes[idx].tracked, affected);
    if (!sel) {
      t.nodes[idx].leaf = true;
      t.leaves.push_back(id);
      continue;
    }
    const Atom& atom = t.nodes[idx].rule.body[*sel];
    auto causes = analysis::causes_for(p, atom.predicate,
                                       analysis::tracked_positions(atom, t.nodes[idx].tracked, affected), affected);
    std::vector<int> created;
    for (const auto& ce : causes) {
      const Rule& cause = *p.find_rule(ce.rule);
      UnfoldResult u;
      try {
        u = unfold_step(t.nodes[idx].rule, *sel, cause, counter);
      } catch (const NonUnifiable&) {
        continue;
      }
      HUNode n;
      n.parent = id;
      n.atom = *sel;
      n.cause = cause.id;
      n.depth = t.nodes[idx].depth + 1;
      for (const auto& y : t.nodes[idx].tracked) {
        Term img = instantiate(Term::var(y), u.mgu);
        if (img.is_var() && !contains(n.tracked, img.name)) n.tracked.push_back(img.name);
      }
      n.rule = std::move(u.rule);
      n.step = std::move(u.mgu);
      if (++t.num_nodes > opt.node_budget)
        throw NonTerminating("HU-tree of " + rule.id + " exceeded " + std::to_string(opt.node_budget) + " nodes");
      t.nodes.push_back(std::move(n));
      int nid = static_cast<int>(t.nodes.size() - 1);
      t.nodes[idx].children.push_back(nid);
      bool folded = false;
      if (opt.folding) {
        for (int anc = id; anc != -1 && !folded; anc = t.nodes[static_cast<std::size_t>(anc)].parent) {
          ++t.num_folds;
          folded = detail::try_fold(t, nid, anc);
        }
      }
      if (!folded) created.push_back(nid);
    }
    if (t.nodes[idx].children.empty()) t.nodes[idx].dead = true;
    for (auto it = created.rbegin(); it != created.rend(); ++it) stack.push_back(*it);
  }
  return t;
}

inline HUTree back_composition(const Program& p, const Rule& rule, const HJEOptions& opt = {}) {
  return back_composition(p, rule, analysis::affected_positions(p), opt);
}

}  // namespace wforge::hje
