#pragma once

// Hand-built programs shared by the unit, integration and acceptance suites.

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wforge/core.hpp"

namespace fixtures {

// Single branch of a basic HU-tree: rho joins idb1 and idb2 on a harmful
// variable; idb1 is caused directly by s1, idb2 indirectly through s2 then s1.
inline const char* kHuBranch =
    "@input e\n"
    "@output out\n"
    "s1: idb1(X,?Z) :- e(X).\n"
    "s2: idb2(Y,X) :- idb1(X,Y).\n"
    "rho: out(X,W) :- idb1(X,Y), idb2(Y,W).\n";

// Both join atoms caused by the same existential rule only.
inline const char* kSharedDirect =
    "@input e\n"
    "@output out\n"
    "s1: p(X,?Z) :- e(X).\n"
    "rho: out(X,W) :- p(X,Y), p(W,Y).\n";

// Indirect cause beta is recursive: unfolding b with beta yields b again.
inline const char* kRecursiveBeta =
    "@input e\n"
    "@input f\n"
    "@output c\n"
    "delta: a(X,?Z) :- e(X).\n"
    "sigma: b(Y,X) :- a(X,Y).\n"
    "beta: b(Y,W) :- b(Y,V), f(V,W).\n"
    "rho: c(X,W) :- a(X,Y), b(Y,W).\n";

// Family with branching factor k and d levels of indirect causes below the
// join atom b: k rules head b, k^2 rules head their body predicates, and so on;
// the deepest k^d rules read p0, whose nulls come from the existential rule
// delta. rho joins p0 and b on the harmful variable Y.
inline std::string kd_family(int k, int d) {
  std::string out = "@input e\n@output c\ndelta: p0(X,?Z) :- e(X).\n";
  std::vector<std::vector<int>> paths{{}};
  for (int level = d; level >= 1; --level) {
    std::vector<std::vector<int>> next;
    for (const auto& parent : paths)
      for (int i = 1; i <= k; ++i) {
        auto path = parent;
        path.push_back(i);
        next.push_back(path);
        std::string id = "s" + std::to_string(level);
        std::string q = "q";
        for (int x : path) {
          id += "_" + std::to_string(x);
          q += "_" + std::to_string(x);
        }
        std::string head = "b";
        if (!parent.empty()) {
          head = "q";
          for (int x : parent) head += "_" + std::to_string(x);
        }
        std::string body = level == 1 ? "p0(W,Y)" : q + "(Y,W)";
        out += id + ": " + head + "(Y,W) :- " + body + ".\n";
      }
    paths = std::move(next);
  }
  out += "rho: c(X,W) :- p0(X,Y), b(Y,W).\n";
  return out;
}

// Small random programs over p0..p4 (arity 2) and EDB e0,e1; not necessarily
// warded. Used for analysis properties.
inline wforge::Program random_program(std::mt19937_64& rng, int max_rules = 6) {
  using namespace wforge;
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  Program p;
  p.annotations["e0"].input = true;
  p.annotations["e1"].input = true;
  const char* vars[] = {"X", "Y", "W", "V"};
  int n = 1 + pick(max_rules);
  for (int i = 0; i < n; ++i) {
    Rule r;
    r.id = "r" + std::to_string(i);
    int atoms = 1 + pick(2);
    for (int a = 0; a < atoms; ++a) {
      int which = pick(7);
      std::string pred = which < 2 ? "e" + std::to_string(which) : "p" + std::to_string(which - 2);
      r.body.push_back(Atom{pred, {Term::var(vars[pick(4)]), Term::var(vars[pick(4)])}});
    }
    auto bv = body_vars(r);
    r.head.predicate = "p" + std::to_string(pick(5));
    for (int k = 0; k < 2; ++k) {
      if (pick(4) == 0) {
        std::string z = "Z" + std::to_string(k);
        r.existentials.insert(z);
        r.head.terms.push_back(Term::var(z));
      } else {
        r.head.terms.push_back(Term::var(bv[static_cast<std::size_t>(pick(static_cast<int>(bv.size())))]));
      }
    }
    p.rules.push_back(std::move(r));
  }
  return p;
}

using Tuples = std::set<std::vector<std::string>>;

// Naive bottom-up evaluation: every variable ranges over the whole active
// domain, rules are applied until nothing changes.
inline std::map<std::string, Tuples> naive_eval(const wforge::Program& p, const std::map<std::string, Tuples>& edb) {
  std::map<std::string, Tuples> db = edb;
  std::set<std::string> dom;
  for (const auto& [pred, ts] : edb)
    for (const auto& t : ts) dom.insert(t.begin(), t.end());
  std::vector<std::string> d(dom.begin(), dom.end());
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : p.rules) {
      auto vars = wforge::rule_vars(r);
      std::vector<std::size_t> idx(vars.size(), 0);
      if (d.empty()) break;
      for (;;) {
        std::map<std::string, std::string> val;
        for (std::size_t i = 0; i < vars.size(); ++i) val[vars[i]] = d[idx[i]];
        auto row = [&](const wforge::Atom& a) {
          std::vector<std::string> out;
          for (const auto& t : a.terms) out.push_back(t.is_var() ? val[t.name] : t.name);
          return out;
        };
        bool holds = true;
        for (const auto& a : r.body) holds = holds && db[a.predicate].contains(row(a));
        if (holds && db[r.head.predicate].insert(row(r.head)).second) changed = true;
        std::size_t pos = 0;
        while (pos < idx.size() && ++idx[pos] == d.size()) idx[pos++] = 0;
        if (pos == idx.size()) break;
      }
    }
  }
  return db;
}

// Pure Datalog over e, g (EDB) and t, u.
inline wforge::Program random_datalog(std::mt19937_64& rng) {
  wforge::Program p;
  p.annotations["e"].input = true;
  p.annotations["g"].input = true;
  const char* vars[] = {"X", "Y", "W"};
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  int n = 1 + pick(4);
  for (int i = 0; i < n; ++i) {
    wforge::Rule r;
    r.id = "r" + std::to_string(i);
    int atoms = 1 + pick(2);
    for (int a = 0; a < atoms; ++a) {
      const char* preds[] = {"e", "g", "t", "u"};
      r.body.push_back(wforge::Atom{preds[pick(4)], {wforge::Term::var(vars[pick(3)]), wforge::Term::var(vars[pick(3)])}});
    }
    auto bv = wforge::body_vars(r);
    r.head = wforge::Atom{pick(2) ? "t" : "u", {wforge::Term::var(bv[static_cast<std::size_t>(pick(static_cast<int>(bv.size())))]),
                                       wforge::Term::var(bv[static_cast<std::size_t>(pick(static_cast<int>(bv.size())))])}};
    p.rules.push_back(r);
  }
  return p;
}

}  // namespace fixtures
