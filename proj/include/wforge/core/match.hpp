#pragma once

#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "wforge/core/subst.hpp"

namespace wforge {

// How pattern atoms may be mapped onto target atoms.
//  Homomorphism: variables map to arbitrary terms, atoms may share a target.
//  Isomorphic:   variables map injectively to variables, each target atom is
//                used at most once (subset isomorphism).
enum class MatchMode { Homomorphism, Isomorphic };

namespace detail {

inline std::string print_condition_key(const Condition& c) {
  return std::to_string(static_cast<int>(c.lhs.kind)) + c.lhs.name + to_string(c.op) + "\x1f" + c.constant;
}

class Matcher {
 public:
  using Accept = std::function<bool(const Subst&, const std::vector<std::size_t>&)>;

  Matcher(std::span<const Atom> pattern, std::span<const Atom> target, MatchMode mode,
          std::set<std::string> frozen)
      : pat_(pattern), tgt_(target), mode_(mode), frozen_(std::move(frozen)) {}

  bool run(Subst binding, const Accept& accept) {
    used_.assign(tgt_.size(), false);
    chosen_.assign(pat_.size(), 0);
    for (const auto& [k, v] : binding)
      if (v.is_var()) image_.insert(v.name);
    for (const auto& f : frozen_) image_.insert(f);
    return step(0, binding, accept);
  }

 private:
  bool bind_term(const Term& p, const Term& t, Subst& s, std::vector<std::string>& added) {
    if (p.is_var()) {
      if (frozen_.contains(p.name)) return t == p;
      auto it = s.find(p.name);
      if (it != s.end()) return it->second == t;
      if (mode_ == MatchMode::Isomorphic) {
        if (!t.is_var() || image_.contains(t.name)) return false;
        image_.insert(t.name);
      }
      s.emplace(p.name, t);
      added.push_back(p.name);
      return true;
    }
    if (p.is_skolem()) {
      if (!t.is_skolem() || t.name != p.name || t.args.size() != p.args.size()) return false;
      for (std::size_t i = 0; i < p.args.size(); ++i)
        if (!bind_term(p.args[i], t.args[i], s, added)) return false;
      return true;
    }
    return p == t;
  }

  void undo(Subst& s, const std::vector<std::string>& added) {
    for (const auto& v : added) {
      if (mode_ == MatchMode::Isomorphic) image_.erase(s.at(v).name);
      s.erase(v);
    }
  }

  bool step(std::size_t i, Subst& s, const Accept& accept) {
    if (i == pat_.size()) return accept(s, chosen_);
    const Atom& p = pat_[i];
    for (std::size_t j = 0; j < tgt_.size(); ++j) {
      if (mode_ == MatchMode::Isomorphic && used_[j]) continue;
      const Atom& t = tgt_[j];
      if (t.predicate != p.predicate || t.terms.size() != p.terms.size()) continue;
      std::vector<std::string> added;
      bool ok = true;
      for (std::size_t k = 0; k < p.terms.size() && ok; ++k) ok = bind_term(p.terms[k], t.terms[k], s, added);
      if (ok) {
        used_[j] = true;
        chosen_[i] = j;
        if (step(i + 1, s, accept)) return true;
        used_[j] = false;
      }
      undo(s, added);
    }
    return false;
  }

  std::span<const Atom> pat_;
  std::span<const Atom> tgt_;
  MatchMode mode_;
  std::set<std::string> frozen_;
  std::vector<bool> used_;
  std::vector<std::size_t> chosen_;
  std::set<std::string> image_;
};

}  // namespace detail

// Enumerates mappings of `pattern` into `target` extending `binding`, calling
// accept(subst, chosen_target_indices) for each; stops when accept returns
// true. Variables in `frozen` map only to themselves. Returns whether accept
// stopped the search.
inline bool for_each_match(std::span<const Atom> pattern, std::span<const Atom> target, MatchMode mode,
                           const Subst& binding,
                           const std::function<bool(const Subst&, const std::vector<std::size_t>&)>& accept,
                           std::set<std::string> frozen = {}) {
  return detail::Matcher(pattern, target, mode, std::move(frozen)).run(binding, accept);
}

inline std::optional<Subst> find_match(std::span<const Atom> pattern, std::span<const Atom> target,
                                       MatchMode mode, const Subst& binding = {},
                                       std::set<std::string> frozen = {}) {
  std::optional<Subst> found;
  for_each_match(pattern, target, mode, binding,
                 [&](const Subst& s, const std::vector<std::size_t>&) {
                   found = s;
                   return true;
                 },
                 std::move(frozen));
  return found;
}

// Rules equal up to a bijective variable renaming, with body atoms and
// conditions compared as multisets. Ids are ignored.
inline bool isomorphic(const Rule& a, const Rule& b) {
  if (a.body.size() != b.body.size() || a.conditions.size() != b.conditions.size() ||
      a.existentials.size() != b.existentials.size() || a.head.predicate != b.head.predicate ||
      a.head.arity() != b.head.arity())
    return false;
  return for_each_match(a.body, b.body, MatchMode::Isomorphic, {},
                        [&](const Subst& s, const std::vector<std::size_t>&) {
                          // extend over head (existentials map to existentials)
                          Subst full = s;
                          std::set<std::string> image;
                          for (const auto& [k, v] : full) image.insert(v.name);
                          for (std::size_t i = 0; i < a.head.arity(); ++i) {
                            const Term& x = a.head.terms[i];
                            const Term& y = b.head.terms[i];
                            if (!x.is_var()) {
                              if (!(x == y)) return false;
                              continue;
                            }
                            auto it = full.find(x.name);
                            if (it != full.end()) {
                              if (!(it->second == y)) return false;
                              continue;
                            }
                            if (!y.is_var() || !a.existentials.contains(x.name) ||
                                !b.existentials.contains(y.name) || image.contains(y.name))
                              return false;
                            full[x.name] = y;
                            image.insert(y.name);
                          }
                          std::multiset<std::string> ca, cb;
                          for (const auto& c : a.conditions) ca.insert(detail::print_condition_key(instantiate(c, full)));
                          for (const auto& c : b.conditions) cb.insert(detail::print_condition_key(c));
                          return ca == cb;
                        });
}

}  // namespace wforge
