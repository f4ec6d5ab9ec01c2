#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wforge/core/errors.hpp"

namespace wforge {

struct Term {
  enum class Kind : std::uint8_t { Variable, Constant, LabeledNull, Skolem };

  Kind kind = Kind::Variable;
  // Variable name, constant lexical value or Skolem functor.
  std::string name;
  std::uint64_t null_id = 0;
  std::vector<Term> args;

  static Term var(std::string n) { return Term{Kind::Variable, std::move(n), 0, {}}; }
  static Term constant(std::string v) { return Term{Kind::Constant, std::move(v), 0, {}}; }
  static Term labeled_null(std::uint64_t id) { return Term{Kind::LabeledNull, {}, id, {}}; }
  static Term skolem(std::string functor, std::vector<Term> a) {
    return Term{Kind::Skolem, std::move(functor), 0, std::move(a)};
  }

  bool is_var() const noexcept { return kind == Kind::Variable; }
  bool is_constant() const noexcept { return kind == Kind::Constant; }
  bool is_null() const noexcept { return kind == Kind::LabeledNull; }
  bool is_skolem() const noexcept { return kind == Kind::Skolem; }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term& a, const Term& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.name <=> b.name; c != 0) return c;
    if (auto c = a.null_id <=> b.null_id; c != 0) return c;
    return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(),
                                                  b.args.end());
  }
};

// Predicate name of the body literal `Y = sk_<rule>_<var>(frontier...)` that
// binds Y to the witness an existential rule minted for that frontier.
inline const std::string kSkolemBinding = "=";

struct Atom {
  std::string predicate;
  std::vector<Term> terms;

  std::size_t arity() const noexcept { return terms.size(); }
  bool is_skolem_binding() const noexcept { return predicate == kSkolemBinding; }

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

inline Atom skolem_binding(std::string bound_var, std::string functor, std::vector<Term> frontier) {
  return Atom{kSkolemBinding,
              {Term::var(std::move(bound_var)), Term::skolem(std::move(functor), std::move(frontier))}};
}

enum class CompareOp : std::uint8_t { Less, LessEq, Greater, GreaterEq, Equal, NotEqual };

inline const char* to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Less: return "<";
    case CompareOp::LessEq: return "<=";
    case CompareOp::Greater: return ">";
    case CompareOp::GreaterEq: return ">=";
    case CompareOp::Equal: return "==";
    case CompareOp::NotEqual: return "!=";
  }
  return "?";
}

// `var op constant`; conditions never bind positions.
struct Condition {
  Term lhs;  // variable, or a constant once a substitution has grounded it
  CompareOp op = CompareOp::Equal;
  std::string constant;

  friend bool operator==(const Condition&, const Condition&) = default;
  friend auto operator<=>(const Condition&, const Condition&) = default;
};

struct Rule {
  std::string id;
  std::vector<Atom> body;
  Atom head;
  std::set<std::string> existentials;
  std::vector<Condition> conditions;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct Binding {
  std::string format;
  std::string path;

  friend bool operator==(const Binding&, const Binding&) = default;
};

struct Annotation {
  bool input = false;
  bool output = false;
  std::optional<Binding> bind;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct Program {
  std::vector<Rule> rules;
  std::map<std::string, Annotation> annotations;

  bool is_input(const std::string& pred) const {
    auto it = annotations.find(pred);
    return it != annotations.end() && it->second.input;
  }
  bool is_output(const std::string& pred) const {
    auto it = annotations.find(pred);
    return it != annotations.end() && it->second.output;
  }
  const Rule* find_rule(const std::string& id) const {
    for (const auto& r : rules)
      if (r.id == id) return &r;
    return nullptr;
  }

  friend bool operator==(const Program&, const Program&) = default;
};

// Built-in active-domain predicate used by grounding rules: `dom` for one
// column, `dom<k>` for k columns. Materialized from EDB constants at chase time.
inline std::string dom_predicate(std::size_t arity) {
  return arity == 1 ? std::string("dom") : "dom" + std::to_string(arity);
}

inline bool is_dom_predicate(const std::string& pred) {
  if (pred.rfind("dom", 0) != 0) return false;
  if (pred.size() == 3) return true;
  for (std::size_t i = 3; i < pred.size(); ++i)
    if (pred[i] < '0' || pred[i] > '9') return false;
  return true;
}

// --- term and rule utilities -------------------------------------------------

inline void collect_vars(const Term& t, std::vector<std::string>& out) {
  if (t.is_var()) {
    for (const auto& v : out)
      if (v == t.name) return;
    out.push_back(t.name);
  } else if (t.is_skolem()) {
    for (const auto& a : t.args) collect_vars(a, out);
  }
}

inline void collect_vars(const Atom& a, std::vector<std::string>& out) {
  for (const auto& t : a.terms) collect_vars(t, out);
}

// Variables of the body atoms (including Skolem bindings), first-occurrence order.
inline std::vector<std::string> body_vars(const Rule& r) {
  std::vector<std::string> out;
  for (const auto& a : r.body) collect_vars(a, out);
  return out;
}

// Every variable of the rule in first-occurrence order: body, conditions, head.
inline std::vector<std::string> rule_vars(const Rule& r) {
  std::vector<std::string> out;
  for (const auto& a : r.body) collect_vars(a, out);
  for (const auto& c : r.conditions) collect_vars(c.lhs, out);
  collect_vars(r.head, out);
  return out;
}

inline bool contains(const std::vector<std::string>& v, const std::string& s) {
  for (const auto& x : v)
    if (x == s) return true;
  return false;
}

inline bool atom_has_var(const Atom& a, const std::string& var) {
  std::vector<std::string> vs;
  collect_vars(a, vs);
  return contains(vs, var);
}

// Frontier: head variables that also occur in the body.
inline std::vector<std::string> frontier(const Rule& r) {
  std::vector<std::string> hv;
  collect_vars(r.head, hv);
  std::vector<std::string> out;
  for (const auto& v : hv)
    if (!r.existentials.contains(v)) out.push_back(v);
  return out;
}

inline std::string skolem_functor(const std::string& rule_id, const std::string& var) {
  return "sk_" + rule_id + "_" + var;
}

// Predicate arities fixed by first use; throws ArityMismatch on conflict.
inline std::map<std::string, std::size_t> predicate_arities(const Program& p) {
  std::map<std::string, std::size_t> arity;
  auto note = [&](const Atom& a, const Rule& r) {
    if (a.is_skolem_binding()) return;
    auto [it, fresh] = arity.emplace(a.predicate, a.arity());
    if (!fresh && it->second != a.arity())
      throw ArityMismatch("predicate " + a.predicate + " used with arity " +
                          std::to_string(a.arity()) + " in rule " + r.id + ", earlier " +
                          std::to_string(it->second));
  };
  for (const auto& r : p.rules) {
    for (const auto& a : r.body) note(a, r);
    note(r.head, r);
  }
  return arity;
}

inline std::set<std::string> head_predicates(const Program& p) {
  std::set<std::string> out;
  for (const auto& r : p.rules) out.insert(r.head.predicate);
  return out;
}

// Checks every Program/Rule invariant; throws the matching domain error.
inline void validate(const Program& p) {
  predicate_arities(p);
  std::set<std::string> ids;
  for (const auto& r : p.rules) {
    if (r.id.empty()) throw InvalidProgram("rule without id");
    if (!ids.insert(r.id).second) throw InvalidProgram("duplicate rule id " + r.id);
    if (r.body.empty()) throw InvalidProgram("rule " + r.id + " has an empty body");
    if (r.head.is_skolem_binding()) throw InvalidProgram("rule " + r.id + " has a binding head");
    auto bv = body_vars(r);
    for (const auto& e : r.existentials)
      if (contains(bv, e))
        throw UnsafeRule("existential " + e + " of rule " + r.id + " occurs in the body");
    std::vector<std::string> hv;
    collect_vars(r.head, hv);
    for (const auto& v : hv)
      if (!r.existentials.contains(v) && !contains(bv, v))
        throw UnsafeRule("head variable " + v + " of rule " + r.id +
                         " is neither existential nor bound in the body");
    for (const auto& e : r.existentials)
      if (!contains(hv, e)) throw UnsafeRule("existential " + e + " of rule " + r.id + " not in head");
    for (const auto& c : r.conditions)
      if (c.lhs.is_var() && !contains(bv, c.lhs.name))
        throw UnsafeRule("condition variable " + c.lhs.name + " of rule " + r.id + " unbound");
    if (p.is_input(r.head.predicate))
      throw InvalidProgram("input predicate " + r.head.predicate + " is the head of rule " + r.id);
  }
  for (const auto& [pred, ann] : p.annotations)
    if (ann.bind && !ann.input && !ann.output)
      throw InvalidProgram("@bind on " + pred + " which is neither @input nor @output");
}

}  // namespace wforge
