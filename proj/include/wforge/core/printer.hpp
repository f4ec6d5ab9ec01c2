#pragma once

#include <cctype>
#include <string>

#include "wforge/core/model.hpp"

namespace wforge {

namespace detail {

inline bool is_bare_constant(const std::string& v) {
  if (v.empty()) return false;
  std::size_t i = 0;
  if (v[0] == '-') {
    if (v.size() == 1) return false;
    i = 1;
  }
  bool digits = true;
  for (std::size_t j = i; j < v.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(v[j]))) digits = false;
  if (digits) return true;
  if (!std::islower(static_cast<unsigned char>(v[0]))) return false;
  for (char c : v)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

inline std::string quote(const std::string& v) {
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline std::string print_constant(const std::string& value) {
  return detail::is_bare_constant(value) ? value : detail::quote(value);
}

inline std::string print(const Term& t, const std::set<std::string>* existentials = nullptr) {
  switch (t.kind) {
    case Term::Kind::Variable:
      return (existentials && existentials->contains(t.name) ? "?" : "") + t.name;
    case Term::Kind::Constant:
      return print_constant(t.name);
    case Term::Kind::LabeledNull:
      return "_:n" + std::to_string(t.null_id);
    case Term::Kind::Skolem: {
      std::string out = t.name + "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += ",";
        out += print(t.args[i]);
      }
      return out + ")";
    }
  }
  return {};
}

inline std::string print(const Atom& a, const std::set<std::string>* existentials = nullptr) {
  if (a.is_skolem_binding()) return print(a.terms.at(0)) + " = " + print(a.terms.at(1));
  std::string out = a.predicate + "(";
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    if (i) out += ",";
    out += print(a.terms[i], existentials);
  }
  return out + ")";
}

inline std::string print(const Condition& c) {
  return print(c.lhs) + " " + to_string(c.op) + " " + print_constant(c.constant);
}

// `id: head :- body.` on a single line, no trailing newline.
inline std::string print(const Rule& r) {
  std::string out = r.id + ": " + print(r.head, &r.existentials) + " :- ";
  bool first = true;
  for (const auto& a : r.body) {
    if (!first) out += ", ";
    out += print(a);
    first = false;
  }
  for (const auto& c : r.conditions) {
    if (!first) out += ", ";
    out += print(c);
    first = false;
  }
  return out + ".";
}

// Canonical program text: annotations (sorted by predicate) then rules in
// program order, one statement per line.
inline std::string print(const Program& p) {
  std::string out;
  for (const auto& [pred, ann] : p.annotations) {
    if (ann.input) out += "@input " + pred + "\n";
    if (ann.output) out += "@output " + pred + "\n";
    if (ann.bind)
      out += "@bind " + pred + " " + detail::quote(ann.bind->format) + " " +
             detail::quote(ann.bind->path) + "\n";
  }
  for (const auto& r : p.rules) out += print(r) + "\n";
  return out;
}

}  // namespace wforge
