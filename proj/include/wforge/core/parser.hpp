#pragma once

#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wforge/core/errors.hpp"
#include "wforge/core/model.hpp"

namespace wforge {

namespace detail {

struct Token {
  enum class Kind { Ident, Var, Int, String, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          word += advance();
        t.kind = (std::isupper(static_cast<unsigned char>(word[0])) || word[0] == '_')
                     ? Token::Kind::Var
                     : Token::Kind::Ident;
        t.text = std::move(word);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        std::string num(1, advance());
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          num += advance();
        t.kind = Token::Kind::Int;
        t.text = std::move(num);
      } else if (c == '"') {
        advance();
        std::string s;
        for (;;) {
          if (pos_ >= src_.size()) throw SyntaxError(t.line, t.column, "unterminated string");
          char d = advance();
          if (d == '"') break;
          if (d == '\\') {
            if (pos_ >= src_.size()) throw SyntaxError(t.line, t.column, "unterminated string");
            d = advance();
          }
          s += d;
        }
        t.kind = Token::Kind::String;
        t.text = std::move(s);
      } else {
        static constexpr std::string_view two[] = {":-", "<=", ">=", "==", "!="};
        t.kind = Token::Kind::Punct;
        for (auto p : two)
          if (src_.substr(pos_, 2) == p) {
            t.text = std::string(p);
            advance();
            advance();
            break;
          }
        if (t.text.empty()) {
          if (std::string_view("(),.:?@=<>").find(c) == std::string_view::npos)
            throw SyntaxError(line_, col_, std::string("unexpected character '") + c + "'");
          t.text = std::string(1, advance());
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program parse() {
    Program p;
    std::vector<bool> auto_id;
    while (peek().kind != Token::Kind::End) {
      if (is_punct("@")) {
        parse_annotation(p);
      } else {
        bool labeled = false;
        p.rules.push_back(parse_rule(labeled));
        auto_id.push_back(!labeled);
      }
    }
    assign_ids(p, auto_id);
    return p;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(i_ + ahead, toks_.size() - 1)];
  }
  bool is_punct(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Punct && peek(ahead).text == s;
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw SyntaxError(t.line, t.column, msg + (t.kind == Token::Kind::End ? " at end of input"
                                                                          : " near '" + t.text + "'"));
  }
  Token take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
  void expect(std::string_view s) {
    if (!is_punct(s)) fail(peek(), "expected '" + std::string(s) + "'");
    take();
  }
  std::string expect_ident(const char* what) {
    if (peek().kind != Token::Kind::Ident) fail(peek(), std::string("expected ") + what);
    return take().text;
  }

  void parse_annotation(Program& p) {
    expect("@");
    const Token kw = peek();
    std::string kind = expect_ident("annotation keyword");
    std::string pred = expect_ident("predicate name");
    auto& ann = p.annotations[pred];
    if (kind == "input") {
      ann.input = true;
    } else if (kind == "output") {
      ann.output = true;
    } else if (kind == "bind") {
      Binding b;
      if (peek().kind != Token::Kind::String) fail(peek(), "expected bind format string");
      b.format = take().text;
      if (peek().kind != Token::Kind::String) fail(peek(), "expected bind path string");
      b.path = take().text;
      ann.bind = std::move(b);
    } else {
      fail(kw, "unknown annotation");
    }
    if (is_punct(".")) take();
  }

  Term parse_constant() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Int || t.kind == Token::Kind::String || t.kind == Token::Kind::Ident)
      return Term::constant(take().text);
    fail(t, "expected constant");
  }

  Term parse_term(bool in_head, std::set<std::string>* existentials) {
    if (is_punct("?")) {
      const Token q = take();
      if (!in_head) fail(q, "existential marker outside a rule head");
      if (peek().kind != Token::Kind::Var) fail(peek(), "expected variable after '?'");
      std::string name = take().text;
      existentials->insert(name);
      return Term::var(name);
    }
    if (peek().kind == Token::Kind::Var) return Term::var(take().text);
    if (peek().kind == Token::Kind::Ident && is_punct("(", 1)) {
      std::string functor = take().text;
      if (functor.rfind("sk_", 0) != 0) fail(peek(), "nested terms must be Skolem terms");
      return Term::skolem(std::move(functor), parse_args(false, nullptr));
    }
    return parse_constant();
  }

  std::vector<Term> parse_args(bool in_head, std::set<std::string>* existentials) {
    expect("(");
    std::vector<Term> args;
    if (!is_punct(")")) {
      for (;;) {
        args.push_back(parse_term(in_head, existentials));
        if (!is_punct(",")) break;
        take();
      }
    }
    expect(")");
    return args;
  }

  Atom parse_atom(bool in_head, std::set<std::string>* existentials) {
    Atom a;
    a.predicate = expect_ident("predicate name");
    if (a.predicate.rfind("sk_", 0) == 0) fail(peek(), "'sk_' prefix is reserved for Skolem functors");
    a.terms = parse_args(in_head, existentials);
    return a;
  }

  static bool comparison(const std::string& s, CompareOp& op) {
    if (s == "<") op = CompareOp::Less;
    else if (s == "<=") op = CompareOp::LessEq;
    else if (s == ">") op = CompareOp::Greater;
    else if (s == ">=") op = CompareOp::GreaterEq;
    else if (s == "==") op = CompareOp::Equal;
    else if (s == "!=") op = CompareOp::NotEqual;
    else return false;
    return true;
  }

  Rule parse_rule(bool& labeled) {
    Rule r;
    if ((peek().kind == Token::Kind::Ident || peek().kind == Token::Kind::Var) && is_punct(":", 1)) {
      r.id = take().text;
      take();
      labeled = true;
    }
    const Token head_tok = peek();
    r.head = parse_atom(true, &r.existentials);
    if (is_punct(",")) fail(peek(), "multi-atom heads are not supported");
    if (is_punct(".")) fail(peek(), "rules need a nonempty body");
    expect(":-");
    for (;;) {
      if (peek().kind == Token::Kind::Var) {
        Term lhs = Term::var(take().text);
        const Token op_tok = peek();
        if (is_punct("=")) {
          take();
          Term rhs = parse_term(false, nullptr);
          if (!rhs.is_skolem()) fail(op_tok, "'=' binds a variable to a Skolem term");
          r.body.push_back(Atom{kSkolemBinding, {std::move(lhs), std::move(rhs)}});
        } else {
          CompareOp op;
          if (op_tok.kind != Token::Kind::Punct || !comparison(op_tok.text, op))
            fail(op_tok, "expected comparison operator");
          take();
          Term c = parse_constant();
          r.conditions.push_back(Condition{std::move(lhs), op, c.name});
        }
      } else {
        r.body.push_back(parse_atom(false, nullptr));
      }
      if (is_punct(",")) {
        take();
        continue;
      }
      break;
    }
    expect(".");
    check_safety(r, head_tok);
    return r;
  }

  static void check_safety(const Rule& r, const Token& at) {
    auto bv = body_vars(r);
    std::vector<std::string> hv;
    collect_vars(r.head, hv);
    for (const auto& v : hv)
      if (!r.existentials.contains(v) && !contains(bv, v))
        throw UnsafeRule(std::to_string(at.line) + ":" + std::to_string(at.column) +
                         ": head variable " + v + " is neither existential nor bound in the body");
    for (const auto& e : r.existentials)
      if (contains(bv, e))
        throw UnsafeRule(std::to_string(at.line) + ":" + std::to_string(at.column) +
                         ": existential " + e + " also occurs in the body");
  }

  static void assign_ids(Program& p, const std::vector<bool>& auto_id) {
    std::set<std::string> used;
    for (std::size_t i = 0; i < p.rules.size(); ++i)
      if (!auto_id[i]) used.insert(p.rules[i].id);
    for (std::size_t i = 0; i < p.rules.size(); ++i) {
      if (!auto_id[i]) continue;
      std::string id = "r" + std::to_string(i + 1);
      while (used.contains(id)) id += "_";
      used.insert(id);
      p.rules[i].id = id;
    }
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace detail

// Parses dialect source into a validated Program.
inline Program parse(std::string_view text) {
  Program p = detail::Parser(detail::Lexer(text).tokenize()).parse();
  validate(p);
  return p;
}

}  // namespace wforge
