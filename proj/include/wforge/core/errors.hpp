#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wforge {

// Base of every domain error raised by the toolkit. kind() is a stable
// machine-readable tag; what() carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message)
      : Error("SyntaxError", std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ArityMismatch : public Error {
 public:
  explicit ArityMismatch(const std::string& message) : Error("ArityMismatch", message) {}
};

class UnsafeRule : public Error {
 public:
  explicit UnsafeRule(const std::string& message) : Error("UnsafeRule", message) {}
};

class InvalidProgram : public Error {
 public:
  explicit InvalidProgram(const std::string& message) : Error("InvalidProgram", message) {}
};

class NotHarmfulJoin : public Error {
 public:
  explicit NotHarmfulJoin(const std::string& message) : Error("NotHarmfulJoin", message) {}
};

class PredicateMismatch : public Error {
 public:
  explicit PredicateMismatch(const std::string& message) : Error("PredicateMismatch", message) {}
};

class NonUnifiable : public Error {
 public:
  explicit NonUnifiable(const std::string& message) : Error("NonUnifiable", message) {}
};

class NotWarded : public Error {
 public:
  explicit NotWarded(const std::string& message) : Error("NotWarded", message) {}
};

class NonTerminating : public Error {
 public:
  explicit NonTerminating(const std::string& message) : Error("NonTerminating", message) {}
};

class IncompatibleScenario : public Error {
 public:
  explicit IncompatibleScenario(std::vector<std::string> violations)
      : Error("IncompatibleScenario", join(violations)), violations_(std::move(violations)) {}

  // One entry per violated constraint, each of the form "<constraint-id>: <detail>".
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += "; ";
      out += item;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

class GenerationStuck : public Error {
 public:
  explicit GenerationStuck(const std::string& message) : Error("GenerationStuck", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("IoError", message) {}
};

}  // namespace wforge
