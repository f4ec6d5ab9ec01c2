#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wforge/core/errors.hpp"

namespace wforge::gen {

enum class RecursionKind { Direct, Indirect };

inline const char* to_string(RecursionKind k) { return k == RecursionKind::Direct ? "direct" : "indirect"; }

struct Scenario {
  std::vector<std::size_t> inputOutputSequences{1};
  std::size_t numLinearRules = 1;
  std::size_t numHarmlessJoinRules = 0;
  std::size_t numHarmlessHarmfulJoinRules = 0;
  std::size_t numHarmfulHarmfulJoinRules = 0;
  std::size_t numExistentialRules = 0;
  std::size_t numRecursiveRules = 0;
  RecursionKind recursionKind = RecursionKind::Direct;
  std::size_t numConditions = 0;
  double averageSelectivity = 1.0;
  std::size_t recordsPerCsv = 10;
  std::uint64_t seed = 0;

  std::size_t total_rules() const {
    std::size_t n = 0;
    for (auto l : inputOutputSequences) n += l;
    return n;
  }
  std::size_t typed_rules() const {
    return numLinearRules + numHarmlessJoinRules + numHarmlessHarmfulJoinRules + numHarmfulHarmfulJoinRules;
  }
  std::size_t harmful_rules() const { return numHarmlessHarmfulJoinRules + numHarmfulHarmfulJoinRules; }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

// key=value lines, '#' comments. Keys mirror the Scenario fields.
inline Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("syntax: line " + std::to_string(lineno) + " is not key=value");
      continue;
    }
    std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
    auto bad = [&] { errors.push_back("value: " + key + " = '" + value + "' on line " + std::to_string(lineno)); };
    auto count = [&](std::size_t& field) {
      if (!detail::parse_number(value, field)) bad();
    };
    if (key == "inputOutputSequences") {
      sc.inputOutputSequences.clear();
      std::istringstream parts(value);
      std::string part;
      while (std::getline(parts, part, ',')) {
        std::size_t n = 0;
        if (!detail::parse_number(detail::trim(part), n)) {
          bad();
          break;
        }
        sc.inputOutputSequences.push_back(n);
      }
    } else if (key == "numLinearRules") count(sc.numLinearRules);
    else if (key == "numHarmlessJoinRules") count(sc.numHarmlessJoinRules);
    else if (key == "numHarmlessHarmfulJoinRules") count(sc.numHarmlessHarmfulJoinRules);
    else if (key == "numHarmfulHarmfulJoinRules") count(sc.numHarmfulHarmfulJoinRules);
    else if (key == "numExistentialRules") count(sc.numExistentialRules);
    else if (key == "numRecursiveRules") count(sc.numRecursiveRules);
    else if (key == "numConditions") count(sc.numConditions);
    else if (key == "recordsPerCsv") count(sc.recordsPerCsv);
    else if (key == "seed") {
      if (!detail::parse_number(value, sc.seed)) bad();
    } else if (key == "recursionKind") {
      if (value == "direct") sc.recursionKind = RecursionKind::Direct;
      else if (value == "indirect") sc.recursionKind = RecursionKind::Indirect;
      else bad();
    } else if (key == "averageSelectivity") {
      try {
        std::size_t used = 0;
        sc.averageSelectivity = std::stod(value, &used);
        if (used != value.size()) bad();
      } catch (const std::exception&) {
        bad();
      }
    } else {
      errors.push_back("unknown-key: " + key + " on line " + std::to_string(lineno));
    }
  }
  if (!errors.empty()) throw IncompatibleScenario(errors);
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

inline std::string print(const Scenario& sc) {
  std::ostringstream out;
  out << "inputOutputSequences=";
  for (std::size_t i = 0; i < sc.inputOutputSequences.size(); ++i)
    out << (i ? "," : "") << sc.inputOutputSequences[i];
  out << "\nnumLinearRules=" << sc.numLinearRules << "\nnumHarmlessJoinRules=" << sc.numHarmlessJoinRules
      << "\nnumHarmlessHarmfulJoinRules=" << sc.numHarmlessHarmfulJoinRules
      << "\nnumHarmfulHarmfulJoinRules=" << sc.numHarmfulHarmfulJoinRules
      << "\nnumExistentialRules=" << sc.numExistentialRules << "\nnumRecursiveRules=" << sc.numRecursiveRules
      << "\nrecursionKind=" << to_string(sc.recursionKind) << "\nnumConditions=" << sc.numConditions;
  char sel[32];
  std::snprintf(sel, sizeof sel, "%.17g", sc.averageSelectivity);
  out << "\naverageSelectivity=" << sel << "\nrecordsPerCsv=" << sc.recordsPerCsv << "\nseed=" << sc.seed << "\n";
  return out.str();
}

}  // namespace wforge::gen
