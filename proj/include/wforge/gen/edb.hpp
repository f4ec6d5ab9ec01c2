#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "wforge/core.hpp"
#include "wforge/gen/generator.hpp"
#include "wforge/gen/rng.hpp"
#include "wforge/gen/scenario.hpp"

namespace wforge::gen {

// Rows of one input relation. Every column holds the m = round(records *
// selectivity) shared values 0..m-1 once each (in shuffled rows) and private
// values elsewhere, so a value drawn from one column appears in any other
// column with probability m / records.
inline std::vector<std::vector<std::string>> edb_rows(const Scenario& sc, std::size_t file, std::size_t arity) {
  Rng rng = Rng::stream(sc.seed, csv_stream(file));
  const std::size_t n = sc.recordsPerCsv, m = std::min(shared_values(sc), n);
  std::vector<std::vector<std::string>> rows(n, std::vector<std::string>(arity));
  for (std::size_t col = 0; col < arity; ++col) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t i = 0; i < n; ++i) {
      // private values are unique to (file, column, row)
      rows[order[i]][col] = i < m ? std::to_string(i)
                                  : std::to_string(n + ((file * arity + col) * n + i));
    }
  }
  return rows;
}

// One CSV per input predicate with its @bind path resolved against dir.
// Returns the written paths in predicate order.
inline std::vector<std::filesystem::path> emit_edb(const Program& p, const Scenario& sc,
                                                   const std::filesystem::path& dir, GenReport* rep = nullptr) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  auto arities = predicate_arities(p);
  std::vector<std::filesystem::path> out;
  std::size_t file = 0;
  for (const auto& [pred, ann] : p.annotations) {
    if (!ann.input) continue;
    std::filesystem::path path = ann.bind ? ann.bind->path : pred + ".csv";
    if (path.is_relative()) path = dir / path;
    auto it = arities.find(pred);
    const std::size_t arity = it == arities.end() ? 2 : it->second;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    for (const auto& row : edb_rows(sc, file++, arity)) {
      for (std::size_t k = 0; k < row.size(); ++k) f << (k ? "," : "") << row[k];
      f << '\n';
    }
    if (!f) throw IoError("write failed for " + path.string());
    out.push_back(path);
  }
  if (out.empty() && rep) rep->warnings.push_back("no input predicates: no CSV written");
  return out;
}

}  // namespace wforge::gen
