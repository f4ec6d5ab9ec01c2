#pragma once

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wforge/analysis.hpp"
#include "wforge/chase.hpp"
#include "wforge/core.hpp"
#include "wforge/gen.hpp"
#include "wforge/hje.hpp"

namespace wforge::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
  if (!out) throw IoError("write failed for " + p.string());
}

inline void ensure_dir(const fs::path& d) {
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw IoError("cannot create " + d.string() + ": " + ec.message());
}

inline Program load_program(const fs::path& p) {
  Program prog = parse(read_file(p));
  validate(prog);
  return prog;
}

// ---- JSON views -------------------------------------------------------------

inline json to_json(const analysis::StructuralCounts& c) {
  return json{{"rules", c.rules},
              {"linear", c.linear},
              {"harmless_joins", c.harmless_joins},
              {"harmless_harmful_joins", c.harmless_harmful_joins},
              {"harmful_harmful_joins", c.harmful_harmful_joins},
              {"existential", c.existential},
              {"recursive_direct", c.recursive_direct},
              {"recursive_indirect", c.recursive_indirect},
              {"conditions", c.conditions}};
}

inline std::string position_name(const analysis::Position& p) {
  return p.predicate + "[" + std::to_string(p.index) + "]";
}

inline json to_json(const analysis::AffectednessReport& rep) {
  json j;
  j["affected"] = json::array();
  for (const auto& p : rep.affected) j["affected"].push_back(position_name(p));
  json classes = json::object();
  for (const auto& [key, cls] : rep.classes) classes[key.first][key.second] = analysis::to_string(cls);
  j["classes"] = classes;
  j["harmful_joins"] = json::array();
  for (const auto& h : rep.harmful_joins)
    j["harmful_joins"].push_back({{"rule", h.rule}, {"variable", h.variable}, {"atoms", h.atoms}});
  j["warded"] = rep.wardedness.warded;
  j["ward_violations"] = json::array();
  for (const auto& v : rep.wardedness.violations)
    j["ward_violations"].push_back({{"rule", v.rule}, {"variable", v.variable}, {"reason", v.reason}});
  json causes = json::array();
  for (const auto& [ref, edges] : rep.causes.edges) {
    json e = json::array();
    for (const auto& c : edges) e.push_back({{"rule", c.rule}, {"kind", c.direct ? "direct" : "indirect"}});
    causes.push_back({{"rule", ref.rule}, {"atom", ref.atom}, {"causes", e}});
  }
  j["causes"] = causes;
  j["harmful_rules"] = json::array();
  for (const auto& h : rep.per_harmful_rule) {
    json cands = json::array();
    for (const auto& c : h.dh.candidates) cands.push_back({{"gamma", c.sequence}, {"dh", c.dh()}});
    j["harmful_rules"].push_back({{"rule", h.rule}, {"join_vars", h.join_vars}, {"mdh", h.dh.mdh}, {"candidates", cands}});
  }
  j["counts"] = to_json(rep.counts);
  return j;
}

inline json to_json(const gen::GenReport& rep) {
  json j;
  j["requested"] = to_json(rep.requested);
  j["iterations"] = rep.iterations;
  j["decisions"] = rep.decisions;
  j["warnings"] = rep.warnings;
  j["edb"] = json::object();
  for (const auto& [pred, arity] : rep.edb_arities) j["edb"][pred] = arity;
  j["rules"] = json::array();
  for (const auto& d : rep.rules)
    j["rules"].push_back({{"rule", d.rule},
                          {"sequence", d.sequence},
                          {"position", d.position},
                          {"type", gen::to_string(d.type)},
                          {"existential", d.existential},
                          {"recursion", d.recursion},
                          {"propagate", d.propagate},
                          {"conditions", d.conditions},
                          {"head", d.head}});
  return j;
}

inline std::string trace_text(const hje::NormalizationTrace& t) {
  std::string out = "rounds " + std::to_string(t.rounds) + "\nnodes " + std::to_string(t.num_nodes) + "\nfolds " +
                    std::to_string(t.num_folds) + "\n";
  for (const auto& tree : t.trees) {
    out += "tree " + print(tree.root) + " nodes " + std::to_string(tree.num_nodes) + " folds " +
           std::to_string(tree.num_folds) + " fold_edges " + std::to_string(tree.fold_edges.size()) + " leaves " +
           std::to_string(tree.leaves.size()) + "\n";
  }
  for (const auto& line : t.log) out += line + "\n";
  return out;
}

// ---- verification -------------------------------------------------------------

struct VerifyOutcome {
  std::vector<chase::EquivalenceResult> results;
  std::size_t equal = 0, not_equal = 0, inconclusive = 0, retried = 0;
  bool pass() const { return not_equal == 0 && inconclusive == 0; }
};

// Databases are compared in parallel; an Inconclusive comparison is retried
// once with ten times the step bound.
inline VerifyOutcome verify(const Program& left, const Program& right, const std::vector<chase::ChaseInstance>& dbs,
                            std::size_t step_bound) {
  VerifyOutcome v;
  v.results.resize(dbs.size());
  std::vector<bool> retried(dbs.size(), false);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(dbs.size(), std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < dbs.size(); i += workers) {
        auto r = chase::compare_on(left, right, dbs[i], step_bound);
        if (r.verdict == chase::Verdict::Inconclusive) {
          r = chase::compare_on(left, right, dbs[i], step_bound * 10);
          retried[i] = true;
        }
        v.results[i] = std::move(r);
      }
    });
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < dbs.size(); ++i) {
    v.retried += retried[i];
    switch (v.results[i].verdict) {
      case chase::Verdict::Equal: ++v.equal; break;
      case chase::Verdict::NotEqual: ++v.not_equal; break;
      case chase::Verdict::Inconclusive: ++v.inconclusive; break;
    }
  }
  return v;
}

inline std::string verify_text(const VerifyOutcome& v) {
  std::string out;
  for (std::size_t i = 0; i < v.results.size(); ++i) {
    const auto& r = v.results[i];
    out += "db " + std::to_string(i) + " " + chase::to_string(r.verdict) + " left " + std::to_string(r.left_facts) +
           " right " + std::to_string(r.right_facts);
    if (!r.detail.empty()) out += " : " + r.detail;
    out += "\n";
  }
  out += "equal " + std::to_string(v.equal) + " not_equal " + std::to_string(v.not_equal) + " inconclusive " +
         std::to_string(v.inconclusive) + " retried " + std::to_string(v.retried) + "\n";
  return out;
}

// ---- output ---------------------------------------------------------------------

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool color = false;

  std::string paint(const std::string& text, bool good) const {
    if (!color) return text;
    return std::string(good ? "\033[32m" : "\033[31m") + text + "\033[0m";
  }
};

inline bool color_enabled(const std::ostream& out) {
  const char* env = std::getenv("WFORGE_COLOR");
  if (env && std::string(env) == "0") return false;
  return &out == &std::cout && isatty(STDOUT_FILENO);
}

struct Options {
  std::string scenario, out_dir, program, left, right, data;
  std::optional<std::uint64_t> seed;
  std::size_t step_bound = 10'000;
  std::size_t databases = 10;
  bool trace = false;
};

inline gen::Scenario load_scenario_with_seed(const Options& o) {
  auto sc = gen::load_scenario(o.scenario);
  if (o.seed) sc.seed = *o.seed;
  return sc;
}

// generate: scenario -> program.vada, CSVs, generation.json
inline std::pair<Program, gen::GenReport> do_generate(const Options& o, const fs::path& dir) {
  auto sc = load_scenario_with_seed(o);
  auto [p, rep] = gen::generate(sc);
  ensure_dir(dir);
  write_file(dir / "scenario.cfg", gen::print(sc));
  write_file(dir / "program.vada", print(p));
  gen::emit_edb(p, sc, dir, &rep);
  write_file(dir / "generation.json", to_json(rep).dump(2) + "\n");
  return {std::move(p), std::move(rep)};
}

inline int cmd_generate(const Options& o, Context& cx) {
  auto [p, rep] = do_generate(o, o.out_dir);
  cx.out << "generated " << p.rules.size() << " rules into " << o.out_dir << "\n";
  for (const auto& w : rep.warnings) cx.err << "warning: " << w << "\n";
  return 0;
}

inline int cmd_analyze(const Options& o, Context& cx) {
  Program p = load_program(o.program);
  std::string text = to_json(analysis::analyze(p)).dump(2) + "\n";
  if (o.out_dir.empty()) {
    cx.out << text;
  } else {
    ensure_dir(o.out_dir);
    write_file(fs::path(o.out_dir) / "analysis.json", text);
  }
  return 0;
}

inline int cmd_normalize(const Options& o, Context& cx) {
  Program p = load_program(o.program);
  auto [h, trace] = hje::hje(p);
  if (o.out_dir.empty()) {
    cx.out << print(h);
    if (o.trace) cx.err << trace_text(trace);
  } else {
    ensure_dir(o.out_dir);
    write_file(fs::path(o.out_dir) / "normalized.vada", print(h));
    if (o.trace) write_file(fs::path(o.out_dir) / "trace.txt", trace_text(trace));
  }
  return 0;
}

inline int cmd_chase(const Options& o, Context& cx) {
  Program p = load_program(o.program);
  fs::path data = o.data.empty() ? fs::path(o.program).parent_path() : fs::path(o.data);
  auto edb = chase::load_edb(p, data);
  auto res = chase::chase(p, edb, o.step_bound);
  std::set<std::string> outputs;
  for (const auto& [pred, ann] : p.annotations)
    if (ann.output) outputs.insert(pred);
  std::size_t shown = 0;
  for (const auto& f : res.instance.facts)
    if (outputs.empty() || outputs.contains(f.predicate)) {
      cx.out << print(f) << ".\n";
      ++shown;
    }
  cx.out << "# facts " << res.instance.facts.size() << " shown " << shown << " fired " << res.fired << " completed "
         << (res.completed ? "yes" : "no") << "\n";
  return res.completed ? 0 : 1;
}

inline int cmd_verify(const Options& o, Context& cx) {
  Program l = load_program(o.left), r = load_program(o.right);
  auto dbs = chase::random_databases(l, o.databases, o.seed.value_or(0));
  auto v = verify(l, r, dbs, o.step_bound);
  cx.out << verify_text(v) << cx.paint(v.pass() ? "PASS" : "FAIL", v.pass()) << "\n";
  return v.pass() ? 0 : 1;
}

// generate -> analyze -> normalize -> analyze -> verify
inline int cmd_pipeline(const Options& o, Context& cx) {
  const fs::path dir = o.out_dir;
  auto [p, rep] = do_generate(o, dir);
  auto before = analysis::analyze(p);
  write_file(dir / "analysis.json", to_json(before).dump(2) + "\n");
  auto [h, trace] = hje::hje(p);
  write_file(dir / "normalized.vada", print(h));
  if (o.trace) write_file(dir / "trace.txt", trace_text(trace));
  auto after = analysis::analyze(h);
  write_file(dir / "normalized_analysis.json", to_json(after).dump(2) + "\n");
  auto dbs = chase::random_databases(p, o.databases, rep.scenario.seed);
  auto v = verify(p, h, dbs, o.step_bound);
  write_file(dir / "verify.txt", verify_text(v));

  const auto mismatches = gen::fidelity_mismatches(p, rep);
  const bool harmless = after.harmful_joins.empty();
  const bool warded = after.wardedness.warded;
  const bool pass = harmless && warded && v.pass() && mismatches.empty();

  json counters;
  counters["requested"] = to_json(rep.requested);
  counters["measured"] = to_json(before.counts);
  counters["harmful_joins_before"] = before.harmful_joins.size();
  counters["harmful_joins_after"] = after.harmful_joins.size();
  counters["warded_after"] = warded;
  json mdh = json::object();
  for (const auto& hr : before.per_harmful_rule) mdh[hr.rule] = hr.dh.mdh;
  counters["mdh"] = mdh;
  counters["num_nodes"] = trace.num_nodes;
  counters["num_folds"] = trace.num_folds;
  counters["rounds"] = trace.rounds;
  counters["rules_after"] = h.rules.size();
  counters["verify"] = {{"databases", dbs.size()},
                        {"equal", v.equal},
                        {"not_equal", v.not_equal},
                        {"inconclusive", v.inconclusive},
                        {"retried", v.retried}};
  counters["pass"] = pass;
  write_file(dir / "counters.json", counters.dump(2) + "\n");

  std::ostringstream s;
  s << "rules " << p.rules.size() << " -> " << h.rules.size() << "\n";
  s << "fidelity " << (mismatches.empty() ? "exact" : "mismatch") << "\n";
  for (const auto& m : mismatches) s << "  " << m << "\n";
  s << "harmful joins " << before.harmful_joins.size() << " -> " << after.harmful_joins.size() << "\n";
  for (const auto& hr : before.per_harmful_rule) s << "  " << hr.rule << " mdh " << hr.dh.mdh << "\n";
  s << "hje nodes " << trace.num_nodes << " folds " << trace.num_folds << " rounds " << trace.rounds << "\n";
  s << "warded after " << (warded ? "yes" : "no") << "\n";
  s << "verify equal " << v.equal << " not_equal " << v.not_equal << " inconclusive " << v.inconclusive << "\n";
  s << "result " << (pass ? "PASS" : "FAIL") << "\n";
  write_file(dir / "summary.txt", s.str());
  std::string text = s.str();
  text.erase(text.rfind("result "));
  cx.out << text << "result " << cx.paint(pass ? "PASS" : "FAIL", pass) << "\n";
  return pass ? 0 : 1;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Context cx{out, err, color_enabled(out)};
  Options o;
  CLI::App app{"Warded Datalog± benchmark generator, analyzer and normalizer", "wforge"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto* generate = app.add_subcommand("generate", "generate a program and its CSV data from a scenario");
  generate->add_option("--scenario", o.scenario, "scenario file (key=value)")->required()->check(CLI::ExistingFile);
  generate->add_option("--out", o.out_dir, "output directory")->required();
  generate->add_option("--seed", o.seed, "override the scenario seed");

  auto* analyze = app.add_subcommand("analyze", "affectedness, wardedness, harmful joins and dh/mdh as JSON");
  analyze->add_option("program", o.program, "program file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--out", o.out_dir, "write analysis.json here instead of stdout");

  auto* normalize = app.add_subcommand("normalize", "remove harmful joins");
  normalize->add_option("program", o.program, "program file")->required()->check(CLI::ExistingFile);
  normalize->add_option("--out", o.out_dir, "write normalized.vada here instead of stdout");
  normalize->add_flag("--trace", o.trace, "report tree sizes and the normalization log");

  auto* chase_cmd = app.add_subcommand("chase", "run the restricted chase over the bound CSV data");
  chase_cmd->add_option("program", o.program, "program file")->required()->check(CLI::ExistingFile);
  chase_cmd->add_option("--data", o.data, "directory for relative @bind paths (default: program directory)");
  chase_cmd->add_option("--step-bound", o.step_bound, "maximum rule firings");

  auto* verify_cmd = app.add_subcommand("verify", "compare two programs on random databases");
  verify_cmd->add_option("left", o.left, "program file")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("right", o.right, "program file")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--databases", o.databases, "number of random databases")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", o.seed, "database seed");
  verify_cmd->add_option("--step-bound", o.step_bound, "maximum rule firings per chase");

  auto* pipeline = app.add_subcommand("pipeline", "generate, analyze, normalize, analyze and verify");
  pipeline->add_option("--scenario", o.scenario, "scenario file (key=value)")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--out", o.out_dir, "output directory")->required();
  pipeline->add_option("--seed", o.seed, "override the scenario seed");
  pipeline->add_option("--databases", o.databases, "number of random databases")->check(CLI::PositiveNumber);
  pipeline->add_option("--step-bound", o.step_bound, "maximum rule firings per chase");
  pipeline->add_flag("--trace", o.trace, "also write trace.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generate) return cmd_generate(o, cx);
    if (*analyze) return cmd_analyze(o, cx);
    if (*normalize) return cmd_normalize(o, cx);
    if (*chase_cmd) return cmd_chase(o, cx);
    if (*verify_cmd) return cmd_verify(o, cx);
    if (*pipeline) return cmd_pipeline(o, cx);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace wforge::cli
