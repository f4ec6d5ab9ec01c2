// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "wforge/analysis.hpp"
#include "wforge/chase.hpp"
#include "wforge/core.hpp"
#include "wforge/gen.hpp"
#include "wforge/hje.hpp"
#include "wforge_cli.hpp"

using namespace wforge;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Random compatible scenario with at least one harmful join and at most
// max_total rules.
gen::Scenario harmful_scenario(gen::Rng& r, std::uint64_t seed, std::size_t max_seq, std::size_t max_total) {
  for (;;) {
    gen::Scenario sc;
    sc.seed = seed;
    sc.inputOutputSequences.clear();
    std::size_t total = 0;
    for (std::size_t s = 0, n = 1 + r.below(max_seq); s < n; ++s) {
      std::size_t len = 1 + r.below(max_total);
      if (total + len > max_total) break;
      sc.inputOutputSequences.push_back(len);
      total += len;
    }
    if (total < 2) continue;
    sc.numHarmlessHarmfulJoinRules = r.below(3);
    sc.numHarmfulHarmfulJoinRules = r.below(3);
    // harmless-harmful joins alone are not harmful joins
    if (sc.numHarmfulHarmfulJoinRules == 0) sc.numHarmfulHarmfulJoinRules = 1;
    if (sc.harmful_rules() > total) continue;
    sc.numExistentialRules = 1 + r.below(3);
    sc.numRecursiveRules = r.below(3);
    sc.recursionKind = r.below(2) ? gen::RecursionKind::Direct : gen::RecursionKind::Indirect;
    sc.numConditions = r.below(3);
    std::size_t rest = total - sc.harmful_rules();
    sc.numLinearRules = r.below(rest + 1);
    sc.numHarmlessJoinRules = rest - sc.numLinearRules;
    try {
      gen::validate(sc);
      return sc;
    } catch (const IncompatibleScenario&) {
    }
  }
}

// 1. HJE output is harmless and warded on >= 100 generated scenarios.
Outcome harmlessness() {
  auto t0 = Clock::now();
  gen::Rng r(2024);
  std::size_t ok = 0, n = 0;
  std::string first_failure;
  for (std::uint64_t i = 0; n < 100 && i < 1000; ++i) {
    auto sc = harmful_scenario(r, i, 3, 10);
    auto p = gen::generate(sc).first;
    if (analysis::harmful_joins(p).empty()) continue;
    ++n;
    try {
      auto h = hje::hje(p).first;
      if (analysis::harmful_joins(h).empty() && analysis::is_warded(h).warded) ++ok;
      else if (first_failure.empty()) first_failure = "seed " + std::to_string(i);
    } catch (const Error& e) {
      if (first_failure.empty()) first_failure = "seed " + std::to_string(i) + ": " + e.what();
    }
  }
  double secs = seconds_since(t0);
  std::ostringstream d;
  d << ok << "/" << n << " scenarios harmless and warded after HJE, " << secs << " s (need >= 100, 100%, < 60 s)";
  if (!first_failure.empty()) d << "; first failure " << first_failure;
  return {n >= 100 && ok == n && secs < 60, d.str()};
}

// 2. Sigma and HJE(Sigma) agree on 10 random databases for >= 50 scenarios.
Outcome meaning_preservation() {
  auto t0 = Clock::now();
  gen::Rng r(77);
  std::size_t scenarios = 0, pairs = 0, equal = 0, not_equal = 0, inconclusive = 0, after_retry = 0;
  std::string witness;
  for (std::uint64_t i = 0; scenarios < 60; ++i) {
    auto sc = harmful_scenario(r, 1000 + i, 2, 6);
    auto p = gen::generate(sc).first;
    if (p.rules.size() > 6) continue;
    auto h = hje::hje(p).first;
    ++scenarios;
    for (const auto& db : chase::random_databases(p, 10, i, 6, 20)) {
      ++pairs;
      auto res = chase::compare_on(p, h, db, 10'000);
      if (res.verdict == chase::Verdict::Inconclusive) {
        ++inconclusive;
        res = chase::compare_on(p, h, db, 1'000'000);
        if (res.verdict == chase::Verdict::Inconclusive) ++after_retry;
      }
      if (res.verdict == chase::Verdict::Equal) ++equal;
      if (res.verdict == chase::Verdict::NotEqual) {
        ++not_equal;
        if (witness.empty()) witness = "scenario seed " + std::to_string(1000 + i) + ": " + res.detail;
      }
    }
  }
  double secs = seconds_since(t0);
  std::ostringstream d;
  d << scenarios << " scenarios x 10 databases: equal " << equal << "/" << pairs << ", not_equal " << not_equal
    << ", inconclusive " << inconclusive << " (" << after_retry << " after raising the step bound), " << secs
    << " s (need 0 NotEqual, <= 1% Inconclusive then 0, < 300 s)";
  if (!witness.empty()) d << "; " << witness;
  bool pass = not_equal == 0 && inconclusive * 100 <= pairs && after_retry == 0 && secs < 300;
  return {pass, d.str()};
}

// Prefix-tree oracle over the enumerated cause sequences: one node per
// distinct nonempty prefix, one fold check per ancestor of each node.
std::pair<std::size_t, std::size_t> prefix_oracle(const analysis::DhMdh& d) {
  std::set<std::vector<std::string>> prefixes;
  for (const auto& c : d.candidates)
    for (std::size_t k = 1; k <= c.sequence.size(); ++k)
      prefixes.emplace(c.sequence.begin(), c.sequence.begin() + static_cast<long>(k));
  std::size_t nodes = 0, folds = 0;
  for (const auto& p : prefixes) {
    ++nodes;
    folds += p.size();
  }
  return {nodes, folds};
}

// 3. Tree size bounds on the k,d family, exact counts at k = d = 2.
Outcome tree_bounds() {
  bool pass = true;
  std::ostringstream d;
  for (int k = 1; k <= 3; ++k)
    for (int dd = 1; dd <= 3; ++dd) {
      Program p = parse(fixtures::kd_family(k, dd));
      const Rule& rho = *p.find_rule("rho");
      auto t = hje::back_composition(p, rho);
      auto dm = analysis::dh_mdh(p, rho);
      const std::size_t s = dm.candidates.size(), h = dm.mdh;
      bool ok = t.num_nodes <= s * h && t.num_folds <= s * h * (h + 1) / 2;
      if (k == 2 && dd == 2) {
        auto [nodes, folds] = prefix_oracle(dm);
        ok = ok && t.num_nodes == nodes && t.num_folds == folds;
        d << "k=d=2 nodes " << t.num_nodes << "/" << nodes << " folds " << t.num_folds << "/" << folds << "; ";
      }
      if (!ok) d << "violated at k=" << k << " d=" << dd << " (nodes " << t.num_nodes << ", folds " << t.num_folds
                 << ", s " << s << ", h " << h << "); ";
      pass = pass && ok;
    }
  d << "9 (k,d) pairs checked against s*h and s*h(h+1)/2 (tolerance exact)";
  return {pass, d.str()};
}

// 4. Folding closes the recursive scenario; without folding the budget is exceeded.
Outcome folding_termination() {
  Program p = parse(fixtures::kRecursiveBeta);
  const Rule& rho = *p.find_rule("rho");
  auto t = hje::back_composition(p, rho);
  auto dm = analysis::dh_mdh(p, rho);
  const std::size_t bound = dm.candidates.size() * (dm.mdh + 1);
  bool runaway = false;
  hje::HJEOptions off;
  off.folding = false;
  off.node_budget = 10'000;
  try {
    hje::back_composition(p, rho, off);
  } catch (const NonTerminating&) {
    runaway = true;
  }
  std::ostringstream d;
  d << "fold edges " << t.fold_edges.size() << ", nodes " << t.num_nodes << " <= " << bound
    << ", without folding " << (runaway ? "exceeds" : "stays within") << " the 10000-node budget";
  return {!t.fold_edges.empty() && t.num_nodes <= bound && runaway, d.str()};
}

// 5. Worked example: Gamma = [s1, s1, s2], dh = mdh = 3.
Outcome dh_fidelity() {
  Program p = parse(fixtures::kHuBranch);
  auto dm = analysis::dh_mdh(p, *p.find_rule("rho"));
  bool ok = dm.candidates.size() == 1 && dm.mdh == 3 && dm.candidates[0].dh() == 3 &&
            dm.candidates[0].multiset() == std::vector<std::string>{"s1", "s1", "s2"};
  std::ostringstream d;
  d << "candidates " << dm.candidates.size() << ", mdh " << dm.mdh << ", gamma [";
  if (!dm.candidates.empty())
    for (std::size_t i = 0; i < dm.candidates[0].sequence.size(); ++i)
      d << (i ? "," : "") << dm.candidates[0].multiset()[i];
  d << "] (expected [s1,s1,s2], 3)";
  return {ok, d.str()};
}

gen::Scenario grid_scenario(std::size_t len, std::size_t harm, int rec, std::uint64_t seed) {
  gen::Scenario sc;
  const std::size_t total = 2 * len;
  sc.inputOutputSequences = {len, len};
  sc.numHarmlessHarmfulJoinRules = harm / 2;
  sc.numHarmfulHarmfulJoinRules = harm - harm / 2;
  sc.numLinearRules = (total - harm) / 2;
  sc.numHarmlessJoinRules = total - harm - sc.numLinearRules;
  sc.numExistentialRules = harm ? 2 : 1;
  sc.numRecursiveRules = rec ? 2 : 0;
  sc.recursionKind = rec == 2 ? gen::RecursionKind::Indirect : gen::RecursionKind::Direct;
  sc.numConditions = 3;
  sc.seed = seed;
  return sc;
}

// 6. Structural counts equal the request over a 3x3x3 grid; polynomial time in n.
Outcome generator_fidelity() {
  std::size_t exact = 0, total = 0;
  for (std::size_t len : {5, 10, 20})
    for (std::size_t harm : {0, 2, 4})
      for (int rec = 0; rec < 3; ++rec) {
        auto sc = grid_scenario(len, harm, rec, len * 100 + harm * 10 + static_cast<std::uint64_t>(rec));
        auto [p, rep] = gen::generate(sc, false);
        ++total;
        exact += gen::fidelity_mismatches(p, rep).empty();
      }
  auto timed = [](std::size_t n) {
    gen::Scenario sc;
    sc.inputOutputSequences = {n};
    sc.numHarmfulHarmfulJoinRules = n / 10;
    sc.numHarmlessHarmfulJoinRules = n / 10;
    sc.numLinearRules = (n - n / 5) / 2;
    sc.numHarmlessJoinRules = n - n / 5 - sc.numLinearRules;
    sc.numExistentialRules = n / 10;
    sc.numRecursiveRules = n / 10;
    sc.numConditions = n / 10;
    sc.seed = 5;
    double best = 1e9;
    for (int trial = 0; trial < 5; ++trial) {
      auto t0 = Clock::now();
      for (int i = 0; i < 5; ++i) gen::generate(sc, false);
      best = std::min(best, seconds_since(t0));
    }
    return best;
  };
  timed(100);
  double t100 = timed(100), t200 = timed(200), t400 = timed(400);
  double r1 = t200 / t100, r2 = t400 / t200;
  std::ostringstream d;
  d << exact << "/" << total << " grid scenarios exact; time ratio 200/100 " << r1 << ", 400/200 " << r2
    << " (need 100%, ratios <= 8)";
  return {exact == total && r1 <= 8 && r2 <= 8, d.str()};
}

std::map<std::string, std::string> file_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = cli::read_file(e.path());
  return out;
}

// 7. Two pipeline runs with one seed produce identical artifacts.
Outcome determinism() {
  auto base = fs::temp_directory_path() / "wforge_acceptance_determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  gen::Scenario sc = grid_scenario(4, 2, 2, 99);
  sc.recordsPerCsv = 200;
  sc.averageSelectivity = 0.3;
  cli::write_file(base / "s.cfg", gen::print(sc));
  std::ostringstream sink;
  std::vector<int> codes;
  for (const char* run : {"a", "b"}) {
    std::string out = (base / run).string(), cfg = (base / "s.cfg").string();
    const char* argv[] = {"wforge", "pipeline", "--scenario", cfg.c_str(), "--out", out.c_str(), "--seed", "11", "--trace"};
    codes.push_back(cli::run(9, argv, sink, sink));
  }
  auto a = file_tree(base / "a"), b = file_tree(base / "b");
  std::size_t csv = 0;
  for (const auto& [name, body] : a) csv += name.ends_with(".csv");
  bool same = a == b && a.contains("program.vada") && a.contains("normalized.vada") && csv > 0;
  std::ostringstream d;
  d << a.size() << " artifacts (" << csv << " CSV) " << (same ? "byte-identical" : "differ") << " across two runs"
    << ", pipeline exit codes " << codes[0] << "," << codes[1];
  return {same, d.str()};
}

// 8. Chase fixpoint equals naive bottom-up evaluation on 20 Datalog programs.
Outcome chase_self_check() {
  std::mt19937_64 rng(8);
  std::size_t agree = 0;
  for (int i = 0; i < 20; ++i) {
    Program p = fixtures::random_datalog(rng);
    std::mt19937_64 dr(static_cast<std::uint64_t>(100 + i));
    auto db = chase::random_database(p, dr);
    std::map<std::string, fixtures::Tuples> edb;
    auto rows = [](const chase::ChaseInstance& inst, const std::string& pred) {
      fixtures::Tuples out;
      for (const auto& t : inst.relation(pred)) {
        std::vector<std::string> row;
        for (const auto& x : t) row.push_back(x.name);
        out.insert(row);
      }
      return out;
    };
    for (const char* pred : {"e", "g", "t", "u"}) edb[pred] = rows(db, pred);
    auto expect = fixtures::naive_eval(p, edb);
    auto res = chase::chase(p, db);
    bool same = res.completed;
    for (const char* pred : {"e", "g", "t", "u"}) same = same && rows(res.instance, pred) == expect[pred];
    agree += same;
  }
  return {agree == 20, std::to_string(agree) + "/20 programs match naive evaluation exactly"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"harmlessness", harmlessness},
      {"meaning-preservation", meaning_preservation},
      {"tree-bounds", tree_bounds},
      {"folding-termination", folding_termination},
      {"dh-mdh", dh_fidelity},
      {"generator-fidelity", generator_fidelity},
      {"determinism", determinism},
      {"chase-self-check", chase_self_check},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
