#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wforge/analysis.hpp"
#include "wforge/core.hpp"
#include "wforge/gen/rng.hpp"
#include "wforge/gen/scenario.hpp"

namespace wforge::gen {

enum class RuleType { Linear, HarmlessJoin, HarmlessHarmfulJoin, HarmfulHarmfulJoin };

inline const char* to_string(RuleType t) {
  switch (t) {
    case RuleType::Linear: return "linear";
    case RuleType::HarmlessJoin: return "harmless-join";
    case RuleType::HarmlessHarmfulJoin: return "harmless-harmful-join";
    case RuleType::HarmfulHarmfulJoin: return "harmful-harmful-join";
  }
  return "?";
}

inline bool is_harmful(RuleType t) {
  return t == RuleType::HarmlessHarmfulJoin || t == RuleType::HarmfulHarmfulJoin;
}

// What the planner decided for one position of one sequence.
struct SlotPlan {
  std::optional<RuleType> type;
  bool existential = false;
  bool direct = false;     // head predicate = cursor predicate
  int cycle = -1;          // indirect cycle id
  bool cycle_start = false;
  bool back_edge = false;  // closes its cycle onto the cycle's first cursor
  bool propagate = false;  // keep the cursor's affected position affected
  std::size_t conditions = 0;
};

using Plan = std::vector<std::vector<SlotPlan>>;

struct RuleDecision {
  std::string rule;
  std::size_t sequence = 0;
  std::size_t position = 0;
  RuleType type = RuleType::Linear;
  bool existential = false;
  std::string recursion = "none";
  bool propagate = false;
  std::size_t conditions = 0;
  std::string head;
};

struct GenReport {
  Scenario scenario;
  analysis::StructuralCounts requested;
  std::vector<RuleDecision> rules;
  std::vector<std::string> decisions;
  std::vector<std::string> warnings;
  std::map<std::string, std::size_t> edb_arities;
  std::size_t iterations = 0;
};

inline analysis::StructuralCounts requested_counts(const Scenario& sc) {
  analysis::StructuralCounts c;
  c.rules = sc.total_rules();
  c.linear = sc.numLinearRules;
  c.harmless_joins = sc.numHarmlessJoinRules;
  c.harmless_harmful_joins = sc.numHarmlessHarmfulJoinRules;
  c.harmful_harmful_joins = sc.numHarmfulHarmfulJoinRules;
  c.existential = sc.numExistentialRules;
  c.recursive_direct = sc.recursionKind == RecursionKind::Direct ? sc.numRecursiveRules : 0;
  c.recursive_indirect = sc.recursionKind == RecursionKind::Indirect ? sc.numRecursiveRules : 0;
  c.conditions = sc.numConditions;
  return c;
}

// Number of distinct join constants in emitted CSV columns.
inline std::size_t shared_values(const Scenario& sc) {
  auto m = static_cast<std::size_t>(std::llround(static_cast<double>(sc.recordsPerCsv) * sc.averageSelectivity));
  return std::max<std::size_t>(1, m);
}

namespace detail {

inline std::vector<std::string> static_violations(const Scenario& sc) {
  std::vector<std::string> v;
  const std::size_t total = sc.total_rules();
  std::size_t nonempty = 0, tails = 0;
  for (auto l : sc.inputOutputSequences) {
    if (l > 0) ++nonempty;
    if (l > 0) tails += l - 1;
  }
  if (sc.inputOutputSequences.empty()) v.push_back("sequences: inputOutputSequences is empty");
  if (sc.typed_rules() != total)
    v.push_back("rule-type-sum: linear + join counts = " + std::to_string(sc.typed_rules()) +
                " but sequence lengths sum to " + std::to_string(total));
  if (!(sc.averageSelectivity > 0.0 && sc.averageSelectivity <= 1.0))
    v.push_back("selectivity: averageSelectivity must be in (0,1]");
  if (sc.recordsPerCsv < 1) v.push_back("records: recordsPerCsv must be at least 1");
  if (sc.harmful_rules() > 0 && sc.numExistentialRules == 0)
    v.push_back("harm-source: harmful joins need at least one existential rule");
  if (sc.numExistentialRules + sc.numRecursiveRules > total)
    v.push_back("existential-recursive: recursive rules carry no existentials, so existential + recursive <= " +
                std::to_string(total));
  if (sc.numLinearRules + sc.numHarmlessJoinRules < nonempty && sc.typed_rules() == total)
    v.push_back("sequence-start: each of the " + std::to_string(nonempty) +
                " nonempty sequences starts with a linear or harmless join rule");
  if (sc.harmful_rules() > tails) v.push_back("harmful-slots: harmful joins cannot start a sequence");
  if (sc.numRecursiveRules > tails) v.push_back("recursive-slots: recursive rules cannot start a sequence");
  if (sc.recursionKind == RecursionKind::Indirect && sc.numRecursiveRules == 1)
    v.push_back("indirect-cycle: an indirect cycle involves at least two rules");
  if (sc.numConditions > 0 && total == 0) v.push_back("conditions: no rule to attach conditions to");
  return v;
}

// Indirect cycles as consecutive blocks of 2 (and one of 3 for odd counts),
// starting at position 1 or later.
inline bool place_cycles(const Scenario& sc, Plan& plan, Rng& rng, std::vector<std::string>& log) {
  std::size_t r = sc.numRecursiveRules;
  std::vector<std::size_t> blocks;
  if (r % 2 == 1) {
    blocks.push_back(3);
    r -= 3;
  }
  for (; r > 0; r -= 2) blocks.push_back(2);
  std::vector<std::size_t> order(plan.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<std::size_t> next(plan.size(), 1);
  int id = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::size_t len = blocks[b];
    std::optional<std::size_t> chosen;
    for (auto s : order) {
      std::size_t room = plan[s].size() > next[s] ? plan[s].size() - next[s] : 0;
      if (room < len) continue;
      // the 3-block prefers an odd run so no slot is wasted
      if (len == 3 && !chosen) chosen = s;
      if (len == 3 && room % 2 == 1) {
        chosen = s;
        break;
      }
      if (len == 2) {
        chosen = s;
        break;
      }
    }
    if (!chosen) return false;
    const std::size_t s = *chosen;
    for (std::size_t k = 0; k < len; ++k) {
      auto& slot = plan[s][next[s] + k];
      slot.cycle = id;
      slot.cycle_start = k == 0;
      slot.back_edge = k + 1 == len;
    }
    log.push_back("cycle " + std::to_string(id) + ": sequence " + std::to_string(s + 1) + " positions " +
                  std::to_string(next[s] + 1) + ".." + std::to_string(next[s] + len));
    next[s] += len;
    ++id;
  }
  return true;
}

}  // namespace detail

// Places rule types, existentials, recursion and conditions on sequence
// positions. Throws IncompatibleScenario listing every violated constraint.
inline Plan make_plan(const Scenario& sc, std::vector<std::string>* log_out = nullptr) {
  auto violations = detail::static_violations(sc);
  if (!violations.empty()) throw IncompatibleScenario(violations);

  std::vector<std::string> log;
  Rng rng = Rng::stream(sc.seed, kPlanStream);
  Plan plan;
  for (auto l : sc.inputOutputSequences) plan.emplace_back(l);

  std::size_t linear = sc.numLinearRules, harmless = sc.numHarmlessJoinRules;
  auto take_plain = [&]() {
    bool lin = rng.below(linear + harmless) < linear;
    --(lin ? linear : harmless);
    return lin ? RuleType::Linear : RuleType::HarmlessJoin;
  };

  // sequence starts
  for (auto& seq : plan)
    if (!seq.empty()) seq[0].type = take_plain();

  // recursion
  if (sc.numRecursiveRules > 0) {
    if (sc.recursionKind == RecursionKind::Direct) {
      std::vector<std::pair<std::size_t, std::size_t>> cand;
      for (std::size_t s = 0; s < plan.size(); ++s)
        for (std::size_t i = 1; i < plan[s].size(); ++i) cand.emplace_back(s, i);
      rng.shuffle(cand);
      for (std::size_t k = 0; k < sc.numRecursiveRules; ++k) plan[cand[k].first][cand[k].second].direct = true;
    } else if (!detail::place_cycles(sc, plan, rng, log)) {
      violations.push_back("recursion-placement: " + std::to_string(sc.numRecursiveRules) +
                           " indirect recursive rules do not fit in blocks of 2 or 3 after sequence starts");
    }
  }

  // harmful joins go to sequences opened by an existential rule
  const std::size_t harmful = sc.harmful_rules();
  std::size_t hosts = 0;
  if (harmful > 0) {
    std::vector<std::size_t> order(plan.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return plan[a].size() > plan[b].size(); });
    std::vector<std::pair<std::size_t, std::size_t>> cand;
    for (auto s : order) {
      if (cand.size() >= harmful || plan[s].size() < 2) break;
      plan[s][0].existential = true;
      ++hosts;
      for (std::size_t i = 1; i < plan[s].size(); ++i) cand.emplace_back(s, i);
    }
    if (hosts > sc.numExistentialRules)
      violations.push_back("harm-source: " + std::to_string(harmful) + " harmful joins need " + std::to_string(hosts) +
                           " sequences opened by an existential rule, only " +
                           std::to_string(sc.numExistentialRules) + " existential rules requested");
    std::vector<RuleType> kinds(sc.numHarmlessHarmfulJoinRules, RuleType::HarmlessHarmfulJoin);
    kinds.insert(kinds.end(), sc.numHarmfulHarmfulJoinRules, RuleType::HarmfulHarmfulJoin);
    rng.shuffle(kinds);
    rng.shuffle(cand);
    for (std::size_t k = 0; k < harmful && k < cand.size(); ++k) plan[cand[k].first][cand[k].second].type = kinds[k];
  }
  if (!violations.empty()) throw IncompatibleScenario(violations);

  // remaining linear / harmless join rules
  for (auto& seq : plan)
    for (auto& slot : seq)
      if (!slot.type) slot.type = take_plain();

  // remaining existentials on non-recursive positions
  std::vector<std::pair<std::size_t, std::size_t>> free;
  for (std::size_t s = 0; s < plan.size(); ++s)
    for (std::size_t i = 0; i < plan[s].size(); ++i) {
      const auto& slot = plan[s][i];
      if (!slot.existential && !slot.direct && slot.cycle < 0) free.emplace_back(s, i);
    }
  rng.shuffle(free);
  for (std::size_t k = 0; k < sc.numExistentialRules - hosts; ++k) plan[free[k].first][free[k].second].existential = true;

  // conditions
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t s = 0; s < plan.size(); ++s)
    for (std::size_t i = 0; i < plan[s].size(); ++i) all.emplace_back(s, i);
  for (std::size_t k = 0; k < sc.numConditions; ++k) {
    auto [s, i] = rng.pick(all);
    ++plan[s][i].conditions;
  }

  // keep the cursor affected while a later harmful join still needs it
  for (auto& seq : plan) {
    bool later = false;
    for (std::size_t i = seq.size(); i-- > 0;) {
      seq[i].propagate = later;
      later = later || is_harmful(*seq[i].type);
    }
  }
  if (log_out) *log_out = std::move(log);
  return plan;
}

// Returns the scenario unchanged if it is compatible.
inline Scenario validate(const Scenario& sc) {
  make_plan(sc);
  return sc;
}

namespace detail {

struct Pred {
  std::string name;
  std::size_t arity = 2;
  bool charged = false;  // position 2 affected
};

inline Atom atom(const std::string& pred, std::initializer_list<std::string> vars, std::size_t arity) {
  Atom a{pred, {}};
  for (const auto& v : vars)
    if (a.terms.size() < arity) a.terms.push_back(Term::var(v));
  return a;
}

}  // namespace detail

inline std::vector<std::string> fidelity_mismatches(const Program& p, const GenReport& rep);

// Builds the program of a validated scenario; rules are emitted round-robin
// over the sequences that still have rules to generate. With self_check the
// result is re-analyzed and any count mismatch raises GenerationStuck.
inline std::pair<Program, GenReport> generate(const Scenario& sc, bool self_check = true) {
  GenReport rep;
  rep.scenario = sc;
  rep.requested = requested_counts(sc);
  Plan plan = make_plan(sc, &rep.decisions);
  const std::size_t nconst = shared_values(sc);

  const std::size_t nseq = plan.size();
  std::vector<Rng> rngs;
  std::vector<detail::Pred> cursor(nseq), cycle_target(nseq);
  std::vector<std::size_t> pos(nseq, 0);
  Program p;
  for (std::size_t s = 0; s < nseq; ++s) {
    rngs.push_back(Rng::stream(sc.seed, sequence_stream(s)));
    cursor[s] = {"e" + std::to_string(s + 1), 2, false};
    auto& ann = p.annotations[cursor[s].name];
    ann.input = true;
    ann.bind = Binding{"csv", cursor[s].name + ".csv"};
    rep.edb_arities[cursor[s].name] = 2;
  }

  std::vector<std::size_t> active;
  for (std::size_t s = 0; s < nseq; ++s)
    if (!plan[s].empty()) active.push_back(s);
  std::size_t turn = 0;
  while (!active.empty()) {
    const std::size_t s = active[turn % active.size()];
    const std::size_t i = pos[s]++;
    const SlotPlan& slot = plan[s][i];
    Rng& rng = rngs[s];
    const RuleType type = *slot.type;
    const detail::Pred cur = cursor[s];
    const std::string suffix = std::to_string(s + 1) + "_" + std::to_string(i + 1);
    const bool c = cur.charged;
    if (slot.cycle_start) cycle_target[s] = cur;

    // target predicate
    detail::Pred target;
    bool fresh = false;
    if (slot.back_edge) target = cycle_target[s];
    else if (slot.direct) target = cur;
    else {
      fresh = true;
      target = {"p" + suffix, 2 + rng.below(2), slot.existential || (slot.propagate && c)};
    }
    const bool need_u = fresh && slot.propagate && c && !slot.existential && is_harmful(type);

    Rule r;
    r.id = "r" + suffix;
    r.body.push_back(detail::atom(cur.name, {"K", "V", "T"}, cur.arity));
    std::vector<std::string> pool{"K"};
    if (cur.arity == 3) pool.push_back("T");
    std::string dangerous = "V";
    auto edb = [&](std::initializer_list<std::string> vars) {
      std::string name = "f" + suffix;
      r.body.push_back(detail::atom(name, vars, 2));
      auto& ann = p.annotations[name];
      ann.input = true;
      ann.bind = Binding{"csv", name + ".csv"};
      rep.edb_arities[name] = 2;
    };
    switch (type) {
      case RuleType::Linear:
        if (!c) pool.push_back("V");
        break;
      case RuleType::HarmlessJoin:
        edb({"K", "W"});
        pool.push_back("W");
        if (!c) pool.push_back("V");
        break;
      case RuleType::HarmlessHarmfulJoin:
        edb({"V", "W"});
        pool.push_back("V");
        pool.push_back("W");
        break;
      case RuleType::HarmfulHarmfulJoin:
        r.body.push_back(detail::atom(cur.name, {"K2", "V", "T2"}, cur.arity));
        pool.push_back("K2");
        if (cur.arity == 3) pool.push_back("T2");
        break;
    }
    if (need_u) {
      r.body.push_back(detail::atom(cur.name, {"K", "U", "T3"}, cur.arity));
      if (cur.arity == 3) pool.push_back("T3");
      dangerous = "U";
    }

    // head: position 1 harmless, position 2 existential / propagated / harmless
    r.head.predicate = target.name;
    r.head.terms.push_back(Term::var(fresh ? "K" : rng.pick(pool)));
    if (slot.existential) {
      r.head.terms.push_back(Term::var("Z"));
      r.existentials.insert("Z");
    } else if (fresh && slot.propagate && c) {
      r.head.terms.push_back(Term::var(dangerous));
    } else {
      r.head.terms.push_back(Term::var(rng.pick(pool)));
    }
    if (target.arity == 3) r.head.terms.push_back(Term::var(rng.pick(pool)));
    if (!fresh && r.head == r.body[0]) r.head.terms[1] = Term::var("K");

    static constexpr CompareOp kOps[] = {CompareOp::Less,      CompareOp::LessEq, CompareOp::Greater,
                                         CompareOp::GreaterEq, CompareOp::Equal,  CompareOp::NotEqual};
    for (std::size_t k = 0; k < slot.conditions; ++k)
      r.conditions.push_back(Condition{Term::var("K"), kOps[rng.below(6)], std::to_string(rng.below(nconst))});

    RuleDecision d;
    d.rule = r.id;
    d.sequence = s + 1;
    d.position = i + 1;
    d.type = type;
    d.existential = slot.existential;
    d.recursion = slot.direct ? "direct" : slot.cycle >= 0 ? "indirect" : "none";
    d.propagate = slot.propagate;
    d.conditions = slot.conditions;
    d.head = target.name;
    rep.rules.push_back(d);
    p.rules.push_back(std::move(r));

    cursor[s] = target;
    ++rep.iterations;
    if (pos[s] == plan[s].size()) {
      p.annotations[target.name].output = true;
      active.erase(std::find(active.begin(), active.end(), s));
    } else {
      ++turn;
    }
  }
  if (p.rules.empty()) rep.warnings.push_back("no rules generated: program holds annotations only");
  if (self_check) {
    auto bad = fidelity_mismatches(p, rep);
    if (!bad.empty()) {
      std::string msg;
      for (const auto& b : bad) msg += (msg.empty() ? "" : "; ") + b;
      throw GenerationStuck(msg);
    }
  }
  return {std::move(p), std::move(rep)};
}

// Measured counts against the requested ones; empty when they agree.
inline std::vector<std::string> fidelity_mismatches(const Program& p, const GenReport& rep) {
  std::vector<std::string> out;
  auto got = analysis::structural_counts(p);
  const auto& want = rep.requested;
  auto check = [&](const char* name, std::size_t g, std::size_t w) {
    if (g != w) out.push_back(std::string(name) + ": measured " + std::to_string(g) + ", requested " + std::to_string(w));
  };
  check("rules", got.rules, want.rules);
  check("linear", got.linear, want.linear);
  check("harmless_joins", got.harmless_joins, want.harmless_joins);
  check("harmless_harmful_joins", got.harmless_harmful_joins, want.harmless_harmful_joins);
  check("harmful_harmful_joins", got.harmful_harmful_joins, want.harmful_harmful_joins);
  check("existential", got.existential, want.existential);
  check("recursive_direct", got.recursive_direct, want.recursive_direct);
  check("recursive_indirect", got.recursive_indirect, want.recursive_indirect);
  check("conditions", got.conditions, want.conditions);
  if (!analysis::is_warded(p).warded) out.push_back("warded: false");
  return out;
}

}  // namespace wforge::gen
