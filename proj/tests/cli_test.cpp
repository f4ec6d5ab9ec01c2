#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "wforge/core.hpp"
#include "wforge/hje.hpp"
#include "wforge_cli.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kSamples = WFORGE_SAMPLES_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "wforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = wforge::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("wforge_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = wforge::cli::read_file(e.path());
  return out;
}

}  // namespace

TEST(Cli, PipelineTwiceIsByteIdentical) {
  auto base = fresh_dir("pipeline");
  auto a = run({"pipeline", "--scenario", (kSamples / "small.cfg").string(), "--out", (base / "a").string(),
                "--seed", "7", "--trace"});
  auto b = run({"pipeline", "--scenario", (kSamples / "small.cfg").string(), "--out", (base / "b").string(),
                "--seed", "7", "--trace"});
  ASSERT_EQ(a.code, 0) << a.out << a.err;
  EXPECT_EQ(b.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto ta = tree(base / "a"), tb = tree(base / "b");
  EXPECT_EQ(ta, tb);
  for (const char* f : {"program.vada", "normalized.vada", "analysis.json", "normalized_analysis.json", "counters.json",
                        "summary.txt", "verify.txt", "generation.json", "scenario.cfg", "trace.txt"})
    EXPECT_TRUE(ta.contains(f)) << f;
  // everything lands inside the output directories
  std::set<std::string> top;
  for (const auto& e : fs::directory_iterator(base)) top.insert(e.path().filename().string());
  EXPECT_EQ(top, (std::set<std::string>{"a", "b"}));
  auto counters = nlohmann::json::parse(ta["counters.json"]);
  EXPECT_EQ(counters["harmful_joins_after"], 0);
  EXPECT_EQ(counters["pass"], true);
  EXPECT_EQ(counters["requested"], counters["measured"]);
}

TEST(Cli, SeedFlagChangesTheProgram) {
  auto base = fresh_dir("seed");
  run({"generate", "--scenario", (kSamples / "small.cfg").string(), "--out", (base / "a").string(), "--seed", "1"});
  run({"generate", "--scenario", (kSamples / "small.cfg").string(), "--out", (base / "b").string(), "--seed", "2"});
  EXPECT_NE(wforge::cli::read_file(base / "a" / "program.vada"), wforge::cli::read_file(base / "b" / "program.vada"));
}

TEST(Cli, GenerateWritesBoundCsvFiles) {
  auto dir = fresh_dir("generate");
  auto r = run({"generate", "--scenario", (kSamples / "harmless.cfg").string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto p = wforge::parse(wforge::cli::read_file(dir / "program.vada"));
  for (const auto& [pred, ann] : p.annotations)
    if (ann.input) {
      ASSERT_TRUE(ann.bind.has_value());
      EXPECT_TRUE(fs::exists(dir / ann.bind->path)) << pred;
    }
  auto c = run({"chase", (dir / "program.vada").string()});
  EXPECT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("completed yes"), std::string::npos);
}

TEST(Cli, AnalyzeHarmlessProgramReportsNoHarmfulJoins) {
  auto dir = fresh_dir("analyze");
  std::ofstream(dir / "p.vada") << "@input e\n@output q\nr1: p(X,?Z) :- e(X).\nr2: q(X) :- p(X,Y), e(X).\n";
  auto r = run({"analyze", (dir / "p.vada").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["harmful_joins"].empty());
  EXPECT_EQ(j["warded"], true);
  EXPECT_EQ(j["affected"], nlohmann::json::array({"p[2]"}));
}

TEST(Cli, AnalyzeReportsDhMdhOfHuBranch) {
  auto r = run({"analyze", (kSamples / "hu_branch.vada").string()});
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["harmful_rules"].size(), 1u);
  EXPECT_EQ(j["harmful_rules"][0]["mdh"], 3);
}

TEST(Cli, VerifyProgramsAgainstTheirNormalForm) {
  auto dir = fresh_dir("verify");
  for (const char* name : {"hu_branch.vada", "recursive.vada"}) {
    auto n = run({"normalize", (kSamples / name).string(), "--out", dir.string()});
    ASSERT_EQ(n.code, 0) << n.err;
    auto v = run({"verify", (kSamples / name).string(), (dir / "normalized.vada").string(), "--databases", "10"});
    EXPECT_EQ(v.code, 0) << v.out;
    EXPECT_NE(v.out.find("equal 10 not_equal 0 inconclusive 0"), std::string::npos) << v.out;
  }
}

TEST(Cli, VerifyDetectsADifferentProgram) {
  auto dir = fresh_dir("verify_ne");
  std::ofstream(dir / "a.vada") << "@input e\n@output q\nq(X) :- e(X).\n";
  std::ofstream(dir / "b.vada") << "@input e\n@output q\nq(X) :- e(X), X > 2.\n";
  auto v = run({"verify", (dir / "a.vada").string(), (dir / "b.vada").string(), "--databases", "20"});
  EXPECT_EQ(v.code, 1);
  EXPECT_NE(v.out.find("NotEqual"), std::string::npos);
}

TEST(Cli, NormalizeTraceGoesToStderr) {
  auto r = run({"normalize", "--trace", (kSamples / "recursive.vada").string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("fold_edges 1"), std::string::npos) << r.err;
  auto h = wforge::parse(r.out);
  EXPECT_EQ(h, wforge::hje::hje(wforge::parse(wforge::cli::read_file(kSamples / "recursive.vada"))).first);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"pipeline", "--out", "x"}).code, 2);
  EXPECT_EQ(run({"verify", "--databases", "0", "a", "b"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, DomainErrorsExitOneWithModuleMessage) {
  auto dir = fresh_dir("errors");
  std::ofstream(dir / "bad.vada") << "p(X,Z) :- e(X).\n";
  auto r = run({"analyze", (dir / "bad.vada").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("UnsafeRule"), std::string::npos);
  std::ofstream(dir / "bad.cfg") << "inputOutputSequences=2\nnumLinearRules=5\n";
  auto g = run({"generate", "--scenario", (dir / "bad.cfg").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(g.code, 1);
  EXPECT_NE(g.err.find("IncompatibleScenario: rule-type-sum"), std::string::npos) << g.err;
  std::ofstream(dir / "unwarded.vada") << "@input e\ns: a(X,?Z) :- e(X).\nt: d(V) :- a(X,V), a(W,V).\n";
  auto n = run({"normalize", (dir / "unwarded.vada").string()});
  EXPECT_EQ(n.code, 1);
  EXPECT_NE(n.err.find("NotWarded"), std::string::npos);
}

TEST(Cli, NoAnsiWhenWritingToStreams) {
  setenv("WFORGE_COLOR", "0", 1);
  auto r = run({"verify", (kSamples / "hu_branch.vada").string(), (kSamples / "hu_branch.vada").string()});
  EXPECT_EQ(r.out.find('\033'), std::string::npos);
}
