#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "asyncdyn/cli.h"
#include "asyncdyn/simulator.h"

namespace asyncdyn::cli {
namespace {

using nlohmann::json;

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("asyncdyn_cli_" + name);
  std::ofstream(path) << text;
  return path.string();
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "asyncdyn");
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const std::string& body) {
  return R"({"schema": "asyncdyn.scenario/1", )" + body + "}";
}

void expect_schema_error(const std::string& text, const std::string& path) {
  try {
    parse_scenario(text);
    FAIL() << "accepted: " << text;
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), path) << e.what();
    EXPECT_EQ(e.kind(), ErrorKind::kSchemaError);
  }
}

TEST(ParseScenario, Fig1ConvergenceIsValid) {
  const auto doc = parse_scenario(scenario(
      R"("system": {"kind": "fixture", "name": "fig1"}, "analysis": {"type": "convergence"})"));
  ASSERT_TRUE(doc.system);
  EXPECT_EQ(doc.system->node_count(), 2U);
  ASSERT_TRUE(doc.analysis);
  EXPECT_EQ(doc.analysis->type, AnalysisRequest::Type::kConvergence);
}

TEST(ParseScenario, SchemaErrorsCarryPaths) {
  expect_schema_error(scenario(R"("system": {"kind": "fixture", "name": "ring"},
      "analysis": {"type": "r-convergence", "r": 0})"),
                      "analysis.r");
  expect_schema_error(scenario(R"("system": {"kind": "table", "actions": [2, 2],
      "table": [[0, 0], [1, 0], [0], [1, 1]]})"),
                      "system.table");
  expect_schema_error(scenario(R"("system": {"kind": "table", "actions": [2, 2],
      "table": [[0, 0], [1, 0]]})"),
                      "system.table");
  expect_schema_error(scenario(R"("system": {"kind": "nope"})"), "system.kind");
  expect_schema_error(R"({"schema": "other/1", "system": {"kind": "fixture", "name": "fig1"}})",
                      "schema");
  expect_schema_error(scenario(R"("game": {"kind": "fixture", "name": "game-2x2x2"},
      "system": {"kind": "fixture", "name": "fig1"})"),
                      "$");
  expect_schema_error(scenario(R"("system": {"kind": "fixture", "name": "fig1"},
      "simulation": {"initial": [0, 2], "schedule": {"kind": "synchronous"}})"),
                      "simulation.initial[1]");
  expect_schema_error(scenario(R"("system": {"kind": "disjointness", "n": 5, "a": [9], "b": []})"),
                      "system");
}

TEST(ParseScenario, SyntaxErrorIsParseError) {
  try {
    parse_scenario("{not json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParseError);
  }
}

TEST(ParseScenario, BuilderKinds) {
  const auto circuit = parse_scenario(scenario(R"("system": {"kind": "circuit",
      "inputs": [1], "gates": [{"inputs": ["i0", "g0"], "table": [0, 1, 1, 1]}]})"));
  EXPECT_EQ(circuit.system->node_count(), 3U);
  const auto bgp = parse_scenario(scenario(R"("system": {"kind": "bgp", "ases": 3,
      "destination": 0, "links": [[0, 1], [0, 2], [1, 2]],
      "routes": [[], [[1, 2, 0], [1, 0]], [[2, 1, 0], [2, 0]]]})"));
  EXPECT_EQ(bgp.system->node_count(), 2U);
  const auto tm = parse_scenario(scenario(R"("system": {"kind": "tm", "states": 2,
      "symbols": 2, "tape_length": 2, "halting": [false, true],
      "delta": [[{"next": 1, "write": 0, "dir": 1}, {"next": 0, "write": 1, "dir": -1}], []]})"));
  EXPECT_EQ(tm.system->node_count(), 3U);
  const auto maj = parse_scenario(scenario(R"("system": {"kind": "majority", "users": 3,
      "edges": [[0, 1], [1, 2]]})"));
  EXPECT_EQ(maj.system->node_count(), 3U);
  const auto snake = parse_scenario(scenario(R"("system": {"kind": "snake", "n": 5})"));
  EXPECT_EQ(snake.system->node_count(), 5U);
}

TEST(RunCommand, AnalyzeFig1ExitsTenWithReplayableWitness) {
  const auto path = write_temp("fig1.json", scenario(
      R"("system": {"kind": "fixture", "name": "fig1"}, "analysis": {"type": "convergence"})"));
  const auto r = invoke({"analyze", "--scenario", path});
  EXPECT_EQ(r.code, 10);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["verdict"], "NonConvergent");
  EXPECT_EQ(doc["witness"]["cycle"], json::parse("[[1, 2]]"));
  EXPECT_EQ(doc["witness"]["initial"][0]["actions"], json::parse("[0, 1]"));

  // Round trip through the simulator.
  const auto parsed = parse_scenario(scenario(
      R"("system": {"kind": "fixture", "name": "fig1"})"));
  Witness w;
  for (const auto& s : doc["witness"]["initial"]) w.initial.push_back(s["actions"].get<State>());
  for (const auto& set : doc["witness"]["cycle"]) {
    w.cycle.push_back(ActivationSet::from_labels(set.get<std::vector<int>>()));
  }
  EXPECT_TRUE(std::holds_alternative<verdicts::Cycling>(replay_witness(*parsed.system, w)));
}

TEST(RunCommand, ExampleTwoExitsZero) {
  const auto path = write_temp("ex2.json", scenario(
      R"("system": {"kind": "fixture", "name": "ex-three-stable"})"));
  const auto r = invoke({"analyze", "--scenario", path});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["verdict"], "Convergent");
}

TEST(RunCommand, StayOrRollFailsOnThreeNodeGame) {
  const auto path = write_temp("sor.json", scenario(
      R"("game": {"kind": "fixture", "name": "game-2x2x2"})"));
  const auto r = invoke({"uncoupled-check", "--scenario", path, "--protocol", "stay-or-roll"});
  EXPECT_EQ(r.code, 10);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["verdict"], "Fails");
  EXPECT_EQ(doc["witness"]["initial"][0]["actions"], json::parse("[0, 0, 1]"));
}

TEST(RunCommand, ThreeRecallOnCoordination) {
  const auto path = write_temp("coord.json", scenario(
      R"("game": {"kind": "fixture", "name": "coordination-2x2"},
         "analysis": {"type": "uncoupled-check", "protocol": "three-recall"})"));
  const auto r = invoke({"uncoupled-check", "--scenario", path});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["verdict"], "SelfStabilizing");
}

TEST(RunCommand, SimulateCyclingAndSeeds) {
  const auto path = write_temp("sim.json", scenario(
      R"("system": {"kind": "fixture", "name": "ring", "params": {"n": 4}},
         "simulation": {"initial": [1, 0, 0, 0],
           "schedule": {"kind": "periodic", "cycle": [[1, 2], [2, 3], [3, 4], [4, 1]]}})"));
  const auto r = invoke({"simulate", "--scenario", path});
  EXPECT_EQ(r.code, 10);
  EXPECT_EQ(json::parse(r.out)["verdict"], "Cycling");

  const auto rnd = write_temp("rnd.json", scenario(
      R"("system": {"kind": "fixture", "name": "futile", "params": {"n": 3}},
         "simulation": {"initial": [1, 1, 1], "schedule": {"kind": "random", "p": 0.5},
                        "max_steps": 200})"));
  const auto trace = (std::filesystem::temp_directory_path() / "asyncdyn_cli_trace.tsv").string();
  const auto a = invoke({"simulate", "--scenario", rnd, "--seed", "5", "--trace", trace});
  const auto b = invoke({"simulate", "--scenario", rnd, "--seed", "5"});
  EXPECT_EQ(a.code, 0);
  json da = json::parse(a.out), db = json::parse(b.out);
  EXPECT_EQ(da["provenance"]["seed"], 5);
  EXPECT_EQ(da["state"], db["state"]);
  EXPECT_EQ(da["verdict"], "BudgetExhausted");
  std::ifstream t(trace);
  std::string first;
  std::getline(t, first);
  EXPECT_EQ(first, "0\t-\t(1,1,1)");
}

TEST(RunCommand, ExitCodesForInputAndBudget) {
  EXPECT_EQ(invoke({"analyze", "--scenario", "/nonexistent.json"}).code, 2);
  EXPECT_EQ(invoke({"analyze"}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  const auto bad = write_temp("bad.json", "{oops");
  const auto r = invoke({"analyze", "--scenario", bad});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.out)["error"]["kind"], "ParseError");

  const auto ring = write_temp("ring6.json", scenario(
      R"("system": {"kind": "fixture", "name": "ring", "params": {"n": 6}})"));
  EXPECT_EQ(invoke({"analyze", "--scenario", ring, "--budget", "10"}).code, 3);
  setenv("ASYNCDYN_BUDGET", "10", 1);
  EXPECT_EQ(invoke({"analyze", "--scenario", ring}).code, 3);
  unsetenv("ASYNCDYN_BUDGET");
  EXPECT_EQ(invoke({"analyze", "--scenario", ring}).code, 10);
}

TEST(RunCommand, ProvenanceHashTracksBytes) {
  const auto a = write_temp("h1.json", scenario(R"("system": {"kind": "fixture", "name": "fig1"})"));
  const auto b = write_temp("h2.json", scenario(R"("system": {"kind": "fixture", "name": "fig1"} )"));
  const auto ha = json::parse(invoke({"build", "--scenario", a}).out)["provenance"]["scenario_sha256"];
  const auto ha2 = json::parse(invoke({"build", "--scenario", a}).out)["provenance"]["scenario_sha256"];
  const auto hb = json::parse(invoke({"build", "--scenario", b}).out)["provenance"]["scenario_sha256"];
  EXPECT_EQ(ha, ha2);
  EXPECT_NE(ha, hb);
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(RunCommand, PneAndBuild) {
  const auto g = write_temp("pne.json", scenario(
      R"("game": {"kind": "table", "actions": [2, 2], "utilities": [[2, 0, 0, 1], [1, 0, 0, 2]]})"));
  const json pne = json::parse(invoke({"pne", "--scenario", g}).out);
  EXPECT_EQ(pne["pne"].size(), 2U);
  const auto s = write_temp("build.json", scenario(R"("system": {"kind": "fixture", "name": "fig1"})"));
  const json built = json::parse(invoke({"build", "--scenario", s}).out);
  EXPECT_EQ(built["system"]["table"], json::parse("[[0,0],[1,0],[0,1],[1,1]]"));
  EXPECT_EQ(built["system"]["self_independent"], true);
}

TEST(ExportDot, Fig1LinesAndDeterminism) {
  const auto path = write_temp("dot.json", scenario(R"("system": {"kind": "fixture", "name": "fig1"})"));
  const auto a = invoke({"export-dot", "--scenario", path});
  const auto b = invoke({"export-dot", "--scenario", path});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("  \"ab\" -> \"ba\" [label=\"{1,2}\"];\n"), std::string::npos);
  EXPECT_NE(a.out.find("  \"ab\" -> \"aa\" [label=\"{2}\"];\n"), std::string::npos);
}

TEST(ExportDot, SingleStateIdentity) {
  const auto sys = HistorylessSystem::from_table(ActionSpace({1}), {{0}});
  const std::string dot = export_dot(TransitionGraph(sys));
  EXPECT_EQ(dot,
            "digraph transitions {\n"
            "  \"a\" -> \"a\" [label=\"{1}\"];\n"
            "  \"a\" -> \"a\" [label=\"{}\"];\n"
            "  \"a\";\n"
            "}\n");
  const auto big = HistorylessSystem::from_table(ActionSpace({2, 2}), {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  EXPECT_THROW(export_dot(TransitionGraph(big), 4), Error);
}

}  // namespace
}  // namespace asyncdyn::cli
