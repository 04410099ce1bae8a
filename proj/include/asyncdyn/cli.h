#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "asyncdyn/analyzer.h"
#include "asyncdyn/error.h"
#include "asyncdyn/game.h"
#include "asyncdyn/schedule.h"
#include "asyncdyn/system.h"
#include "asyncdyn/uncoupled.h"

namespace asyncdyn::cli {

inline constexpr const char* kScenarioSchema = "asyncdyn.scenario/1";
inline constexpr const char* kResultSchema = "asyncdyn.result/1";
inline constexpr const char* kVersion = "0.1.0";

// SchemaError carrying the dotted path of the offending field.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(ErrorKind::kSchemaError, path + ": " + message),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct AnalysisRequest {
  enum class Type { kConvergence, kRConvergence, kSpectrum, kCommitted, kPne, kUncoupled };
  Type type = Type::kConvergence;
  int r = 0;
  State state;  // spectrum
  enum class Check { kThreeRecall, kTwoRecall, kStayOrRoll };
  Check protocol = Check::kThreeRecall;
};

struct ScheduleRequest {
  enum class Kind { kSynchronous, kRoundRobin, kPeriodic, kExplicit, kRandom, kRFair };
  Kind kind = Kind::kSynchronous;
  std::vector<ActivationSet> prefix, cycle;
  double p = 0.5;
  int r = 1;
};

struct SimulationRequest {
  std::vector<State> initial;
  ScheduleRequest schedule;
  std::uint64_t max_steps = kDefaultMaxSteps;
  std::uint64_t seed = 0;
};

struct ScenarioDocument {
  std::string source;  // e.g. "fixture:fig1", "table", "game:fixture:game-2x2x2"
  std::optional<HistorylessSystem> system;
  std::optional<Game> game;
  std::optional<AnalysisRequest> analysis;
  std::optional<SimulationRequest> simulation;
};

// Throws Error(kParseError) on bad JSON and SchemaError on violations.
ScenarioDocument parse_scenario(const std::string& text);

Schedule make_schedule(const ScheduleRequest& request, std::size_t node_count,
                       std::uint64_t seed);

// Sorted node and edge lines inside "digraph transitions { ... }".
std::string export_dot(const TransitionGraph& graph,
                       std::uint64_t edge_limit = std::uint64_t{1} << 16);

std::string sha256_hex(const std::string& bytes);

// Full command line including argv[0]. Writes the result document (or DOT)
// to out and diagnostics to err; returns the exit code.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

int exit_code_for(ErrorKind kind);

}  // namespace asyncdyn::cli
