#include "asyncdyn/cli.h"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "asyncdyn/reductions.h"
#include "asyncdyn/simulator.h"

namespace asyncdyn::cli {

using nlohmann::json;

namespace {

// A JSON value together with its dotted path for error messages.
class Node {
 public:
  Node(const json& value, std::string path) : v_(&value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return *v_; }

  [[noreturn]] void bad(const std::string& message) const {
    throw SchemaError(path_, message);
  }

  bool has(const std::string& key) const {
    return v_->is_object() && v_->contains(key);
  }
  Node at(const std::string& key) const {
    if (!v_->is_object()) bad("expected an object");
    if (!v_->contains(key)) throw SchemaError(child(key), "required field missing");
    return Node((*v_)[key], child(key));
  }
  std::optional<Node> opt(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return at(key);
  }

  std::vector<Node> items() const {
    if (!v_->is_array()) bad("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < v_->size(); ++i) {
      out.emplace_back((*v_)[i], path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  std::int64_t integer(std::int64_t lo, std::int64_t hi) const {
    if (!v_->is_number_integer()) bad("expected an integer");
    const auto x = v_->get<std::int64_t>();
    if (x < lo || x > hi) {
      bad("value " + std::to_string(x) + " outside [" + std::to_string(lo) +
          ", " + std::to_string(hi) + "]");
    }
    return x;
  }
  int small(int lo, int hi) const { return static_cast<int>(integer(lo, hi)); }
  std::size_t index(std::size_t hi) const {
    return static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(hi)));
  }
  double number() const {
    if (!v_->is_number()) bad("expected a number");
    return v_->get<double>();
  }
  bool boolean() const {
    if (!v_->is_boolean()) bad("expected a boolean");
    return v_->get<bool>();
  }
  std::string string() const {
    if (!v_->is_string()) bad("expected a string");
    return v_->get<std::string>();
  }

  std::vector<int> ints(int lo, int hi) const {
    std::vector<int> out;
    for (const Node& x : items()) out.push_back(x.small(lo, hi));
    return out;
  }

 private:
  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  const json* v_;
  std::string path_;
};

State read_state(const Node& node, const ActionSpace& space) {
  const auto items = node.items();
  if (items.size() != space.node_count()) {
    node.bad("state needs " + std::to_string(space.node_count()) + " actions");
  }
  State s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    s.push_back(items[i].small(0, space.size(i) - 1));
  }
  return s;
}

ActivationSet read_set(const Node& node, std::size_t n) {
  std::vector<int> labels = node.ints(1, static_cast<int>(n));
  return ActivationSet::from_labels(labels);
}

std::vector<ActivationSet> read_sets(const Node& node, std::size_t n) {
  std::vector<ActivationSet> out;
  for (const Node& x : node.items()) out.push_back(read_set(x, n));
  return out;
}

ActionSpace read_space(const Node& node) {
  const auto sizes = node.ints(1, 1 << 20);
  if (sizes.empty() || sizes.size() > kMaxNodes) {
    node.bad("need between 1 and " + std::to_string(kMaxNodes) + " nodes");
  }
  return ActionSpace(sizes);
}

// Builder errors become schema errors at the system path.
template <class F>
auto building(const Node& where, F f) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInvalidInput) throw;
    where.bad(e.what());
  }
}

HistorylessSystem read_table_system(const Node& sys) {
  const ActionSpace space = read_space(sys.at("actions"));
  space.require_within(kDefaultStateBudget, "table system");
  const Node table = sys.at("table");
  const auto rows = table.items();
  if (rows.size() != space.state_count()) {
    table.bad("needs " + std::to_string(space.state_count()) +
              " rows, one per state in lexicographic order");
  }
  std::vector<State> out;
  for (const Node& row : rows) {
    const auto xs = row.items();
    if (xs.size() != space.node_count()) {
      table.bad("row " + row.path() + " length " + std::to_string(xs.size()) +
                " does not match " + std::to_string(space.node_count()) +
                " nodes");
    }
    out.push_back(read_state(row, space));
  }
  return HistorylessSystem::from_table(space, out);
}

CircuitDescription read_circuit(const Node& sys) {
  CircuitDescription c;
  c.input_values = sys.at("inputs").ints(0, 1);
  for (const Node& g : sys.at("gates").items()) {
    Gate gate;
    for (const Node& w : g.at("inputs").items()) {
      const std::string ref = w.string();
      if (ref.size() < 2 || (ref[0] != 'i' && ref[0] != 'g')) {
        w.bad("wire must look like i<k> or g<k>");
      }
      std::size_t idx = 0;
      try {
        idx = std::stoul(ref.substr(1));
      } catch (const std::exception&) {
        w.bad("wire must look like i<k> or g<k>");
      }
      gate.inputs.push_back(
          {ref[0] == 'i' ? Wire::Kind::kInput : Wire::Kind::kGate, idx});
    }
    gate.truth_table = g.at("table").ints(0, 1);
    c.gates.push_back(std::move(gate));
  }
  return c;
}

SocialGraph read_majority(const Node& sys) {
  SocialGraph g;
  g.users = sys.at("users").index(1 << 16);
  for (const Node& e : sys.at("edges").items()) {
    const auto uv = e.items();
    if (uv.size() != 2) e.bad("edge needs two users");
    g.edges.emplace_back(uv[0].index(g.users), uv[1].index(g.users));
  }
  return g;
}

Route read_route(const Node& node) {
  Route r;
  for (const Node& x : node.items()) r.push_back(x.index(1 << 16));
  return r;
}

BgpInstance read_bgp(const Node& sys) {
  BgpInstance inst;
  inst.as_count = sys.at("ases").index(1 << 16);
  inst.destination = sys.at("destination").index(1 << 16);
  for (const Node& l : sys.at("links").items()) {
    const auto uv = l.items();
    if (uv.size() != 2) l.bad("link needs two ASes");
    inst.links.emplace_back(uv[0].index(1 << 16), uv[1].index(1 << 16));
  }
  for (const Node& per : sys.at("routes").items()) {
    std::vector<Route> ranked;
    for (const Node& r : per.items()) ranked.push_back(read_route(r));
    inst.ranked_routes.push_back(std::move(ranked));
  }
  if (const auto denials = sys.opt("denials")) {
    for (const Node& d : denials->items()) {
      inst.denials.push_back({d.at("from").index(1 << 16),
                              read_route(d.at("route")),
                              d.at("to").index(1 << 16)});
    }
  }
  return inst;
}

TMDescription read_tm(const Node& sys) {
  TMDescription tm;
  tm.states = sys.at("states").small(1, 64);
  tm.symbols = sys.at("symbols").small(1, 64);
  tm.tape_length = sys.at("tape_length").small(1, 16);
  const Node halting = sys.at("halting");
  for (const Node& h : halting.items()) tm.halting.push_back(h.boolean());
  for (const Node& row : sys.at("delta").items()) {
    std::vector<TmMove> moves;
    for (const Node& m : row.items()) {
      moves.push_back({m.at("next").small(0, tm.states - 1),
                       m.at("write").small(0, tm.symbols - 1),
                       m.at("dir").small(-1, 1)});
    }
    tm.delta.push_back(std::move(moves));
  }
  return tm;
}

FixtureParams read_params(const std::optional<Node>& node) {
  FixtureParams out;
  if (!node) return out;
  if (!node->raw().is_object()) node->bad("expected an object");
  for (const auto& [key, value] : node->raw().items()) {
    out[key] = Node(value, node->path() + "." + key).small(-1000000, 1000000);
  }
  return out;
}

void read_system(const Node& sys, ScenarioDocument& doc) {
  const std::string kind = sys.at("kind").string();
  doc.source = kind;
  if (kind == "table") {
    doc.system = read_table_system(sys);
  } else if (kind == "fixture") {
    const std::string name = sys.at("name").string();
    doc.source = "fixture:" + name;
    const auto params = read_params(sys.opt("params"));
    auto value = building(sys, [&] { return fixture(name, params); });
    if (auto* h = std::get_if<HistorylessSystem>(&value)) {
      doc.system = *h;
    } else if (auto* g = std::get_if<Game>(&value)) {
      doc.game = *g;
    } else {
      sys.at("name").bad("fixture is not a historyless system or game");
    }
  } else if (kind == "circuit") {
    const auto c = read_circuit(sys);
    doc.system = building(sys, [&] { return build_circuit(c); });
  } else if (kind == "majority") {
    const auto g = read_majority(sys);
    doc.system = building(sys, [&] { return build_majority(g); });
  } else if (kind == "bgp") {
    const auto inst = read_bgp(sys);
    doc.system = building(sys, [&] { return build_bgp(inst); });
  } else if (kind == "tm") {
    const auto tm = read_tm(sys);
    doc.system = building(sys, [&] { return build_tm(tm); });
  } else if (kind == "snake") {
    const int n = sys.at("n").small(5, 9);
    doc.system = build_snake_system(n);
  } else if (kind == "disjointness") {
    const int n = sys.at("n").small(5, 9);
    const auto a = sys.at("a").ints(-1000000, 1000000);
    const auto b = sys.at("b").ints(-1000000, 1000000);
    doc.system = building(sys, [&] { return build_disjointness(n, a, b); });
  } else {
    sys.at("kind").bad("unknown system kind '" + kind + "'");
  }
}

void read_game(const Node& game, ScenarioDocument& doc) {
  const std::string kind = game.at("kind").string();
  if (kind == "fixture") {
    const std::string name = game.at("name").string();
    doc.source = "game:fixture:" + name;
    auto value = building(game, [&] { return fixture(name); });
    if (!std::holds_alternative<Game>(value)) {
      game.at("name").bad("fixture is not a game");
    }
    doc.game = std::get<Game>(value);
  } else if (kind == "table") {
    doc.source = "game:table";
    const ActionSpace space = read_space(game.at("actions"));
    space.require_within(kDefaultStateBudget, "game");
    const Node utilities = game.at("utilities");
    const auto per_node = utilities.items();
    if (per_node.size() != space.node_count()) {
      utilities.bad("needs one utility table per node");
    }
    std::vector<std::vector<Utility>> u;
    for (const Node& row : per_node) {
      const auto xs = row.items();
      if (xs.size() != space.state_count()) {
        row.bad("needs " + std::to_string(space.state_count()) + " entries");
      }
      std::vector<Utility> vals;
      for (const Node& x : xs) vals.push_back(x.integer(-(std::int64_t{1} << 53), std::int64_t{1} << 53));
      u.push_back(std::move(vals));
    }
    doc.game = Game(space, std::move(u));
  } else {
    game.at("kind").bad("unknown game kind '" + kind + "'");
  }
}

std::size_t node_count_of(const ScenarioDocument& doc) {
  return doc.system ? doc.system->node_count() : doc.game->space().node_count();
}

const ActionSpace& space_of(const ScenarioDocument& doc) {
  return doc.system ? doc.system->space() : doc.game->space();
}

AnalysisRequest read_analysis(const Node& node, const ScenarioDocument& doc) {
  AnalysisRequest req;
  const std::string type = node.at("type").string();
  if (type == "convergence") {
    req.type = AnalysisRequest::Type::kConvergence;
  } else if (type == "r-convergence") {
    req.type = AnalysisRequest::Type::kRConvergence;
    req.r = node.at("r").small(1, 64);
  } else if (type == "spectrum") {
    req.type = AnalysisRequest::Type::kSpectrum;
    req.state = read_state(node.at("state"), space_of(doc));
  } else if (type == "committed") {
    req.type = AnalysisRequest::Type::kCommitted;
  } else if (type == "pne") {
    req.type = AnalysisRequest::Type::kPne;
  } else if (type == "uncoupled-check") {
    req.type = AnalysisRequest::Type::kUncoupled;
    const std::string p = node.at("protocol").string();
    if (p == "three-recall") {
      req.protocol = AnalysisRequest::Check::kThreeRecall;
    } else if (p == "two-recall") {
      req.protocol = AnalysisRequest::Check::kTwoRecall;
    } else if (p == "stay-or-roll") {
      req.protocol = AnalysisRequest::Check::kStayOrRoll;
    } else {
      node.at("protocol").bad("unknown protocol '" + p + "'");
    }
  } else {
    node.at("type").bad("unknown analysis type '" + type + "'");
  }
  const bool needs_system = req.type != AnalysisRequest::Type::kPne &&
                            req.type != AnalysisRequest::Type::kUncoupled;
  if (needs_system && !doc.system) node.bad("analysis needs a system source");
  if (req.type == AnalysisRequest::Type::kUncoupled && !doc.game) {
    node.bad("uncoupled-check needs a game source");
  }
  return req;
}

ScheduleRequest read_schedule(const Node& node, std::size_t n) {
  ScheduleRequest req;
  const std::string kind = node.at("kind").string();
  using K = ScheduleRequest::Kind;
  if (kind == "synchronous") {
    req.kind = K::kSynchronous;
  } else if (kind == "round-robin") {
    req.kind = K::kRoundRobin;
  } else if (kind == "periodic") {
    req.kind = K::kPeriodic;
    if (const auto prefix = node.opt("prefix")) req.prefix = read_sets(*prefix, n);
    req.cycle = read_sets(node.at("cycle"), n);
    if (req.cycle.empty()) node.at("cycle").bad("cycle must not be empty");
  } else if (kind == "explicit") {
    req.kind = K::kExplicit;
    req.prefix = read_sets(node.at("sets"), n);
  } else if (kind == "random") {
    req.kind = K::kRandom;
    req.p = node.at("p").number();
    if (!(req.p > 0.0 && req.p <= 1.0)) node.at("p").bad("p must lie in (0, 1]");
  } else if (kind == "r-fair") {
    req.kind = K::kRFair;
    req.r = node.at("r").small(1, 1 << 20);
  } else {
    node.at("kind").bad("unknown schedule kind '" + kind + "'");
  }
  return req;
}

SimulationRequest read_simulation(const Node& node, const ScenarioDocument& doc) {
  if (!doc.system) node.bad("simulation needs a system source");
  SimulationRequest req;
  const Node init = node.at("initial");
  req.initial.push_back(read_state(init, doc.system->space()));
  req.schedule = read_schedule(node.at("schedule"), node_count_of(doc));
  if (const auto m = node.opt("max_steps")) {
    req.max_steps = static_cast<std::uint64_t>(m->integer(1, std::int64_t{1} << 40));
  }
  if (const auto s = node.opt("seed")) {
    req.seed = static_cast<std::uint64_t>(s->integer(0, std::numeric_limits<std::int64_t>::max()));
  }
  return req;
}

}  // namespace

ScenarioDocument parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParseError, std::string("scenario is not valid JSON: ") + e.what());
  }
  const Node top(root, "");
  if (!root.is_object()) throw SchemaError("$", "scenario must be an object");
  const std::string schema = top.at("schema").string();
  if (schema != kScenarioSchema) {
    top.at("schema").bad("expected '" + std::string(kScenarioSchema) + "'");
  }
  for (const auto& [key, value] : root.items()) {
    (void)value;
    if (key != "schema" && key != "system" && key != "game" &&
        key != "analysis" && key != "simulation") {
      throw SchemaError(key, "unknown field");
    }
  }
  ScenarioDocument doc;
  const bool has_system = top.has("system"), has_game = top.has("game");
  if (has_system == has_game) {
    throw SchemaError("$", "exactly one of system and game is required");
  }
  if (has_system) {
    read_system(top.at("system"), doc);
  } else {
    read_game(top.at("game"), doc);
  }
  if (const auto a = top.opt("analysis")) doc.analysis = read_analysis(*a, doc);
  if (const auto s = top.opt("simulation")) doc.simulation = read_simulation(*s, doc);
  return doc;
}

Schedule make_schedule(const ScheduleRequest& request, std::size_t n,
                       std::uint64_t seed) {
  using K = ScheduleRequest::Kind;
  switch (request.kind) {
    case K::kSynchronous:
      return Schedule::synchronous(n);
    case K::kRoundRobin:
      return Schedule::round_robin(n);
    case K::kPeriodic:
      return Schedule(schedules::Periodic{request.prefix, request.cycle}, n);
    case K::kExplicit:
      return Schedule(schedules::ExplicitList{request.prefix}, n);
    case K::kRandom:
      return Schedule(schedules::SeededRandom{seed, request.p}, n);
    case K::kRFair:
      return Schedule(schedules::SeededRFair{seed, request.r}, n);
  }
  fail(ErrorKind::kInvalidInput, "unknown schedule kind");
}

std::string export_dot(const TransitionGraph& graph, std::uint64_t edge_limit) {
  if (graph.edge_count() > edge_limit) {
    fail(ErrorKind::kBudgetExceeded,
         "graph has " + std::to_string(graph.edge_count()) +
             " edges, more than the rendering limit " + std::to_string(edge_limit));
  }
  const TransitionModel& model = graph.model();
  std::vector<std::string> lines;
  for (StateIndex s = 0; s < graph.state_count(); ++s) {
    const std::string from = model.label(s);
    lines.push_back("  \"" + from + "\";");
    for (std::uint64_t m = 0; m < graph.mask_count(); ++m) {
      lines.push_back("  \"" + from + "\" -> \"" + model.label(graph.target(s, m)) +
                      "\" [label=\"" + ActivationSet(m).to_string() + "\"];");
    }
  }
  std::sort(lines.begin(), lines.end());
  std::string out = "digraph transitions {\n";
  for (const auto& l : lines) out += l + "\n";
  out += "}\n";
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::kBudgetExceeded ? 3 : 2;
}

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 10;

json state_json(const ActionSpace& space, const State& s) {
  return {{"actions", s}, {"label", space.label(s)}};
}

json states_json(const ActionSpace& space, const std::vector<State>& xs) {
  json out = json::array();
  for (const State& s : xs) out.push_back(state_json(space, s));
  return out;
}

json sets_json(const std::vector<ActivationSet>& sets) {
  json out = json::array();
  for (ActivationSet a : sets) out.push_back(a.labels());
  return out;
}

json witness_json(const ActionSpace& space, const Witness& w) {
  return {{"initial", states_json(space, w.initial)}, {"cycle", sets_json(w.cycle)}};
}

struct Context {
  const ScenarioDocument* doc;
  std::string scenario_bytes;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_steps;
  AnalysisOptions options;
  std::string trace_path;
};

json base_document(const Context& ctx, const std::string& command) {
  json provenance = {{"tool", "asyncdyn"},
                     {"version", kVersion},
                     {"scenario_sha256", sha256_hex(ctx.scenario_bytes)}};
  std::uint64_t seed = ctx.seed.value_or(
      ctx.doc->simulation ? ctx.doc->simulation->seed : 0);
  provenance["seed"] = seed;
  return {{"schema", kResultSchema},
          {"command", command},
          {"source", ctx.doc->source},
          {"provenance", provenance}};
}

json stats_json(const AnalysisStats& s, double ms) {
  return {{"states", s.states}, {"edges", s.edges}, {"components", s.components},
          {"runtime_ms", ms}};
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

const HistorylessSystem& need_system(const Context& ctx) {
  if (!ctx.doc->system) throw SchemaError("system", "this command needs a system source");
  return *ctx.doc->system;
}

const Game& need_game(const Context& ctx) {
  if (!ctx.doc->game) throw SchemaError("game", "this command needs a game source");
  return *ctx.doc->game;
}

int cmd_analyze(const Context& ctx, json& doc) {
  const HistorylessSystem& sys = need_system(ctx);
  const auto start = std::chrono::steady_clock::now();
  const AnalysisRequest req = ctx.doc->analysis.value_or(AnalysisRequest{});
  using T = AnalysisRequest::Type;
  doc["stable_states"] = states_json(sys.space(), stable_states(sys, ctx.options));
  switch (req.type) {
    case T::kConvergence:
    case T::kRConvergence: {
      const auto v = req.type == T::kConvergence
                         ? decide_convergence(sys, ctx.options)
                         : decide_r_convergence(sys, req.r, ctx.options);
      doc["analysis"] = req.type == T::kConvergence ? "convergence" : "r-convergence";
      if (req.type == T::kRConvergence) doc["r"] = req.r;
      doc["verdict"] = v.convergent ? "Convergent" : "NonConvergent";
      if (v.witness) doc["witness"] = witness_json(sys.space(), *v.witness);
      doc["statistics"] = stats_json(v.stats, elapsed_ms(start));
      return v.convergent ? kExitOk : kExitNegative;
    }
    case T::kSpectrum: {
      doc["analysis"] = "spectrum";
      doc["state"] = state_json(sys.space(), req.state);
      doc["spectrum"] = states_json(sys.space(), spectrum(sys, req.state, ctx.options));
      return kExitOk;
    }
    case T::kCommitted: {
      doc["analysis"] = "committed";
      const TransitionGraph graph(sys, ctx.options);
      const CommitMap map = committed_map(graph);
      json rows = json::array();
      for (StateIndex s = 0; s < sys.state_count(); ++s) {
        json row = {{"state", state_json(sys.space(), sys.space().decode(s))}};
        row["committed_to"] = map.target[s]
                                  ? state_json(sys.space(), sys.space().decode(*map.target[s]))
                                  : json(nullptr);
        rows.push_back(row);
      }
      doc["committed"] = rows;
      return kExitOk;
    }
    default:
      throw SchemaError("analysis.type", "analyze handles convergence, r-convergence, spectrum and committed");
  }
}

int cmd_simulate(const Context& ctx, json& doc) {
  const HistorylessSystem& sys = need_system(ctx);
  if (!ctx.doc->simulation) throw SchemaError("simulation", "required field missing");
  const SimulationRequest& req = *ctx.doc->simulation;
  const std::uint64_t seed = ctx.seed.value_or(req.seed);
  const Schedule schedule = make_schedule(req.schedule, sys.node_count(), seed);
  const auto result = run(sys, req.initial.back(), schedule, ctx.max_steps.value_or(req.max_steps));
  doc["verdict"] = verdict_name(result.verdict);
  doc["steps"] = result.trajectory.length;
  if (const auto* c = std::get_if<verdicts::Converged>(&result.verdict)) {
    doc["state"] = state_json(sys.space(), c->state);
    doc["time"] = c->time;
  } else if (const auto* y = std::get_if<verdicts::Cycling>(&result.verdict)) {
    doc["start"] = y->start;
    doc["period"] = y->period;
    doc["segment"] = states_json(sys.space(), y->segment);
    doc["activations"] = sets_json(y->activations);
  } else {
    doc["state"] = state_json(sys.space(), std::get<verdicts::BudgetExhausted>(result.verdict).last);
  }
  if (!ctx.trace_path.empty()) {
    std::ofstream trace(ctx.trace_path);
    if (!trace) fail(ErrorKind::kInvalidInput, "cannot write trace file " + ctx.trace_path);
    write_trace(trace, result.trajectory);
  }
  return std::holds_alternative<verdicts::Cycling>(result.verdict) ? kExitNegative : kExitOk;
}

int cmd_pne(const Context& ctx, json& doc) {
  const Game game = ctx.doc->game ? *ctx.doc->game
                                  : induced_game(need_system(ctx), ctx.options.state_budget);
  doc["pne"] = states_json(game.space(), enumerate_pne(game, ctx.options.state_budget));
  return kExitOk;
}

int cmd_uncoupled(const Context& ctx, json& doc, const std::string& protocol_flag) {
  const Game& game = need_game(ctx);
  using C = AnalysisRequest::Check;
  C protocol = C::kThreeRecall;
  if (!protocol_flag.empty()) {
    if (protocol_flag == "three-recall") protocol = C::kThreeRecall;
    else if (protocol_flag == "two-recall") protocol = C::kTwoRecall;
    else if (protocol_flag == "stay-or-roll") protocol = C::kStayOrRoll;
    else fail(ErrorKind::kInvalidInput, "unknown protocol '" + protocol_flag + "'");
  } else if (ctx.doc->analysis && ctx.doc->analysis->type == AnalysisRequest::Type::kUncoupled) {
    protocol = ctx.doc->analysis->protocol;
  }
  StabilizationVerdict v;
  switch (protocol) {
    case C::kThreeRecall:
      doc["protocol"] = "three-recall";
      v = check_self_stabilization(Protocol::kThreeRecall, game, ctx.options.state_budget);
      break;
    case C::kTwoRecall:
      doc["protocol"] = "two-recall";
      v = check_self_stabilization(Protocol::kTwoRecall, game, ctx.options.state_budget);
      break;
    case C::kStayOrRoll:
      doc["protocol"] = "stay-or-roll";
      v = check_self_stabilization_randomized(game, ctx.options.state_budget);
      break;
  }
  doc["verdict"] = to_string(v.kind);
  if (!v.witness.empty()) {
    doc["witness"] = {{"initial", states_json(game.space(), v.witness)}};
  }
  doc["pne"] = states_json(game.space(), enumerate_pne(game, ctx.options.state_budget));
  return v.kind == StabilizationVerdict::Kind::kFails ? kExitNegative : kExitOk;
}

int cmd_build(const Context& ctx, json& doc) {
  const HistorylessSystem& sys = need_system(ctx);
  sys.space().require_within(ctx.options.state_budget, "build output");
  std::vector<int> sizes;
  for (std::size_t i = 0; i < sys.node_count(); ++i) sizes.push_back(sys.space().size(i));
  json table = json::array();
  for (const State& row : sys.table()) table.push_back(row);
  const auto report = check_self_independent(sys);
  doc["system"] = {{"nodes", sys.node_count()},
                   {"actions", sizes},
                   {"self_independent", report.self_independent},
                   {"table", table}};
  doc["stable_states"] = states_json(sys.space(), stable_states(sys, ctx.options));
  return kExitOk;
}

std::optional<std::uint64_t> env_budget() {
  const char* raw = std::getenv("ASYNCDYN_BUDGET");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(raw, &used);
    if (used != std::string(raw).size() || v == 0) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::kInvalidInput, "ASYNCDYN_BUDGET must be a positive integer");
  }
}

json error_document(const Error& e) {
  json err = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
  if (const auto* s = dynamic_cast<const SchemaError*>(&e)) err["path"] = s->path();
  return {{"schema", kResultSchema}, {"error", err}};
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"Asynchronous interaction dynamics: simulate, analyze, build."};
  app.require_subcommand(1);
  std::string scenario_path, trace_path, protocol;
  std::optional<std::uint64_t> seed, max_steps, budget;
  const std::vector<std::string> names = {"analyze", "simulate", "pne",
                                          "uncoupled-check", "build", "export-dot"};
  for (const auto& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sub->add_option("--seed", seed, "seed for random schedules");
    sub->add_option("--max-steps", max_steps, "simulation step budget");
    sub->add_option("--budget", budget, "state budget (overrides ASYNCDYN_BUDGET)");
    if (name == "simulate") sub->add_option("--trace", trace_path, "write a step trace");
    if (name == "uncoupled-check") {
      sub->add_option("--protocol", protocol, "three-recall | two-recall | stay-or-roll");
    }
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(scenario_path, std::ios::binary);
    if (!in) fail(ErrorKind::kInvalidInput, "cannot read scenario file " + scenario_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const ScenarioDocument scenario = parse_scenario(buf.str());

    Context ctx{&scenario, buf.str(), seed, max_steps, {}, trace_path};
    if (max_steps && *max_steps == 0) fail(ErrorKind::kInvalidInput, "--max-steps must be positive");
    if (budget) {
      if (*budget == 0) fail(ErrorKind::kInvalidInput, "--budget must be positive");
      ctx.options.state_budget = *budget;
    } else if (const auto b = env_budget()) {
      ctx.options.state_budget = *b;
    }

    if (command == "export-dot") {
      const TransitionGraph graph(need_system(ctx), ctx.options);
      out << export_dot(graph);
      return kExitOk;
    }
    json doc = base_document(ctx, command);
    int code = kExitOk;
    if (command == "analyze") code = cmd_analyze(ctx, doc);
    else if (command == "simulate") code = cmd_simulate(ctx, doc);
    else if (command == "pne") code = cmd_pne(ctx, doc);
    else if (command == "uncoupled-check") code = cmd_uncoupled(ctx, doc, protocol);
    else code = cmd_build(ctx, doc);
    out << doc.dump(2) << "\n";
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    out << error_document(e).dump(2) << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace asyncdyn::cli
