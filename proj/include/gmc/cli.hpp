#pragma once

// Command-line front end: check, plan, gtn, muc, replay, mission.
//
// Exit codes are a function of the verdict alone: 0 for the "yes" outcome
// (assertions hold, plan found, replay accepted, core printed, mission
// complete), 1 for the corresponding "no", 2 for a model or search fault,
// 64 for usage errors.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gmc/explorer.hpp"
#include "gmc/goal.hpp"
#include "gmc/gtn.hpp"
#include "gmc/mission.hpp"
#include "gmc/parser.hpp"
#include "gmc/printer.hpp"

namespace gmc {
namespace cli {

constexpr int kYes = 0;
constexpr int kNo = 1;
constexpr int kFault = 2;
constexpr int kUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << body;
}

inline std::string path_stem(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  return stem.empty() ? std::string("out") : stem;
}

// Search limits shared by the model-driven subcommands.
struct EngineFlags {
  std::uint64_t state_cap = ExplorerOptions{}.state_cap;
  std::uint32_t max_depth = ExplorerOptions{}.max_depth;
  int workers = 1;
  Int default_bound = EngineOptions{}.default_hi;
  bool emit_stats = false;

  ExplorerOptions explorer() const {
    ExplorerOptions x;
    x.state_cap = state_cap;
    x.max_depth = max_depth;
    x.workers = workers;
    return x;
  }
  EngineOptions engine() const {
    EngineOptions e;
    e.default_lo = -default_bound;
    e.default_hi = default_bound;
    return e;
  }
};

inline void add_engine_flags(CLI::App* cmd, EngineFlags& f, bool with_stats) {
  cmd->add_option("--state-cap", f.state_cap,
                  "abort with a limit fault beyond this many stored states");
  cmd->add_option("--max-depth", f.max_depth, "witness-length cap");
  cmd->add_option("--workers", f.workers, "expansion worker threads")
      ->check(CLI::PositiveNumber);
  if (with_stats) {
    cmd->add_option("--default-bound", f.default_bound,
                    "range half-width for variables declared without one");
    cmd->add_flag("--emit-stats", f.emit_stats,
                  "print a machine-readable stats line per search");
  }
}

inline std::string stats_line(const SearchStats& s) {
  std::ostringstream os;
  os << "stats states=" << s.states << " transitions=" << s.transitions
     << " peak_frontier=" << s.peak_frontier << " wall_ms=" << std::fixed
     << std::setprecision(3) << s.wall_ms;
  return os.str();
}

inline std::string entry_text(const std::string& name,
                              const std::vector<Int>& args) {
  std::string t = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) t += ",";
    t += std::to_string(args[i]);
  }
  return t + ")";
}

inline std::string join_labels(const std::vector<std::string>& ls) {
  std::string out;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (i) out += ",";
    out += ls[i];
  }
  return out;
}

// Inline assertions accept both the bare tail ("main() reaches g == 1")
// and the model-file form ("#assert main() reaches g == 1;").
inline Assertion parse_assert_flag(std::string text) {
  std::size_t b = text.find_first_not_of(" \t\r\n");
  if (b != std::string::npos && text.compare(b, 7, "#assert") == 0)
    text.erase(0, b + 7);
  std::size_t e = text.find_last_not_of(" \t\r\n");
  if (e != std::string::npos && text[e] == ';') text.erase(e);
  return parse_assertion_text(text);
}

inline void write_trace_file(const std::string& path, const Engine& eng,
                             const WitnessTrace& w, const std::string& entry) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  write_trace(out, eng, w, entry);
}

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& given,
                                  std::ostream& os) {
  if (given) return *given;
  std::random_device rd;
  std::uint64_t v = ((std::uint64_t)rd() << 32) ^ rd();
  os << "seed=" << v << "\n";
  return v;
}

// ---- check ----------------------------------------------------------------

inline int run_check(const std::string& model_path,
                     const std::string& assert_text,
                     const std::string& out_prefix, const EngineFlags& flags,
                     std::ostream& os) {
  Model m = parse_model(read_file(model_path));
  std::vector<Assertion> asserts;
  if (!assert_text.empty())
    asserts.push_back(parse_assert_flag(assert_text));
  else
    asserts = m.asserts;
  if (asserts.empty())
    throw UsageError("model has no assertions; pass one with --assert");
  Engine eng(m, flags.engine());
  Explorer ex(eng, flags.explorer());
  std::string prefix = out_prefix.empty() ? path_stem(model_path) : out_prefix;
  bool any_refuted = false;
  bool any_fault = false;
  for (std::size_t i = 0; i < asserts.size(); ++i) {
    const std::string et =
        entry_text(asserts[i].entry, asserts[i].entry_args);
    const std::string tf = prefix + ".a" + std::to_string(i) + ".trace";
    try {
      CheckResult r = ex.run_assertion(asserts[i]);
      if (flags.emit_stats) os << stats_line(r.stats) << "\n";
      bool ok = r.holds();
      any_refuted = any_refuted || !ok;
      os << "assert " << i << ": " << (ok ? "VALID" : "INVALID") << " ("
         << check_kind_name(r.kind) << ")";
      if (r.kind == CheckKind::Optimal) os << " objective=" << r.objective;
      if (r.has_witness) {
        write_trace_file(tf, eng, r.witness, et);
        os << " trace=" << tf;
      }
    } catch (const StateSpaceFault& f) {
      any_fault = true;
      write_trace_file(tf, eng, f.trace_to_fault, et);
      os << "assert " << i << ": FAULT (" << f.inner << ") trace=" << tf;
    } catch (const LimitFault& f) {
      any_fault = true;
      os << "assert " << i << ": FAULT (" << f.what() << ")";
    }
    os << " :: " << print_assertion(asserts[i]) << "\n";
  }
  if (any_fault) return kFault;
  return any_refuted ? kNo : kYes;
}

// ---- plan -----------------------------------------------------------------

inline int run_plan(const std::string& model_path,
                    const std::string& assert_text, const std::string& out_path,
                    const EngineFlags& flags, std::ostream& os) {
  Model m = parse_model(read_file(model_path));
  Assertion a;
  bool have = false;
  if (!assert_text.empty()) {
    a = parse_assert_flag(assert_text);
    have = true;
  } else {
    for (const auto& x : m.asserts)
      if (x.k == AssertK::ReachesOptimal) {
        a = x;
        have = true;
        break;
      }
  }
  if (!have)
    throw UsageError(
        "model has no reaches-optimal assertion; pass one with --assert");
  if (a.k != AssertK::ReachesOptimal && a.k != AssertK::Reaches)
    throw UsageError("plan needs a reaches or reaches-optimal assertion");
  Engine eng(m, flags.engine());
  Explorer ex(eng, flags.explorer());
  CheckResult r = ex.run_assertion(a);
  if (flags.emit_stats) os << stats_line(r.stats) << "\n";
  if (!r.holds()) {
    os << "no plan: goal is unreachable\n";
    return kNo;
  }
  std::string tf =
      out_path.empty() ? path_stem(model_path) + ".plan.trace" : out_path;
  write_trace_file(tf, eng, r.witness, entry_text(a.entry, a.entry_args));
  os << "plan";
  if (r.kind == CheckKind::Optimal) os << " objective=" << r.objective;
  os << " length=" << r.witness.steps.size() << " trace=" << tf
     << " labels=" << join_labels(r.witness.labels()) << "\n";
  return kYes;
}

// ---- gtn ------------------------------------------------------------------

inline int run_gtn(const std::string& problem_path, const std::string& goal_text,
                   const std::string& objective, bool minimize,
                   const std::string& out_path, const EngineFlags& flags,
                   std::ostream& os) {
  GtnProblem p = gtn_from_json(nlohmann::json::parse(read_file(problem_path)));
  if (goal_text.empty()) throw UsageError("gtn needs --goal");
  CondP goal = parse_cond_text(goal_text);
  Model m = translate_gtn(p);
  Engine eng(m, flags.engine());
  Explorer ex(eng, flags.explorer());
  CheckResult r =
      objective.empty()
          ? ex.check_reaches(p.root, {}, goal)
          : ex.check_reaches_optimal(p.root, {}, goal, objective,
                                     minimize ? OptDir::Min : OptDir::Max);
  if (flags.emit_stats) os << stats_line(r.stats) << "\n";
  if (!r.holds()) {
    os << "Unreachable\n";
    return kNo;
  }
  std::string tf =
      out_path.empty() ? path_stem(problem_path) + ".gtn.trace" : out_path;
  write_trace_file(tf, eng, r.witness, p.root + "()");
  if (r.kind == CheckKind::Optimal)
    os << "Optimal objective=" << r.objective;
  else
    os << "Reachable";
  os << " length=" << r.witness.steps.size() << " trace=" << tf
     << " labels=" << join_labels(r.witness.labels()) << "\n";
  return kYes;
}

// ---- muc ------------------------------------------------------------------

inline int run_muc(const std::string& model_path, const std::string& ledger_path,
                   const std::string& entry,
                   const std::optional<std::uint64_t>& seed,
                   const EngineFlags& flags, std::ostream& os) {
  Model m = parse_model(read_file(model_path));
  CurrencyLedger lg =
      ledger_from_json(nlohmann::json::parse(read_file(ledger_path)));
  if (lg.goals.empty()) throw UsageError("ledger has no goals");
  auto [name, args] = parse_entry_text(entry);
  Engine eng(m, flags.engine());
  Explorer ex(eng, flags.explorer());
  std::mt19937_64 rng(resolve_seed(seed, os));
  try {
    std::vector<GoalSpec> core = find_muc(ex, name, args, lg.goals, rng);
    os << "core n=" << core.size() << ":";
    for (const auto& g : core) os << " " << g.name;
    os << "\n";
    return kYes;
  } catch (const NotUnsatisfiable&) {
    os << "compatible: goal set has no unsatisfiable core\n";
    return kNo;
  }
}

// ---- replay ---------------------------------------------------------------

inline const char* replay_reason_name(ReplayReason r) {
  switch (r) {
    case ReplayReason::NoSuchLabel: return "no-such-label";
    case ReplayReason::Ambiguous: return "ambiguous";
    case ReplayReason::Fault: return "fault";
  }
  return "?";
}

inline int run_replay(const std::string& model_path,
                      const std::string& trace_path, const std::string& entry,
                      const EngineFlags& flags, std::ostream& os) {
  Model m = parse_model(read_file(model_path));
  std::istringstream tin(read_file(trace_path));
  TraceFile t = read_trace(tin);
  Engine eng(m, flags.engine());
  if (t.model_hex != m.digest().hex())
    std::cerr << "warning: trace was recorded against a different model\n";
  auto [name, args] = parse_entry_text(entry.empty() ? t.entry : entry);
  Explorer ex(eng, flags.explorer());
  ReplayVerdict v = ex.replay(name, args, t.labels);
  if (v.accepted) {
    os << "Accepted steps=" << t.labels.size() << "\n";
    return kYes;
  }
  os << "Rejected index=" << v.reject_index
     << " reason=" << replay_reason_name(v.reason) << ": " << v.message
     << "\n";
  return kNo;
}

// ---- mission --------------------------------------------------------------

inline int run_mission_cmd(const std::string& config_path,
                           const std::optional<std::uint64_t>& seed,
                           const std::string& out_path,
                           const std::string& dump_model,
                           const EngineFlags& flags, std::ostream& os) {
  nlohmann::json j = nlohmann::json::parse(read_file(config_path));
  MissionConfig cfg = mission_from_json(j);
  // the generated model does not depend on the seed, so dumping skips seed
  // resolution entirely
  if (!dump_model.empty()) {
    MissionModelInfo info = build_mission_model_info(cfg);
    write_file(dump_model,
               "// generated by: gmc mission " + config_path +
                   " --dump-model\n// currency wiring included; edits will "
                   "be overwritten by the next dump\n\n" +
               info.text);
    os << "model=" << dump_model << "\n";
    return kYes;
  }
  if (seed)
    cfg.seed = *seed;
  else if (!j.contains("seed"))
    cfg.seed = resolve_seed(std::nullopt, os);
  MissionLog log = run_mission(cfg, flags.explorer());
  std::string body = log.to_string();
  os << body;
  if (!out_path.empty()) write_file(out_path, body);
  return log.success ? kYes : kNo;
}

// ---- dispatch ---------------------------------------------------------------

inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{
      "explicit-state checking, planning, and mission tools for gmc models"};
  app.require_subcommand(1);

  EngineFlags flags;

  auto* c_check = app.add_subcommand(
      "check", "run a model's assertions (or one given inline)");
  std::string check_model, check_assert, check_out;
  c_check->add_option("model", check_model, "model file (.gmc)")->required();
  c_check->add_option("--assert", check_assert,
                      "inline assertion text; overrides the file's asserts");
  c_check->add_option("--out", check_out,
                      "prefix for witness trace files (default: model stem)");
  add_engine_flags(c_check, flags, true);

  auto* c_plan = app.add_subcommand(
      "plan", "search the optimal witness of a reaches-optimal assertion");
  std::string plan_model, plan_assert, plan_out;
  c_plan->add_option("model", plan_model, "model file (.gmc)")->required();
  c_plan->add_option("--assert", plan_assert,
                     "inline assertion text; overrides the file's asserts");
  c_plan->add_option("--out", plan_out,
                     "trace output path (default: <model stem>.plan.trace)");
  add_engine_flags(c_plan, flags, true);

  auto* c_gtn = app.add_subcommand(
      "gtn", "translate a task-network problem file and solve it");
  std::string gtn_problem, gtn_goal, gtn_objective, gtn_out;
  bool gtn_min = false;
  c_gtn->add_option("problem", gtn_problem, "problem file (.json)")->required();
  c_gtn->add_option("--goal", gtn_goal, "goal condition over the variables")
      ->required();
  c_gtn->add_option("--objective", gtn_objective,
                    "variable to optimize (omit for plain reachability)");
  c_gtn->add_flag("--min", gtn_min, "minimize the objective (default: max)");
  c_gtn->add_option("--out", gtn_out,
                    "trace output path (default: <problem stem>.gtn.trace)");
  add_engine_flags(c_gtn, flags, true);

  auto* c_muc = app.add_subcommand(
      "muc", "extract a minimal unsatisfiable core from a ledger's goals");
  std::string muc_model, muc_ledger, muc_entry = "main()";
  std::optional<std::uint64_t> muc_seed;
  c_muc->add_option("model", muc_model, "model file (.gmc)")->required();
  c_muc->add_option("--ledger", muc_ledger, "currency ledger (.json)")
      ->required();
  c_muc->add_option("--entry", muc_entry, "entry process (default: main())");
  c_muc->add_option("--seed", muc_seed,
                    "bipartition seed (omitted: random, printed)");
  add_engine_flags(c_muc, flags, false);

  auto* c_replay = app.add_subcommand(
      "replay", "replay a trace file against a model");
  std::string replay_model, replay_trace, replay_entry;
  c_replay->add_option("model", replay_model, "model file (.gmc)")->required();
  c_replay->add_option("trace", replay_trace, "trace file")->required();
  c_replay->add_option("--entry", replay_entry,
                       "entry process (default: the trace header's)");
  add_engine_flags(c_replay, flags, false);

  auto* c_mission = app.add_subcommand(
      "mission", "run the plan-execute-replan loop on a mission config");
  std::string mission_config, mission_out, mission_dump;
  std::optional<std::uint64_t> mission_seed;
  c_mission->add_option("config", mission_config, "mission config (.json)")
      ->required();
  c_mission->add_option("--seed", mission_seed,
                        "environment seed; overrides the config's");
  c_mission->add_option("--out", mission_out, "also write the log to a file");
  c_mission->add_option("--dump-model", mission_dump,
                        "write the generated model text and exit");
  add_engine_flags(c_mission, flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  std::ostream& os = std::cout;
  try {
    if (*c_check) return run_check(check_model, check_assert, check_out, flags, os);
    if (*c_plan) return run_plan(plan_model, plan_assert, plan_out, flags, os);
    if (*c_gtn)
      return run_gtn(gtn_problem, gtn_goal, gtn_objective, gtn_min, gtn_out,
                     flags, os);
    if (*c_muc)
      return run_muc(muc_model, muc_ledger, muc_entry, muc_seed, flags, os);
    if (*c_replay)
      return run_replay(replay_model, replay_trace, replay_entry, flags, os);
    if (*c_mission)
      return run_mission_cmd(mission_config, mission_seed, mission_out,
                             mission_dump, flags, os);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFault;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFault;
  }
  return kUsage;
}

}  // namespace cli
}  // namespace gmc
