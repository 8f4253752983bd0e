#pragma once

// Explicit-state search over Engine's transition system. Breadth-first,
// level-synchronized, and deterministic: within a level, parents are
// expanded in discovery order and steps arrive (label, target-key) sorted,
// so discovery order equals lexicographic order of label sequences. The
// first goal hit is therefore the lexicographically least shortest witness,
// independent of worker count.

#include <chrono>
#include <cstdint>
#include <exception>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "gmc/semantics.hpp"

namespace gmc {

struct TraceStep {
  std::string label;
  std::vector<Int> post_vals;
};

struct WitnessTrace {
  std::string origin;  // which check produced it
  std::vector<Int> initial_vals;
  std::vector<TraceStep> steps;
  std::vector<std::string> labels() const {
    std::vector<std::string> ls;
    ls.reserve(steps.size());
    for (const auto& s : steps) ls.push_back(s.label);
    return ls;
  }
};

enum class CheckKind {
  Reachable,
  Unreachable,
  Optimal,
  SafetyHolds,
  SafetyViolated,
  DeadlockFound,
  DeadlockFreeOk,
};

inline const char* check_kind_name(CheckKind k) {
  switch (k) {
    case CheckKind::Reachable: return "Reachable";
    case CheckKind::Unreachable: return "Unreachable";
    case CheckKind::Optimal: return "Optimal";
    case CheckKind::SafetyHolds: return "SafetyHolds";
    case CheckKind::SafetyViolated: return "SafetyViolated";
    case CheckKind::DeadlockFound: return "DeadlockFound";
    case CheckKind::DeadlockFreeOk: return "DeadlockFreeOk";
  }
  return "?";
}

struct SearchStats {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  std::uint64_t peak_frontier = 0;
  double wall_ms = 0;
};

struct CheckResult {
  CheckKind kind;
  bool has_witness = false;
  WitnessTrace witness;
  Int objective = 0;
  SearchStats stats;
  // The "yes" outcomes: property holds / plan found.
  bool holds() const {
    return kind == CheckKind::Reachable || kind == CheckKind::Optimal ||
           kind == CheckKind::SafetyHolds || kind == CheckKind::DeadlockFreeOk;
  }
};

enum class ReplayReason { NoSuchLabel, Ambiguous, Fault };

struct ReplayVerdict {
  bool accepted = false;
  std::vector<Int> final_vals;
  std::vector<TraceStep> steps;  // recorded up to the failure point
  std::size_t reject_index = 0;
  ReplayReason reason = ReplayReason::NoSuchLabel;
  std::string message;
};

// A model fault (eval/range/limit) hit during exploration, with the path
// to the configuration whose expansion faulted.
struct StateSpaceFault : std::runtime_error {
  WitnessTrace trace_to_fault;
  std::string inner;
  StateSpaceFault(std::string inner_msg, WitnessTrace trace)
      : std::runtime_error("state-space fault: " + inner_msg + " (after " +
                           std::to_string(trace.steps.size()) + " steps)"),
        trace_to_fault(std::move(trace)),
        inner(std::move(inner_msg)) {}
};

struct ExplorerOptions {
  std::uint64_t state_cap = 50000000;
  std::uint32_t max_depth = 1000000;  // witness-length cap
  int workers = 1;
};

class Explorer {
 public:
  Explorer(const Engine& eng, ExplorerOptions opt = {})
      : eng_(eng), opt_(opt) {}

  const Engine& engine() const { return eng_; }

  CheckResult check_reaches(const std::string& entry,
                            const std::vector<Int>& args, const CondP& goal) {
    Search s = bfs(entry, args, goal, /*stop_on_goal=*/true,
                   /*objective_slot=*/-1, OptDir::Max,
                   /*detect_deadlock=*/false);
    CheckResult r;
    r.stats = s.stats;
    if (s.found_goal) {
      r.kind = CheckKind::Reachable;
      r.has_witness = true;
      r.witness = reconstruct(entry, args, s, s.goal_key, "reaches");
    } else {
      r.kind = CheckKind::Unreachable;
    }
    return r;
  }

  CheckResult check_reaches_optimal(const std::string& entry,
                                    const std::vector<Int>& args,
                                    const CondP& goal,
                                    const std::string& objective, OptDir dir) {
    Int slot = eng_.slot_of(objective);
    Search s = bfs(entry, args, goal, /*stop_on_goal=*/false, slot, dir,
                   /*detect_deadlock=*/false);
    CheckResult r;
    r.stats = s.stats;
    if (s.found_goal) {
      r.kind = CheckKind::Optimal;
      r.has_witness = true;
      r.objective = s.best_value;
      r.witness = reconstruct(entry, args, s, s.goal_key, "reaches-optimal");
    } else {
      r.kind = CheckKind::Unreachable;
    }
    return r;
  }

  CheckResult check_global_safety(const std::string& entry,
                                  const std::vector<Int>& args,
                                  const CondP& cond) {
    CheckResult inner = check_reaches(entry, args, cond_not(cond, cond->pos));
    CheckResult r;
    r.stats = inner.stats;
    if (inner.kind == CheckKind::Reachable) {
      r.kind = CheckKind::SafetyViolated;
      r.has_witness = true;
      r.witness = std::move(inner.witness);
      r.witness.origin = "safety";
    } else {
      r.kind = CheckKind::SafetyHolds;
    }
    return r;
  }

  CheckResult check_deadlock_free(const std::string& entry,
                                  const std::vector<Int>& args) {
    Search s = bfs(entry, args, nullptr, /*stop_on_goal=*/false,
                   /*objective_slot=*/-1, OptDir::Max,
                   /*detect_deadlock=*/true);
    CheckResult r;
    r.stats = s.stats;
    if (s.found_goal) {  // goal_key holds the deadlocked config
      r.kind = CheckKind::DeadlockFound;
      r.has_witness = true;
      r.witness = reconstruct(entry, args, s, s.goal_key, "deadlock");
    } else {
      r.kind = CheckKind::DeadlockFreeOk;
    }
    return r;
  }

  ReplayVerdict replay(const std::string& entry, const std::vector<Int>& args,
                       const std::vector<std::string>& labels) {
    ReplayVerdict v;
    Config c = eng_.initial_config(entry, args);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      std::vector<Step> steps;
      try {
        steps = eng_.successors(c);
      } catch (const std::exception& e) {
        v.reject_index = i;
        v.reason = ReplayReason::Fault;
        v.message = e.what();
        return v;
      }
      const Step* match = nullptr;
      bool ambiguous = false;
      for (const auto& s : steps) {
        if (s.label != labels[i]) continue;
        if (match) { ambiguous = true; break; }
        match = &s;
      }
      if (ambiguous) {
        v.reject_index = i;
        v.reason = ReplayReason::Ambiguous;
        v.message = "label '" + labels[i] + "' is ambiguous here";
        return v;
      }
      if (!match) {
        v.reject_index = i;
        v.reason = ReplayReason::NoSuchLabel;
        v.message = "no enabled step labelled '" + labels[i] + "'";
        return v;
      }
      c = match->after;
      v.steps.push_back({labels[i], c.vals});
    }
    v.accepted = true;
    v.final_vals = c.vals;
    return v;
  }

  // Dispatch an #assert record.
  CheckResult run_assertion(const Assertion& a) {
    switch (a.k) {
      case AssertK::Reaches:
        return check_reaches(a.entry, a.entry_args, a.cond);
      case AssertK::ReachesOptimal:
        return check_reaches_optimal(a.entry, a.entry_args, a.cond,
                                     a.objective, a.dir);
      case AssertK::Safety:
        return check_global_safety(a.entry, a.entry_args, a.cond);
      case AssertK::DeadlockFree:
        return check_deadlock_free(a.entry, a.entry_args);
    }
    throw EvalFault("unreachable assertion kind");
  }

 private:
  struct NodeInfo {
    Digest parent;
    std::uint32_t label_id = 0;
    std::uint32_t depth = 0;
  };

  struct Search {
    std::unordered_map<Digest, NodeInfo, DigestHash> visited;
    std::vector<std::string> label_pool;
    bool found_goal = false;
    Digest goal_key;
    Int best_value = 0;
    SearchStats stats;
  };

  struct Expansion {
    std::vector<Step> steps;
    bool deadlock = false;
    std::exception_ptr fault;
  };

  const Engine& eng_;
  ExplorerOptions opt_;

  std::uint32_t intern(Search& s,
                       std::unordered_map<std::string, std::uint32_t>& ids,
                       const std::string& label) {
    auto it = ids.find(label);
    if (it != ids.end()) return it->second;
    std::uint32_t id = (std::uint32_t)s.label_pool.size();
    s.label_pool.push_back(label);
    ids.emplace(label, id);
    return id;
  }

  Search bfs(const std::string& entry, const std::vector<Int>& args,
             const CondP& goal, bool stop_on_goal, Int objective_slot,
             OptDir dir, bool detect_deadlock) {
    auto t0 = std::chrono::steady_clock::now();
    Search s;
    std::unordered_map<std::string, std::uint32_t> label_ids;
    auto finish = [&](Search& out) -> Search& {
      out.stats.states = out.visited.size();
      out.stats.wall_ms =
          std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - t0)
              .count();
      return out;
    };

    Config init = eng_.initial_config(entry, args);
    Digest init_key = eng_.canonical_key(init);
    s.visited.emplace(init_key, NodeInfo{init_key, 0, 0});

    std::vector<Config> frontier{init};
    std::vector<Digest> frontier_keys{init_key};
    std::uint32_t depth = 0;

    while (!frontier.empty()) {
      s.stats.peak_frontier =
          std::max<std::uint64_t>(s.stats.peak_frontier, frontier.size());

      // Scan this level, in discovery order, for goals.
      if (goal) {
        for (std::size_t i = 0; i < frontier.size(); ++i) {
          bool hit;
          try {
            hit = eng_.eval_cond(frontier[i].vals, goal);
          } catch (const std::exception& e) {
            throw wrap_fault(entry, args, s, frontier_keys[i], e.what());
          }
          if (!hit) continue;
          if (stop_on_goal) {
            s.found_goal = true;
            s.goal_key = frontier_keys[i];
            return finish(s);
          }
          Int value = frontier[i].vals[(std::size_t)objective_slot];
          bool better =
              !s.found_goal || (dir == OptDir::Max ? value > s.best_value
                                                   : value < s.best_value);
          if (better) {
            s.found_goal = true;
            s.best_value = value;
            s.goal_key = frontier_keys[i];
          }
        }
      }

      // Expand every config of the level. Workers split the frontier into
      // contiguous chunks; the merge below is sequential in parent order,
      // which keeps discovery order (and so all results) deterministic.
      std::vector<Expansion> exps(frontier.size());
      int workers = opt_.workers;
      if (workers > (int)frontier.size()) workers = (int)frontier.size();
      auto expand_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          try {
            exps[i].steps = eng_.successors(frontier[i]);
            if (detect_deadlock && exps[i].steps.empty())
              exps[i].deadlock = !eng_.can_terminate(frontier[i]);
          } catch (...) {
            exps[i].fault = std::current_exception();
          }
        }
      };
      if (workers <= 1) {
        expand_range(0, frontier.size());
      } else {
        std::vector<std::thread> pool;
        std::size_t n = frontier.size();
        for (int w = 0; w < workers; ++w) {
          std::size_t lo = n * (std::size_t)w / (std::size_t)workers;
          std::size_t hi = n * (std::size_t)(w + 1) / (std::size_t)workers;
          pool.emplace_back(expand_range, lo, hi);
        }
        for (auto& t : pool) t.join();
      }

      std::vector<Config> next;
      std::vector<Digest> next_keys;
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        if (exps[i].fault) {
          std::string msg;
          try {
            std::rethrow_exception(exps[i].fault);
          } catch (const std::exception& e) {
            msg = e.what();
          }
          throw wrap_fault(entry, args, s, frontier_keys[i], msg);
        }
        if (exps[i].deadlock) {
          s.found_goal = true;
          s.goal_key = frontier_keys[i];
          return finish(s);
        }
        s.stats.transitions += exps[i].steps.size();
        for (auto& st : exps[i].steps) {
          Digest key = eng_.canonical_key(st.after);
          auto ins = s.visited.emplace(
              key, NodeInfo{frontier_keys[i],
                            intern(s, label_ids, st.label), depth + 1});
          if (!ins.second) continue;
          if (s.visited.size() > opt_.state_cap)
            throw LimitFault(LimitFault::Kind::StateCap,
                             "state cap " + std::to_string(opt_.state_cap) +
                                 " exceeded");
          next.push_back(std::move(st.after));
          next_keys.push_back(key);
        }
      }
      if (!next.empty() && depth + 1 > opt_.max_depth)
        throw LimitFault(LimitFault::Kind::DepthCap,
                         "witness-length cap " +
                             std::to_string(opt_.max_depth) + " exceeded");
      frontier = std::move(next);
      frontier_keys = std::move(next_keys);
      ++depth;
    }
    return finish(s);
  }

  // Walk parents back to the root, then replay forward to record the
  // valuations the trace file format wants.
  WitnessTrace reconstruct(const std::string& entry,
                           const std::vector<Int>& args, const Search& s,
                           const Digest& goal_key, const char* origin) {
    std::vector<std::pair<std::string, Digest>> chain;  // (label, key)
    Digest k = goal_key;
    while (true) {
      const NodeInfo& n = s.visited.at(k);
      if (n.parent == k) break;  // root links to itself
      chain.emplace_back(s.label_pool[n.label_id], k);
      k = n.parent;
    }
    std::reverse(chain.begin(), chain.end());

    WitnessTrace w;
    w.origin = origin;
    Config c = eng_.initial_config(entry, args);
    w.initial_vals = c.vals;
    for (const auto& [label, key] : chain) {
      std::vector<Step> steps = eng_.successors(c);
      const Step* found = nullptr;
      for (const auto& st : steps) {
        if (st.label == label && eng_.canonical_key(st.after) == key) {
          found = &st;
          break;
        }
      }
      if (!found)
        throw std::logic_error("witness reconstruction lost the path");
      c = found->after;
      w.steps.push_back({label, c.vals});
    }
    return w;
  }

  StateSpaceFault wrap_fault(const std::string& entry,
                             const std::vector<Int>& args, const Search& s,
                             const Digest& at_key, const std::string& msg) {
    WitnessTrace t = reconstruct(entry, args, s, at_key, "fault");
    return StateSpaceFault(msg, std::move(t));
  }
};

// ---- trace file format ----
//
// gmc-trace v1 model=<hex digest> entry=<entry text>
// <index> <label> <name=value,...>        (changed slots only)

inline void write_trace(std::ostream& os, const Engine& eng,
                        const WitnessTrace& w, const std::string& entry_text) {
  os << "gmc-trace v1 model=" << eng.model().digest().hex()
     << " entry=" << entry_text << "\n";
  const std::vector<SlotInfo>& slots = eng.slots();
  std::vector<Int> prev = w.initial_vals;
  for (std::size_t i = 0; i < w.steps.size(); ++i) {
    os << i << " " << w.steps[i].label;
    std::string changes;
    for (std::size_t j = 0; j < slots.size(); ++j) {
      if (w.steps[i].post_vals[j] == prev[j]) continue;
      if (!changes.empty()) changes += ",";
      changes += slots[j].display + "=" + std::to_string(w.steps[i].post_vals[j]);
    }
    if (!changes.empty()) os << " " << changes;
    os << "\n";
    prev = w.steps[i].post_vals;
  }
}

struct TraceFile {
  std::string model_hex;
  std::string entry;
  std::vector<std::string> labels;
};

inline TraceFile read_trace(std::istream& is) {
  TraceFile t;
  std::string line;
  if (!std::getline(is, line))
    throw ParseError({1, 1}, "empty trace file");
  std::istringstream hs(line);
  std::string magic, ver, model_kv, entry_kv;
  hs >> magic >> ver >> model_kv;
  std::getline(hs, entry_kv);
  if (magic != "gmc-trace" || ver != "v1" ||
      model_kv.rfind("model=", 0) != 0)
    throw ParseError({1, 1}, "not a gmc-trace v1 file");
  t.model_hex = model_kv.substr(6);
  std::size_t p = entry_kv.find("entry=");
  if (p == std::string::npos)
    throw ParseError({1, 1}, "trace header lacks entry=");
  t.entry = entry_kv.substr(p + 6);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string idx, label;
    if (!(ls >> idx >> label))
      throw ParseError({lineno, 1}, "malformed trace step");
    t.labels.push_back(label);
  }
  return t;
}

}  // namespace gmc
