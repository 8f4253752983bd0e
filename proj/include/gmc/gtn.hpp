#pragma once

// Goal task networks: a node is (subs, guard, transition). An execution of
// a node runs complete executions of its subs, zero or more times each in
// any order, then fires the node itself. The translation into the process
// language makes the model's terminating traces coincide with the flattened
// execution set, which is what the correspondence tests check.

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "gmc/explorer.hpp"
#include "gmc/parser.hpp"
#include "gmc/printer.hpp"
#include "gmc/semantics.hpp"

namespace gmc {

struct GtnNode {
  std::string id;                  // doubles as the event label
  std::vector<std::string> subs;   // ids; empty = primitive
  CondP guard;
  Program transition;
  bool is_goal = false;            // annotation only
};

struct GtnProblem {
  std::vector<VarDecl> variables;  // init already reflects the initial state
  std::vector<GtnNode> nodes;
  std::string root;

  const GtnNode* find(const std::string& id) const {
    for (const auto& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }

  // Vars-only model for guard/transition evaluation.
  Model var_model() const {
    Model m;
    m.vars = variables;
    return m;
  }
};

struct GtnExecution {
  std::vector<std::string> ids;
  std::vector<std::vector<Int>> vals;  // size ids.size()+1, s_0 first
};

// A fault raised while firing, carrying the firings that preceded it.
struct GtnFault : std::runtime_error {
  std::vector<std::string> partial;
  GtnFault(const std::string& msg, std::vector<std::string> seq)
      : std::runtime_error(msg), partial(std::move(seq)) {}
};

inline void validate_gtn(const GtnProblem& p) {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  if (!p.find(p.root)) fail("gtn: root node '" + p.root + "' not defined");
  std::set<std::string> ids;
  for (const auto& n : p.nodes) {
    if (!ids.insert(n.id).second) fail("gtn: duplicate node '" + n.id + "'");
    if (n.id.empty() ||
        !(std::isalpha((unsigned char)n.id[0]) || n.id[0] == '_'))
      fail("gtn: node id '" + n.id + "' is not an identifier");
    for (char c : n.id)
      if (!(std::isalnum((unsigned char)c) || c == '_'))
        fail("gtn: node id '" + n.id + "' is not an identifier");
    for (const auto& s : n.subs)
      if (!p.find(s)) fail("gtn: node '" + n.id + "' lists unknown sub '" + s + "'");
  }
  // acyclic through subs: depth-first, 0 = new, 1 = open, 2 = done
  std::map<std::string, int> mark;
  std::vector<const GtnNode*> stack;
  auto dfs = [&](auto&& self, const GtnNode& n) -> void {
    int& m = mark[n.id];
    if (m == 2) return;
    if (m == 1) fail("gtn: sub hierarchy has a cycle through '" + n.id + "'");
    m = 1;
    for (const auto& s : n.subs) self(self, *p.find(s));
    m = 2;
  };
  for (const auto& n : p.nodes) dfs(dfs, n);
  // guards and transitions resolve against the declared variables
  Model vm = p.var_model();
  ValidationReport rep;
  detail::Validator v{vm, rep, {}};
  for (const auto& n : p.nodes) {
    v.walk(n.guard);
    v.walk(n.transition);
  }
  if (!rep.ok()) fail("gtn: " + rep.to_string());
}

struct FireOutcome {
  bool fired = false;
  std::vector<Int> after;
};

inline FireOutcome gtn_fire(const Engine& eng, const GtnNode& node,
                            const std::vector<Int>& vals) {
  if (!eng.eval_cond(vals, node.guard)) return {false, {}};
  return {true, eng.exec_program(vals, node.transition)};
}

// All valid executions of the root whose total number of firings is at most
// max_steps, deduplicated (a flattened sequence determines its valuations)
// and ordered by length then lexicographically.
inline std::vector<GtnExecution> enumerate_executions(const GtnProblem& p,
                                                      const Engine& eng,
                                                      int max_steps) {
  const GtnNode* root = p.find(p.root);
  if (!root) throw std::invalid_argument("gtn: missing root");

  std::set<std::vector<std::string>> seqs;
  std::vector<std::string> prefix;  // firings so far; its size is the budget used

  // An execution of `node` is: complete executions of members of its subs,
  // zero or more in any order, then the node's own firing. `done` continues
  // with the post-firing valuation while prefix holds the flattened ids.
  std::function<void(const GtnNode&, const std::vector<Int>&,
                     const std::function<void(const std::vector<Int>&)>&)>
      exec_node;
  exec_node = [&](const GtnNode& node, const std::vector<Int>& val,
                  const std::function<void(const std::vector<Int>&)>& done) {
    if ((int)prefix.size() >= max_steps) return;
    bool enabled;
    try {
      enabled = eng.eval_cond(val, node.guard);
    } catch (const std::exception& e) {
      throw GtnFault(e.what(), prefix);
    }
    if (enabled) {
      std::vector<Int> after;
      try {
        after = eng.exec_program(val, node.transition);
      } catch (const std::exception& e) {
        throw GtnFault(e.what(), prefix);
      }
      prefix.push_back(node.id);
      done(after);
      prefix.pop_back();
    }
    for (const auto& sid : node.subs) {
      const GtnNode& sub = *p.find(sid);
      exec_node(sub, val, [&](const std::vector<Int>& after_sub) {
        exec_node(node, after_sub, done);
      });
    }
  };

  std::vector<Int> init;
  for (const auto& v : p.variables)
    for (Int x : v.init) init.push_back(x);
  exec_node(*root, init, [&](const std::vector<Int>&) { seqs.insert(prefix); });

  std::vector<GtnExecution> out;
  for (const auto& seq : seqs) {
    GtnExecution e;
    e.ids = seq;
    e.vals.push_back(init);
    std::vector<Int> cur = init;
    for (const auto& id : seq) {
      FireOutcome f = gtn_fire(eng, *p.find(id), cur);
      if (!f.fired)
        throw std::logic_error("gtn: enumerated firing no longer enabled");
      cur = f.after;
      e.vals.push_back(cur);
    }
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const GtnExecution& a, const GtnExecution& b) {
    if (a.ids.size() != b.ids.size()) return a.ids.size() < b.ids.size();
    return a.ids < b.ids;
  });
  return out;
}

// Translation template, per node e with subs e_0..e_{n-1}:
//   trans_e() = [g_e] e{tau_e} -> Skip;
//   sub_e()   = (e_0() <> ... <> e_{n-1}()); (sub_e() <> Skip);
//   e()       = (sub_e() <> Skip); trans_e();
// and for primitive nodes simply e() = trans_e();
inline Model translate_gtn(const GtnProblem& p) {
  validate_gtn(p);
  Model m;
  m.vars = p.variables;
  std::set<std::string> names;
  for (const auto& n : p.nodes) {
    if (!names.insert(n.id).second || !names.insert("trans_" + n.id).second ||
        (!n.subs.empty() && !names.insert("sub_" + n.id).second))
      throw std::invalid_argument(
          "gtn: node ids collide with generated process names near '" + n.id +
          "'");
  }
  for (const auto& n : p.nodes) {
    ProcDef trans;
    trans.name = "trans_" + n.id;
    trans.body = proc_guard(
        n.guard,
        proc_prefix(n.id, nullptr, std::make_shared<Program>(n.transition),
                    proc_skip()));
    if (n.subs.empty()) {
      m.procs.push_back(trans);
      ProcDef self;
      self.name = n.id;
      self.body = proc_call(trans.name, {});
      m.procs.push_back(self);
      continue;
    }
    ProcP chain = proc_call(n.subs[0], {});
    for (std::size_t i = 1; i < n.subs.size(); ++i)
      chain = proc_bin(ProcK::IntChoice, std::move(chain),
                       proc_call(n.subs[i], {}));
    ProcDef sub;
    sub.name = "sub_" + n.id;
    sub.body = proc_bin(
        ProcK::Seq, std::move(chain),
        proc_bin(ProcK::IntChoice, proc_call(sub.name, {}), proc_skip()));
    m.procs.push_back(trans);
    m.procs.push_back(sub);
    ProcDef self;
    self.name = n.id;
    self.body = proc_bin(
        ProcK::Seq,
        proc_bin(ProcK::IntChoice, proc_call(sub.name, {}), proc_skip()),
        proc_call(trans.name, {}));
    m.procs.push_back(self);
  }
  return m;
}

// Translate, then plan by reachability. The trace's labels are node ids.
inline CheckResult solve_gtn(const GtnProblem& p, const CondP& goal,
                             const std::string& objective, OptDir dir,
                             const EngineOptions& eopt = {},
                             const ExplorerOptions& xopt = {}) {
  Model m = translate_gtn(p);
  Engine eng(m, eopt);
  Explorer ex(eng, xopt);
  if (objective.empty()) return ex.check_reaches(p.root, {}, goal);
  return ex.check_reaches_optimal(p.root, {}, goal, objective, dir);
}

// ---- JSON problem files ----
//
// { "root": "mission",
//   "variables": [{"name":"x","range":[0,5],"init":0},
//                 {"name":"a","len":3,"init":[0,0,0]}],
//   "initial": {"x": 2},
//   "nodes": [{"id":"mission","subs":["s0"],"guard":"true",
//              "transition":"x = 1;","kind":"task"}] }

inline GtnProblem gtn_from_json(const nlohmann::json& j) {
  GtnProblem p;
  p.root = j.at("root").get<std::string>();
  for (const auto& jv : j.at("variables")) {
    VarDecl v;
    v.name = jv.at("name").get<std::string>();
    v.array_len = jv.value("len", 0);
    if (jv.contains("range")) {
      v.has_range = true;
      v.lo = jv.at("range").at(0).get<Int>();
      v.hi = jv.at("range").at(1).get<Int>();
    }
    if (jv.contains("init")) {
      if (jv.at("init").is_array())
        for (const auto& x : jv.at("init")) v.init.push_back(x.get<Int>());
      else
        v.init.push_back(jv.at("init").get<Int>());
    }
    while ((Int)v.init.size() < v.slot_count()) v.init.push_back(0);
    p.variables.push_back(std::move(v));
  }
  if (j.contains("initial")) {
    for (auto it = j.at("initial").begin(); it != j.at("initial").end(); ++it) {
      bool found = false;
      for (auto& v : p.variables) {
        if (v.name != it.key()) continue;
        found = true;
        if (it.value().is_array()) {
          std::vector<Int> xs;
          for (const auto& x : it.value()) xs.push_back(x.get<Int>());
          if ((Int)xs.size() != v.slot_count())
            throw std::invalid_argument("gtn: initial for '" + v.name +
                                        "' has wrong length");
          v.init = std::move(xs);
        } else {
          v.init.assign(1, it.value().get<Int>());
        }
      }
      if (!found)
        throw std::invalid_argument("gtn: initial names unknown variable '" +
                                    it.key() + "'");
    }
  }
  for (const auto& jn : j.at("nodes")) {
    GtnNode n;
    n.id = jn.at("id").get<std::string>();
    if (jn.contains("subs"))
      for (const auto& s : jn.at("subs")) n.subs.push_back(s.get<std::string>());
    n.guard = parse_cond_text(jn.value("guard", "true"));
    n.transition = parse_program_text(jn.value("transition", ""));
    n.is_goal = jn.value("kind", "task") == std::string("goal");
    p.nodes.push_back(std::move(n));
  }
  validate_gtn(p);
  return p;
}

inline nlohmann::json gtn_to_json(const GtnProblem& p) {
  nlohmann::json j;
  j["root"] = p.root;
  j["variables"] = nlohmann::json::array();
  for (const auto& v : p.variables) {
    nlohmann::json jv;
    jv["name"] = v.name;
    if (v.is_array()) jv["len"] = v.array_len;
    if (v.has_range) jv["range"] = {v.lo, v.hi};
    if (v.is_array())
      jv["init"] = v.init;
    else
      jv["init"] = v.init[0];
    j["variables"].push_back(jv);
  }
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : p.nodes) {
    nlohmann::json jn;
    jn["id"] = n.id;
    if (!n.subs.empty()) jn["subs"] = n.subs;
    jn["guard"] = print_cond(n.guard);
    jn["transition"] = print_program(n.transition);
    if (n.is_goal) jn["kind"] = "goal";
    j["nodes"].push_back(jn);
  }
  return j;
}

}  // namespace gmc
