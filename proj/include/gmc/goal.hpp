#pragma once

// Reward and resource reasoning over a single integer currency variable.
// Resources map consumption deltas into currency via monotone integer
// conversion functions; goals add rewards on their events. Goal-set
// compatibility is a reachability query on the conjunction, and minimal
// unsatisfiable cores come from a randomized divide-and-fix recursion.

#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "gmc/explorer.hpp"
#include "gmc/parser.hpp"
#include "gmc/printer.hpp"

namespace gmc {

struct ConversionFn {
  enum class Kind { Linear, Power, Logarithmic, Logistic };
  Kind kind = Kind::Linear;
  Int rate_num = 1, rate_den = 1;    // r, as an exact fraction
  Int exponent = 1;                  // power
  Int base = 2;                      // logarithmic
  Int level = 0, midpoint = 0;       // logistic L and m
  Int steep_num = 1, steep_den = 1;  // logistic k, as an exact fraction

  // Exact integer evaluation; sign(x) * fn(|x|) so that restoring a
  // resource credits the currency by the same amount consuming it costs.
  // Must agree with the cv* expression builtins (pinned by tests).
  Int apply(Int x) const {
    bool neg = x < 0;
    Int ax = neg ? -x : x;
    __int128 mag = 0;
    switch (kind) {
      case Kind::Linear:
        mag = ax;
        break;
      case Kind::Power: {
        mag = 1;
        for (Int i = 0; i < exponent; ++i) mag = mul_checked(mag, ax);
        break;
      }
      case Kind::Logarithmic:
        mag = ax == 0 ? 0 : int_log(base, ax);
        break;
      case Kind::Logistic: {
        __int128 t128 = mul_checked(steep_num, ax - midpoint);
        __int128 q = t128 / steep_den, r = t128 % steep_den;
        if (r != 0 && t128 < 0) --q;
        Int t = q > 62 ? 62 : (q < -62 ? (Int)-62 : (Int)q);
        __int128 v;
        if (t >= 0) {
          __int128 p2 = (__int128)1 << t;
          v = ((__int128)level * p2) / (p2 + 1);
        } else {
          v = (__int128)level / (((__int128)1 << -t) + 1);
        }
        Int out = checked_narrow(v, "logistic conversion");
        return neg ? -out : out;
      }
    }
    __int128 prod = mul_checked(rate_num, mag);
    __int128 q = prod / rate_den, r = prod % rate_den;
    if (r != 0 && prod < 0) --q;
    Int out = checked_narrow(q, "conversion");
    return neg ? -out : out;
  }

  // The same function as an expression over `delta`.
  ExprP to_expr(ExprP delta) const {
    auto lit = [](Int v) { return expr_lit(Rat(v)); };
    switch (kind) {
      case Kind::Linear:
        return mk_expr(ExprK::CvLin, Rat(0), "",
                       {lit(rate_num), lit(rate_den), std::move(delta)});
      case Kind::Power:
        return mk_expr(ExprK::CvPow, Rat(0), "",
                       {lit(rate_num), lit(rate_den), lit(exponent),
                        std::move(delta)});
      case Kind::Logarithmic:
        return mk_expr(ExprK::CvLog, Rat(0), "",
                       {lit(rate_num), lit(rate_den), lit(base),
                        std::move(delta)});
      case Kind::Logistic:
        return mk_expr(ExprK::CvSig, Rat(0), "",
                       {lit(level), lit(midpoint), lit(steep_num),
                        lit(steep_den), std::move(delta)});
    }
    throw std::logic_error("unreachable conversion kind");
  }

 private:
  static __int128 mul_checked(__int128 a, __int128 b) {
    if (a == 0 || b == 0) return 0;
    __int128 aa = a < 0 ? -a : a, ab = b < 0 ? -b : b;
    static const __int128 lim = ~(unsigned __int128)0 >> 1;
    if (aa > lim / ab) throw EvalFault("conversion overflow");
    return a * b;
  }
};

struct ResourceSpec {
  std::string name;
  std::string variable;  // the state variable tracking the resource
  ConversionFn conversion;
};

struct GoalSpec {
  std::string name;  // matches the event label that achieves the goal
  CondP cond;
  Int reward = 0;
  bool critical = false;
};

struct CurrencyLedger {
  std::string lambda_var;
  std::vector<ResourceSpec> resources;
  std::vector<GoalSpec> goals;

  const ResourceSpec* resource_for(const std::string& variable) const {
    for (const auto& r : resources)
      if (r.variable == variable) return &r;
    return nullptr;
  }
};

namespace detail {

// Currency update inserted before an assignment `v = rhs`:
//   lambda = lambda - cv(v - rhs)
// evaluated while v still holds its old value, so v - rhs is consumption.
inline Stmt currency_stmt(const CurrencyLedger& lg, const ResourceSpec& rs,
                          const Stmt& assign) {
  ExprP delta = expr_bin(ExprK::Sub, expr_var(assign.target, assign.pos),
                         assign.rhs, assign.pos);
  ExprP debit = rs.conversion.to_expr(std::move(delta));
  ExprP rhs = expr_bin(ExprK::Sub, expr_var(lg.lambda_var, assign.pos),
                       std::move(debit), assign.pos);
  return stmt_assign(lg.lambda_var, nullptr, std::move(rhs), assign.pos);
}

inline Program wire_program(const Program& prog, const CurrencyLedger& lg,
                            std::vector<std::string>& findings) {
  Program out;
  for (const auto& s : prog.stmts) {
    if (s.k == Stmt::K::If) {
      Stmt n = s;
      n.then_prog =
          std::make_shared<Program>(wire_program(*s.then_prog, lg, findings));
      n.else_prog =
          std::make_shared<Program>(wire_program(*s.else_prog, lg, findings));
      out.stmts.push_back(std::move(n));
      continue;
    }
    if (s.target != lg.lambda_var) {
      const ResourceSpec* rs = lg.resource_for(s.target);
      if (rs) {
        if (s.index) {
          findings.push_back("resource variable '" + s.target +
                             "' is written through an index; not wired");
        } else {
          out.stmts.push_back(currency_stmt(lg, *rs, s));
        }
      }
    }
    out.stmts.push_back(s);
  }
  return out;
}

inline ProcP wire_proc(const ProcP& p, const CurrencyLedger& lg,
                       std::vector<std::string>& findings) {
  switch (p->k) {
    case ProcK::Prefix: {
      Program prog = p->prog ? wire_program(*p->prog, lg, findings) : Program{};
      bool touched = p->prog && prog.digest() != p->prog->digest();
      for (const auto& g : lg.goals) {
        // a goal matches the base label, or the materialized label of an
        // event with a literal index ("survey.2" matches survey.2{..})
        bool hit = g.name == p->label;
        if (!hit && p->label_index && p->label_index->k == ExprK::Lit &&
            p->label_index->lit.is_int())
          hit = g.name ==
                p->label + "." + std::to_string(p->label_index->lit.as_int());
        if (!hit) continue;
        ExprP rhs = expr_bin(ExprK::Add, expr_var(lg.lambda_var, p->pos),
                             expr_lit(Rat(g.reward)), p->pos);
        prog.stmts.push_back(
            stmt_assign(lg.lambda_var, nullptr, std::move(rhs), p->pos));
        touched = true;
      }
      ProgramP np = touched || p->prog
                        ? std::make_shared<Program>(std::move(prog))
                        : nullptr;
      return proc_prefix(p->label, p->label_index, std::move(np),
                         wire_proc(p->ch[0], lg, findings), p->pos);
    }
    case ProcK::Guard:
      return proc_guard(p->cond, wire_proc(p->ch[0], lg, findings), p->pos);
    case ProcK::IfProc: {
      auto t = std::make_shared<Program>(
          wire_program(*p->then_prog, lg, findings));
      auto e = std::make_shared<Program>(
          wire_program(*p->else_prog, lg, findings));
      return proc_if(p->cond, std::move(t), std::move(e), p->pos);
    }
    case ProcK::Seq:
    case ProcK::Parallel:
    case ProcK::ExtChoice:
    case ProcK::IntChoice:
      return proc_bin(p->k, wire_proc(p->ch[0], lg, findings),
                      wire_proc(p->ch[1], lg, findings), p->pos);
    default:
      return p;  // Stop, Skip, Call
  }
}

}  // namespace detail

// Rewrites every program so that resource-variable assignments debit the
// currency through their conversion functions and goal events credit their
// rewards. Pure: the input model is untouched.
inline Model wire_currency(const Model& m, const CurrencyLedger& lg,
                           std::vector<std::string>* findings_out = nullptr) {
  std::vector<std::string> findings;
  Model out = m;
  if (lg.resources.empty() && lg.goals.empty()) return out;
  const VarDecl* lv = m.find_var(lg.lambda_var);
  if (!lv || lv->is_array()) {
    findings.push_back("currency variable '" + lg.lambda_var +
                       "' is not a declared scalar; nothing wired");
    if (findings_out) *findings_out = std::move(findings);
    return out;
  }
  for (const auto& r : lg.resources) {
    const VarDecl* rv = m.find_var(r.variable);
    if (!rv)
      findings.push_back("resource '" + r.name + "' tracks undeclared '" +
                         r.variable + "'");
    else if (rv->is_array())
      findings.push_back("resource '" + r.name + "' tracks array '" +
                         r.variable + "'; only scalars are wired");
  }
  for (const auto& g : lg.goals)
    if (g.reward < 0)
      findings.push_back("goal '" + g.name + "' has a negative reward");
  for (auto& d : out.procs) d.body = detail::wire_proc(d.body, lg, findings);
  if (findings_out) *findings_out = std::move(findings);
  return out;
}

struct CompatResult {
  bool compatible = false;
  WitnessTrace witness;
  SearchStats stats;
};

// The conjunction of all goal conditions, as one reachability query.
inline CondP goals_conjunction(const std::vector<GoalSpec>& goals) {
  if (goals.empty()) throw std::invalid_argument("empty goal set");
  CondP acc = goals[0].cond;
  for (std::size_t i = 1; i < goals.size(); ++i)
    acc = cond_and(acc, goals[i].cond, goals[i].cond->pos);
  return acc;
}

inline CompatResult check_compatible(Explorer& ex, const std::string& entry,
                                     const std::vector<Int>& args,
                                     const std::vector<GoalSpec>& goals) {
  CheckResult r = ex.check_reaches(entry, args, goals_conjunction(goals));
  CompatResult c;
  c.compatible = r.kind == CheckKind::Reachable;
  c.stats = r.stats;
  if (c.compatible) {
    c.witness = std::move(r.witness);
    c.witness.origin = "compatible";
  }
  return c;
}

struct NotUnsatisfiable : std::runtime_error {
  NotUnsatisfiable()
      : std::runtime_error(
            "goal set is compatible; no unsatisfiable core exists") {}
};

namespace detail {

// Fisher-Yates with explicit modulo draws: std::shuffle's sequence of draws
// is implementation-defined, and the core must be reproducible from a seed
// on every platform.
inline void shuffle_indices(std::vector<std::size_t>& ix,
                            std::mt19937_64& rng) {
  for (std::size_t i = ix.size(); i > 1; --i) {
    std::size_t j = (std::size_t)(rng() % i);
    std::swap(ix[i - 1], ix[j]);
  }
}

inline bool unsat(Explorer& ex, const std::string& entry,
                  const std::vector<Int>& args,
                  const std::vector<GoalSpec>& goals) {
  return !check_compatible(ex, entry, args, goals).compatible;
}

inline std::vector<GoalSpec> concat(const std::vector<GoalSpec>& a,
                                    const std::vector<GoalSpec>& b) {
  std::vector<GoalSpec> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Minimise(S, S0): random bipartition; recurse into an unsatisfiable half,
// otherwise minimise each half against the other ("cross fixing").
inline std::vector<GoalSpec> minimise(Explorer& ex, const std::string& entry,
                                      const std::vector<Int>& args,
                                      std::vector<GoalSpec> s,
                                      const std::vector<GoalSpec>& s0,
                                      std::mt19937_64& rng) {
  if (s.size() == 1) return s;
  std::vector<std::size_t> ix(s.size());
  for (std::size_t i = 0; i < ix.size(); ++i) ix[i] = i;
  shuffle_indices(ix, rng);
  std::size_t half = (s.size() + 1) / 2;
  std::vector<GoalSpec> s1, s2;
  for (std::size_t i = 0; i < ix.size(); ++i)
    (i < half ? s1 : s2).push_back(s[ix[i]]);
  if (unsat(ex, entry, args, concat(s1, s0)))
    return minimise(ex, entry, args, std::move(s1), s0, rng);
  if (unsat(ex, entry, args, concat(s2, s0)))
    return minimise(ex, entry, args, std::move(s2), s0, rng);
  std::vector<GoalSpec> s1min =
      minimise(ex, entry, args, s1, concat(s0, s2), rng);
  std::vector<GoalSpec> s2min =
      minimise(ex, entry, args, std::move(s2), concat(s0, s1min), rng);
  return concat(s1min, s2min);
}

}  // namespace detail

// Minimal unsatisfiable core of an incompatible goal set. Throws
// NotUnsatisfiable when the full conjunction is reachable. The result is
// one minimal core (removing any single element makes it compatible), in
// the input's relative order; which core depends on the seeded generator.
inline std::vector<GoalSpec> find_muc(Explorer& ex, const std::string& entry,
                                      const std::vector<Int>& args,
                                      const std::vector<GoalSpec>& goals,
                                      std::mt19937_64& rng) {
  if (goals.empty()) throw std::invalid_argument("empty goal set");
  if (!detail::unsat(ex, entry, args, goals)) throw NotUnsatisfiable();
  std::vector<GoalSpec> core =
      detail::minimise(ex, entry, args, goals, {}, rng);
  // restore input order
  std::vector<GoalSpec> ordered;
  for (const auto& g : goals)
    for (const auto& c : core)
      if (c.name == g.name && c.cond->dig == g.cond->dig) {
        ordered.push_back(g);
        break;
      }
  return ordered;
}

// ---- JSON ledger files ----
//
// { "lambda": "lambda",
//   "resources": [{"name":"energy","variable":"energyLevel",
//                  "conversion":{"kind":"power","rate":[1,1],"exponent":1}}],
//   "goals": [{"name":"rend","cond":"pos == 9","reward":200000,
//              "critical":true}] }

inline ConversionFn conversion_from_json(const nlohmann::json& j) {
  ConversionFn f;
  std::string kind = j.at("kind").get<std::string>();
  if (j.contains("rate")) {
    f.rate_num = j.at("rate").at(0).get<Int>();
    f.rate_den = j.at("rate").at(1).get<Int>();
    if (f.rate_den <= 0)
      throw std::invalid_argument("conversion rate denominator must be > 0");
  }
  if (kind == "linear") {
    f.kind = ConversionFn::Kind::Linear;
  } else if (kind == "power") {
    f.kind = ConversionFn::Kind::Power;
    f.exponent = j.value("exponent", 1);
    if (f.exponent < 0)
      throw std::invalid_argument("power conversion exponent must be >= 0");
  } else if (kind == "logarithmic") {
    f.kind = ConversionFn::Kind::Logarithmic;
    f.base = j.value("base", 2);
    if (f.base < 2)
      throw std::invalid_argument("logarithmic conversion base must be >= 2");
  } else if (kind == "logistic") {
    f.kind = ConversionFn::Kind::Logistic;
    f.level = j.at("level").get<Int>();
    f.midpoint = j.value("midpoint", 0);
    if (j.contains("steepness")) {
      f.steep_num = j.at("steepness").at(0).get<Int>();
      f.steep_den = j.at("steepness").at(1).get<Int>();
      if (f.steep_den <= 0)
        throw std::invalid_argument("logistic steepness denominator must be > 0");
    }
    if (f.level < 0)
      throw std::invalid_argument("logistic conversion level must be >= 0");
  } else {
    throw std::invalid_argument("unknown conversion kind '" + kind + "'");
  }
  return f;
}

inline nlohmann::json conversion_to_json(const ConversionFn& f) {
  nlohmann::json j;
  switch (f.kind) {
    case ConversionFn::Kind::Linear:
      j["kind"] = "linear";
      j["rate"] = {f.rate_num, f.rate_den};
      break;
    case ConversionFn::Kind::Power:
      j["kind"] = "power";
      j["rate"] = {f.rate_num, f.rate_den};
      j["exponent"] = f.exponent;
      break;
    case ConversionFn::Kind::Logarithmic:
      j["kind"] = "logarithmic";
      j["rate"] = {f.rate_num, f.rate_den};
      j["base"] = f.base;
      break;
    case ConversionFn::Kind::Logistic:
      j["kind"] = "logistic";
      j["level"] = f.level;
      j["midpoint"] = f.midpoint;
      j["steepness"] = {f.steep_num, f.steep_den};
      break;
  }
  return j;
}

inline CurrencyLedger ledger_from_json(const nlohmann::json& j) {
  CurrencyLedger lg;
  lg.lambda_var = j.at("lambda").get<std::string>();
  if (j.contains("resources")) {
    for (const auto& jr : j.at("resources")) {
      ResourceSpec r;
      r.name = jr.at("name").get<std::string>();
      r.variable = jr.at("variable").get<std::string>();
      r.conversion = conversion_from_json(jr.at("conversion"));
      lg.resources.push_back(std::move(r));
    }
  }
  if (j.contains("goals")) {
    for (const auto& jg : j.at("goals")) {
      GoalSpec g;
      g.name = jg.at("name").get<std::string>();
      g.cond = parse_cond_text(jg.at("cond").get<std::string>());
      g.reward = jg.value("reward", 0);
      g.critical = jg.value("critical", false);
      lg.goals.push_back(std::move(g));
    }
  }
  return lg;
}

inline nlohmann::json ledger_to_json(const CurrencyLedger& lg) {
  nlohmann::json j;
  j["lambda"] = lg.lambda_var;
  j["resources"] = nlohmann::json::array();
  for (const auto& r : lg.resources) {
    nlohmann::json jr;
    jr["name"] = r.name;
    jr["variable"] = r.variable;
    jr["conversion"] = conversion_to_json(r.conversion);
    j["resources"].push_back(jr);
  }
  j["goals"] = nlohmann::json::array();
  for (const auto& g : lg.goals) {
    nlohmann::json jg;
    jg["name"] = g.name;
    jg["cond"] = print_cond(g.cond);
    jg["reward"] = g.reward;
    jg["critical"] = g.critical;
    j["goals"].push_back(jg);
  }
  return j;
}

}  // namespace gmc
