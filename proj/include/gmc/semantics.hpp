#pragma once

// Operational semantics. A Config is a variable valuation plus a canonical
// process continuation; successors() yields the labelled steps out of it.
// All arithmetic is exact; faults abort the enclosing check.

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "gmc/ast.hpp"
#include "gmc/validate.hpp"

namespace gmc {

// ---- canonical rewriting ----
//
// Rules: Seq(Skip,P) => P; Seq(Stop,P) => Stop; Par(Skip,P) => P;
// Par(P,Skip) => P; Choice(P,P) => P when both branches are structurally
// identical. Smart constructors keep results canonical as long as children
// already are.

inline ProcP c_seq(ProcP a, ProcP b, SourcePos pos = {}) {
  if (a->k == ProcK::Skip) return b;
  if (a->k == ProcK::Stop) return a;
  return proc_bin(ProcK::Seq, std::move(a), std::move(b), pos);
}

inline ProcP c_par(ProcP a, ProcP b, SourcePos pos = {}) {
  if (a->k == ProcK::Skip) return b;
  if (b->k == ProcK::Skip) return a;
  return proc_bin(ProcK::Parallel, std::move(a), std::move(b), pos);
}

inline ProcP c_choice(ProcK k, ProcP a, ProcP b, SourcePos pos = {}) {
  if (a->dig == b->dig) return a;
  return proc_bin(k, std::move(a), std::move(b), pos);
}

inline ProcP canonicalize(const ProcP& p) {
  switch (p->k) {
    case ProcK::Seq:
      return c_seq(canonicalize(p->ch[0]), canonicalize(p->ch[1]), p->pos);
    case ProcK::Parallel:
      return c_par(canonicalize(p->ch[0]), canonicalize(p->ch[1]), p->pos);
    case ProcK::ExtChoice:
    case ProcK::IntChoice:
      return c_choice(p->k, canonicalize(p->ch[0]), canonicalize(p->ch[1]),
                      p->pos);
    case ProcK::Prefix: {
      ProcP cont = canonicalize(p->ch[0]);
      if (cont == p->ch[0]) return p;
      return proc_prefix(p->label, p->label_index, p->prog, std::move(cont),
                         p->pos);
    }
    case ProcK::Guard: {
      ProcP body = canonicalize(p->ch[0]);
      if (body == p->ch[0]) return p;
      return proc_guard(p->cond, std::move(body), p->pos);
    }
    default:
      return p;  // Stop, Skip, Call, IfProc carry no process children
  }
}

// Every result of applying exactly one rewrite rule at one position.
// Exists for the rewrite-order independence tests.
inline void rewrite_candidates(const ProcP& p, std::vector<ProcP>& out) {
  auto with_child = [&](std::size_t idx, const ProcP& c) {
    Proc n = *p;
    n.ch[idx] = c;
    return mk_proc(std::move(n));
  };
  switch (p->k) {
    case ProcK::Seq:
      if (p->ch[0]->k == ProcK::Skip) out.push_back(p->ch[1]);
      if (p->ch[0]->k == ProcK::Stop) out.push_back(p->ch[0]);
      break;
    case ProcK::Parallel:
      if (p->ch[0]->k == ProcK::Skip) out.push_back(p->ch[1]);
      if (p->ch[1]->k == ProcK::Skip) out.push_back(p->ch[0]);
      break;
    case ProcK::ExtChoice:
    case ProcK::IntChoice:
      if (p->ch[0]->dig == p->ch[1]->dig) out.push_back(p->ch[0]);
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < p->ch.size(); ++i) {
    std::vector<ProcP> sub;
    rewrite_candidates(p->ch[i], sub);
    for (const auto& c : sub) out.push_back(with_child(i, c));
  }
}

inline std::vector<ProcP> rewrite_candidates(const ProcP& p) {
  std::vector<ProcP> out;
  rewrite_candidates(p, out);
  return out;
}

// ---- configurations ----

struct Config {
  ProcP cont;
  std::vector<Int> vals;
};

struct Step {
  std::string label;
  Config after;
};

struct EngineOptions {
  Int default_lo = -1000000000;
  Int default_hi = 1000000000;
  int recursion_cap = 10000;
};

struct SlotInfo {
  std::string display;  // "x" or "a[2]"
  Int lo, hi;
};

class Engine {
 public:
  explicit Engine(const Model& m, EngineOptions opt = {})
      : model_(m), opt_(opt) {
    ValidationReport rep = validate_model(m);
    if (!rep.ok())
      throw std::invalid_argument("model has validation findings:\n" +
                                  rep.to_string());
    for (const auto& v : m.vars) {
      VarSlots vs;
      vs.base = (Int)slots_.size();
      vs.len = v.slot_count();
      vs.is_array = v.is_array();
      Int lo = v.has_range ? v.lo : opt.default_lo;
      Int hi = v.has_range ? v.hi : opt.default_hi;
      for (Int i = 0; i < vs.len; ++i) {
        SlotInfo s;
        s.display = v.is_array() ? v.name + "[" + std::to_string(i) + "]"
                                 : v.name;
        s.lo = lo;
        s.hi = hi;
        slots_.push_back(std::move(s));
        init_.push_back(v.init[(std::size_t)i]);
      }
      vars_[v.name] = vs;
    }
  }

  const Model& model() const { return model_; }
  const std::vector<SlotInfo>& slots() const { return slots_; }
  const std::vector<Int>& initial_valuation() const { return init_; }

  // Scalar slot index, or the base slot of an array.
  Int slot_of(const std::string& name) const {
    auto it = vars_.find(name);
    if (it == vars_.end()) throw EvalFault("unknown variable '" + name + "'");
    return it->second.base;
  }

  Config initial_config(const std::string& entry,
                        const std::vector<Int>& args) const {
    const ProcDef* d = model_.find_proc(entry);
    if (!d) throw EvalFault("unknown process '" + entry + "'");
    if (d->params.size() != args.size())
      throw EvalFault("'" + entry + "' takes " +
                      std::to_string(d->params.size()) + " arguments, got " +
                      std::to_string(args.size()));
    std::vector<ExprP> arg_exprs;
    for (Int a : args) arg_exprs.push_back(expr_lit(Rat(a)));
    return Config{proc_call(entry, std::move(arg_exprs), d->pos), init_};
  }

  // ---- expression and condition evaluation ----

  Rat eval_expr(const std::vector<Int>& vals, const ExprP& e) const {
    switch (e->k) {
      case ExprK::Lit: return e->lit;
      case ExprK::Var: return Rat(read_slot(vals, e->name, -1, e->pos));
      case ExprK::Elem: {
        Rat ix = eval_expr(vals, e->ch[0]);
        if (!ix.is_int()) throw EvalFault(at(e->pos) + "non-integer index");
        return Rat(read_slot(vals, e->name, ix.num, e->pos));
      }
      case ExprK::Param:
        throw EvalFault(at(e->pos) + "unbound parameter '" + e->name + "'");
      case ExprK::Neg: return -eval_expr(vals, e->ch[0]);
      case ExprK::Add: return eval_expr(vals, e->ch[0]) + eval_expr(vals, e->ch[1]);
      case ExprK::Sub: return eval_expr(vals, e->ch[0]) - eval_expr(vals, e->ch[1]);
      case ExprK::Mul: return eval_expr(vals, e->ch[0]) * eval_expr(vals, e->ch[1]);
      case ExprK::Div: {
        Rat a = eval_expr(vals, e->ch[0]), b = eval_expr(vals, e->ch[1]);
        if (b.num == 0) throw EvalFault(at(e->pos) + "division by zero");
        if (a.is_int() && b.is_int()) return Rat(a.num / b.num);  // truncating
        return a / b;
      }
      case ExprK::Mod: {
        Rat a = eval_expr(vals, e->ch[0]), b = eval_expr(vals, e->ch[1]);
        if (!a.is_int() || !b.is_int())
          throw EvalFault(at(e->pos) + "modulo of non-integers");
        if (b.num == 0) throw EvalFault(at(e->pos) + "modulo by zero");
        return Rat(a.num % b.num);
      }
      case ExprK::Pow: {
        Rat b = eval_expr(vals, e->ch[0]);
        Rat x = eval_expr(vals, e->ch[1]);
        if (!x.is_int()) throw EvalFault(at(e->pos) + "non-integer exponent");
        return rat_pow(b, x.num);
      }
      case ExprK::Floor: return Rat(eval_expr(vals, e->ch[0]).floor());
      case ExprK::ILog: {
        Int b = int_arg(vals, e, 0), x = int_arg(vals, e, 1);
        if (b < 2) throw EvalFault(at(e->pos) + "ilog base must be >= 2");
        if (x < 1) throw EvalFault(at(e->pos) + "ilog argument must be >= 1");
        return Rat(int_log(b, x));
      }
      case ExprK::CvLin: {
        Int rn = int_arg(vals, e, 0), rd = pos_arg(vals, e, 1);
        Int d = int_arg(vals, e, 2);
        return Rat(signed_floor_scale(rn, rd, d < 0 ? -d : d, d < 0, e->pos));
      }
      case ExprK::CvPow: {
        Int rn = int_arg(vals, e, 0), rd = pos_arg(vals, e, 1);
        Int ex = int_arg(vals, e, 2), d = int_arg(vals, e, 3);
        if (ex < 0) throw EvalFault(at(e->pos) + "cvpow exponent must be >= 0");
        __int128 mag = 1;
        Int ad = d < 0 ? -d : d;
        for (Int i = 0; i < ex; ++i) mag = mul128(mag, ad, e->pos);
        return Rat(signed_floor_scale128(rn, rd, mag, d < 0, e->pos));
      }
      case ExprK::CvLog: {
        Int rn = int_arg(vals, e, 0), rd = pos_arg(vals, e, 1);
        Int b = int_arg(vals, e, 2), d = int_arg(vals, e, 3);
        if (b < 2) throw EvalFault(at(e->pos) + "cvlog base must be >= 2");
        Int ad = d < 0 ? -d : d;
        Int lg = ad == 0 ? 0 : int_log(b, ad);
        return Rat(signed_floor_scale(rn, rd, lg, d < 0, e->pos));
      }
      case ExprK::CvSig: {
        Int L = int_arg(vals, e, 0), mid = int_arg(vals, e, 1);
        Int kn = int_arg(vals, e, 2), kd = pos_arg(vals, e, 3);
        Int d = int_arg(vals, e, 4);
        if (L < 0) throw EvalFault(at(e->pos) + "cvsig level must be >= 0");
        Int ad = d < 0 ? -d : d;
        Int t = floordiv(mul128(kn, ad - mid, e->pos), kd);
        if (t > 62) t = 62;
        if (t < -62) t = -62;
        __int128 v;
        if (t >= 0) {
          __int128 p2 = (__int128)1 << t;
          v = ((__int128)L * p2) / (p2 + 1);
        } else {
          v = (__int128)L / (((__int128)1 << -t) + 1);
        }
        Int out = checked_narrow(v, "cvsig");
        return Rat(d < 0 ? -out : out);
      }
    }
    throw EvalFault("unreachable expression kind");
  }

  bool eval_cond(const std::vector<Int>& vals, const CondP& c) const {
    switch (c->k) {
      case CondK::Lit: return c->blit;
      case CondK::Cmp: {
        Rat a = eval_expr(vals, c->l), b = eval_expr(vals, c->r);
        switch (c->op) {
          case CmpOp::Eq: return a == b;
          case CmpOp::Ne: return !(a == b);
          case CmpOp::Lt: return a < b;
          case CmpOp::Le: return a <= b;
          case CmpOp::Gt: return b < a;
          case CmpOp::Ge: return b <= a;
        }
        return false;
      }
      case CondK::And:
        return eval_cond(vals, c->ch[0]) && eval_cond(vals, c->ch[1]);
      case CondK::Or:
        return eval_cond(vals, c->ch[0]) || eval_cond(vals, c->ch[1]);
      case CondK::Not:
        return !eval_cond(vals, c->ch[0]);
    }
    throw EvalFault("unreachable condition kind");
  }

  std::vector<Int> exec_program(const std::vector<Int>& vals,
                                const Program& prog) const {
    std::vector<Int> out = vals;
    exec_into(out, prog);
    return out;
  }

  // ---- stepping ----

  // Steps sorted by label (then by target key, so order is total) and
  // deduplicated; two same-label steps survive only when their targets
  // genuinely differ.
  std::vector<Step> successors(const Config& c) const {
    Ctx ctx;
    std::vector<Step> raw;
    collect_steps(c.cont, c.vals, ctx, raw);
    std::vector<std::pair<Digest, std::size_t>> order;
    order.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
      order.emplace_back(canonical_key(raw[i].after), i);
    std::stable_sort(order.begin(), order.end(),
                     [&raw](const auto& a, const auto& b) {
                       const std::string& la = raw[a.second].label;
                       const std::string& lb = raw[b.second].label;
                       if (la != lb) return la < lb;
                       if (a.first.hi != b.first.hi) return a.first.hi < b.first.hi;
                       return a.first.lo < b.first.lo;
                     });
    std::vector<Step> out;
    out.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i > 0 && order[i].first == order[i - 1].first &&
          raw[order[i].second].label == raw[order[i - 1].second].label)
        continue;
      out.push_back(std::move(raw[order[i].second]));
    }
    return out;
  }

  bool can_terminate(const Config& c) const {
    Ctx ctx;
    return can_term(c.cont, c.vals, ctx);
  }

  Digest valuation_digest(const std::vector<Int>& vals) const {
    Digest d;
    d.absorb((std::uint64_t)0x76616c75);
    for (Int v : vals) d.absorb_int(v);
    return d;
  }

  Digest canonical_key(const Config& c) const {
    Digest d;
    d.absorb(c.cont->dig);
    d.absorb(valuation_digest(c.vals));
    return d;
  }

 private:
  struct VarSlots {
    Int base = 0, len = 1;
    bool is_array = false;
  };
  struct Ctx {
    std::vector<const ProcDef*> chain;  // active unfolds, depth = size
  };

  const Model& model_;
  EngineOptions opt_;
  std::vector<SlotInfo> slots_;
  std::vector<Int> init_;
  std::map<std::string, VarSlots> vars_;
  mutable std::unordered_map<Digest, ProcP, DigestHash> unfold_memo_;
  mutable std::mutex memo_mu_;

  static std::string at(SourcePos p) {
    return std::to_string(p.line) + ":" + std::to_string(p.col) + ": ";
  }

  static Int floordiv(__int128 a, Int b) {
    __int128 q = a / b, r = a % b;  // b > 0 always here
    if (r != 0 && a < 0) --q;
    return checked_narrow(q, "floordiv");
  }

  static __int128 mul128(__int128 a, __int128 b, SourcePos pos) {
    if (a == 0 || b == 0) return 0;
    __int128 aa = a < 0 ? -a : a, ab = b < 0 ? -b : b;
    static const __int128 lim = ~(unsigned __int128)0 >> 1;  // INT128_MAX
    if (aa > lim / ab) throw EvalFault(at(pos) + "arithmetic overflow");
    return a * b;
  }

  static Int signed_floor_scale128(Int rn, Int rd, __int128 mag, bool neg,
                                   SourcePos pos) {
    __int128 prod = mul128(rn, mag, pos);
    __int128 q = prod / rd, r = prod % rd;
    if (r != 0 && prod < 0) --q;
    Int v = checked_narrow(q, "conversion");
    return neg ? -v : v;
  }

  static Int signed_floor_scale(Int rn, Int rd, Int mag, bool neg,
                                SourcePos pos) {
    return signed_floor_scale128(rn, rd, mag, neg, pos);
  }

  Int int_arg(const std::vector<Int>& vals, const ExprP& e,
              std::size_t i) const {
    Rat r = eval_expr(vals, e->ch[i]);
    if (!r.is_int())
      throw EvalFault(at(e->pos) + "expected an integer argument");
    return r.num;
  }
  Int pos_arg(const std::vector<Int>& vals, const ExprP& e,
              std::size_t i) const {
    Int v = int_arg(vals, e, i);
    if (v <= 0) throw EvalFault(at(e->pos) + "expected a positive argument");
    return v;
  }

  Int read_slot(const std::vector<Int>& vals, const std::string& name, Int idx,
                SourcePos pos) const {
    auto it = vars_.find(name);
    if (it == vars_.end())
      throw EvalFault(at(pos) + "unknown variable '" + name + "'");
    const VarSlots& vs = it->second;
    if (idx < 0) {
      if (vs.is_array)
        throw EvalFault(at(pos) + "'" + name + "' needs an index");
      return vals[(std::size_t)vs.base];
    }
    if (!vs.is_array)
      throw EvalFault(at(pos) + "'" + name + "' is scalar");
    if (idx >= vs.len)
      throw EvalFault(at(pos) + "index " + std::to_string(idx) +
                      " out of bounds for '" + name + "[" +
                      std::to_string(vs.len) + "]'");
    return vals[(std::size_t)(vs.base + idx)];
  }

  void write_slot(std::vector<Int>& vals, const std::string& name, Int idx,
                  Int value, SourcePos pos) const {
    auto it = vars_.find(name);
    if (it == vars_.end())
      throw EvalFault(at(pos) + "unknown variable '" + name + "'");
    const VarSlots& vs = it->second;
    Int slot;
    if (idx < 0) {
      if (vs.is_array)
        throw EvalFault(at(pos) + "'" + name + "' needs an index");
      slot = vs.base;
    } else {
      if (!vs.is_array)
        throw EvalFault(at(pos) + "'" + name + "' is scalar");
      if (idx >= vs.len)
        throw EvalFault(at(pos) + "index " + std::to_string(idx) +
                        " out of bounds for '" + name + "[" +
                        std::to_string(vs.len) + "]'");
      slot = vs.base + idx;
    }
    const SlotInfo& si = slots_[(std::size_t)slot];
    if (value < si.lo || value > si.hi)
      throw RangeFault(si.display, value, si.lo, si.hi);
    vals[(std::size_t)slot] = value;
  }

  void exec_into(std::vector<Int>& vals, const Program& prog) const {
    for (const auto& s : prog.stmts) {
      if (s.k == Stmt::K::Assign) {
        Int idx = -1;
        if (s.index) {
          Rat r = eval_expr(vals, s.index);
          if (!r.is_int() || r.num < 0)
            throw EvalFault(at(s.pos) + "invalid array index");
          idx = r.num;
        }
        Rat v = eval_expr(vals, s.rhs);
        if (!v.is_int())
          throw EvalFault(at(s.pos) + "non-integer value assigned to '" +
                          s.target + "'");
        write_slot(vals, s.target, idx, v.num, s.pos);
      } else {
        exec_into(vals, eval_cond(vals, s.cond) ? *s.then_prog : *s.else_prog);
      }
    }
  }

  ProcP unfold(const ProcP& call, const std::vector<Int>& vals,
               Ctx& ctx) const {
    const ProcDef* d = model_.find_proc(call->callee);
    if (!d)
      throw EvalFault(at(call->pos) + "call to undefined process '" +
                      call->callee + "'");
    if ((int)ctx.chain.size() >= opt_.recursion_cap) {
      std::string trail;
      std::size_t from = ctx.chain.size() > 12 ? ctx.chain.size() - 12 : 0;
      for (std::size_t i = from; i < ctx.chain.size(); ++i)
        trail += (trail.empty() ? "" : " -> ") + ctx.chain[i]->name + "()";
      throw LimitFault(LimitFault::Kind::RecursionCap,
                       "recursion cap " + std::to_string(opt_.recursion_cap) +
                           " exceeded without an event; probable unguarded "
                           "recursion (tail: " + trail + ")");
    }
    std::vector<Int> arg_vals;
    for (const auto& a : call->args) {
      Rat r = eval_expr(vals, a);
      if (!r.is_int())
        throw EvalFault(at(call->pos) + "non-integer argument to '" +
                        call->callee + "'");
      arg_vals.push_back(r.num);
    }
    Digest key;
    key.absorb((std::uint64_t)0x756e666f);
    key.absorb(call->callee);
    for (Int v : arg_vals) key.absorb_int(v);
    {
      std::lock_guard<std::mutex> lk(memo_mu_);
      auto it = unfold_memo_.find(key);
      if (it != unfold_memo_.end()) return it->second;
    }
    Subst s;
    for (std::size_t i = 0; i < d->params.size(); ++i)
      s.emplace_back(d->params[i], expr_lit(Rat(arg_vals[i])));
    ProcP body = canonicalize(subst_proc(d->body, s));
    std::lock_guard<std::mutex> lk(memo_mu_);
    unfold_memo_.emplace(key, body);
    return body;
  }

  bool can_term(const ProcP& p, const std::vector<Int>& vals, Ctx& ctx) const {
    switch (p->k) {
      case ProcK::Skip: return true;
      case ProcK::Stop:
      case ProcK::Prefix:
      case ProcK::IfProc: return false;
      case ProcK::Guard:
        return eval_cond(vals, p->cond) && can_term(p->ch[0], vals, ctx);
      case ProcK::Seq:
      case ProcK::Parallel:
        return can_term(p->ch[0], vals, ctx) && can_term(p->ch[1], vals, ctx);
      case ProcK::ExtChoice:
      case ProcK::IntChoice:
        return can_term(p->ch[0], vals, ctx) || can_term(p->ch[1], vals, ctx);
      case ProcK::Call: {
        ProcP body = unfold(p, vals, ctx);
        const ProcDef* d = model_.find_proc(p->callee);
        ctx.chain.push_back(d);
        bool r = can_term(body, vals, ctx);
        ctx.chain.pop_back();
        return r;
      }
    }
    return false;
  }

  void collect_steps(const ProcP& p, const std::vector<Int>& vals, Ctx& ctx,
                     std::vector<Step>& out) const {
    switch (p->k) {
      case ProcK::Stop:
      case ProcK::Skip:
        return;
      case ProcK::Prefix: {
        std::string label = p->label;
        if (p->label_index) {
          Rat ix = eval_expr(vals, p->label_index);
          if (!ix.is_int())
            throw EvalFault(at(p->pos) + "non-integer event index");
          label += "." + std::to_string(ix.num);
        }
        std::vector<Int> after = vals;
        if (p->prog) exec_into(after, *p->prog);
        out.push_back(Step{std::move(label), Config{p->ch[0], std::move(after)}});
        return;
      }
      case ProcK::Guard:
        if (eval_cond(vals, p->cond)) collect_steps(p->ch[0], vals, ctx, out);
        return;
      case ProcK::IfProc: {
        std::vector<Int> after = vals;
        exec_into(after,
                  eval_cond(vals, p->cond) ? *p->then_prog : *p->else_prog);
        out.push_back(Step{"ite", Config{proc_skip(p->pos), std::move(after)}});
        return;
      }
      case ProcK::Seq: {
        std::size_t mark = out.size();
        collect_steps(p->ch[0], vals, ctx, out);
        for (std::size_t i = mark; i < out.size(); ++i)
          out[i].after.cont = c_seq(out[i].after.cont, p->ch[1], p->pos);
        if (can_term(p->ch[0], vals, ctx))
          collect_steps(p->ch[1], vals, ctx, out);
        return;
      }
      case ProcK::Parallel: {
        std::size_t mark = out.size();
        collect_steps(p->ch[0], vals, ctx, out);
        for (std::size_t i = mark; i < out.size(); ++i)
          out[i].after.cont = c_par(out[i].after.cont, p->ch[1], p->pos);
        mark = out.size();
        collect_steps(p->ch[1], vals, ctx, out);
        for (std::size_t i = mark; i < out.size(); ++i)
          out[i].after.cont = c_par(p->ch[0], out[i].after.cont, p->pos);
        return;
      }
      case ProcK::ExtChoice:
      case ProcK::IntChoice:
        collect_steps(p->ch[0], vals, ctx, out);
        collect_steps(p->ch[1], vals, ctx, out);
        return;
      case ProcK::Call: {
        ProcP body = unfold(p, vals, ctx);
        const ProcDef* d = model_.find_proc(p->callee);
        ctx.chain.push_back(d);
        collect_steps(body, vals, ctx, out);
        ctx.chain.pop_back();
        return;
      }
    }
  }
};

}  // namespace gmc
