#pragma once

// AST for the modelling language: integer expressions, conditions,
// event programs, process expressions, declarations, assertions.
// Nodes are immutable, shared, and carry a structural digest computed
// at construction; digest equality is used as structural equality.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gmc/common.hpp"

namespace gmc {

// ---------------------------------------------------------------------------
// Integer expressions

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

enum class ExprK {
  Lit,    // rational literal (integers have den == 1)
  Var,    // scalar variable
  Elem,   // array element: name, ch[0] = index
  Param,  // process parameter (substituted at call unfolding)
  Neg,
  Add, Sub, Mul, Div, Mod, Pow,
  Floor,  // floor(x), rounds toward -inf
  ILog,   // ilog(base, x): largest n with base^n <= x, 0 for x < base
  CvLin,  // cvlin(rn, rd, d)        = sign(d) * floor(rn/rd * |d|)
  CvPow,  // cvpow(rn, rd, e, d)     = sign(d) * floor(rn/rd * |d|^e)
  CvLog,  // cvlog(rn, rd, b, d)     = sign(d) * floor(rn/rd * ilog(b, |d|))
  CvSig,  // cvsig(L, m, kn, kd, d)  = sign(d) * logistic step, see goal.hpp
};

struct Expr {
  ExprK k;
  Rat lit;
  std::string name;
  std::vector<ExprP> ch;
  SourcePos pos;
  Digest dig;
};

inline ExprP mk_expr(ExprK k, Rat lit, std::string name, std::vector<ExprP> ch,
                     SourcePos pos = {}) {
  auto e = std::make_shared<Expr>();
  e->k = k;
  e->lit = lit;
  e->name = std::move(name);
  e->ch = std::move(ch);
  e->pos = pos;
  e->dig.absorb((std::uint64_t)k + 0x100);
  e->dig.absorb_int(e->lit.num);
  e->dig.absorb_int(e->lit.den);
  e->dig.absorb(e->name);
  for (auto& c : e->ch) e->dig.absorb(c->dig);
  return e;
}

inline ExprP expr_lit(Rat v, SourcePos pos = {}) {
  return mk_expr(ExprK::Lit, v, "", {}, pos);
}
inline ExprP expr_var(std::string name, SourcePos pos = {}) {
  return mk_expr(ExprK::Var, Rat(0), std::move(name), {}, pos);
}
inline ExprP expr_elem(std::string name, ExprP idx, SourcePos pos = {}) {
  return mk_expr(ExprK::Elem, Rat(0), std::move(name), {std::move(idx)}, pos);
}
inline ExprP expr_param(std::string name, SourcePos pos = {}) {
  return mk_expr(ExprK::Param, Rat(0), std::move(name), {}, pos);
}
inline ExprP expr_bin(ExprK k, ExprP a, ExprP b, SourcePos pos = {}) {
  return mk_expr(k, Rat(0), "", {std::move(a), std::move(b)}, pos);
}

// ---------------------------------------------------------------------------
// Conditions

struct Cond;
using CondP = std::shared_ptr<const Cond>;

enum class CondK { Lit, Cmp, And, Or, Not };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Cond {
  CondK k;
  bool blit = false;
  CmpOp op = CmpOp::Eq;
  ExprP l, r;                // Cmp
  std::vector<CondP> ch;     // And/Or/Not
  SourcePos pos;
  Digest dig;
};

inline CondP mk_cond(CondK k, bool blit, CmpOp op, ExprP l, ExprP r,
                     std::vector<CondP> ch, SourcePos pos = {}) {
  auto c = std::make_shared<Cond>();
  c->k = k;
  c->blit = blit;
  c->op = op;
  c->l = std::move(l);
  c->r = std::move(r);
  c->ch = std::move(ch);
  c->pos = pos;
  c->dig.absorb((std::uint64_t)k + 0x200);
  c->dig.absorb((std::uint64_t)c->blit);
  c->dig.absorb((std::uint64_t)op);
  if (c->l) c->dig.absorb(c->l->dig);
  if (c->r) c->dig.absorb(c->r->dig);
  for (auto& s : c->ch) c->dig.absorb(s->dig);
  return c;
}

inline CondP cond_lit(bool b, SourcePos pos = {}) {
  return mk_cond(CondK::Lit, b, CmpOp::Eq, nullptr, nullptr, {}, pos);
}
inline CondP cond_cmp(CmpOp op, ExprP l, ExprP r, SourcePos pos = {}) {
  return mk_cond(CondK::Cmp, false, op, std::move(l), std::move(r), {}, pos);
}
inline CondP cond_and(CondP a, CondP b, SourcePos pos = {}) {
  return mk_cond(CondK::And, false, CmpOp::Eq, nullptr, nullptr,
                 {std::move(a), std::move(b)}, pos);
}
inline CondP cond_or(CondP a, CondP b, SourcePos pos = {}) {
  return mk_cond(CondK::Or, false, CmpOp::Eq, nullptr, nullptr,
                 {std::move(a), std::move(b)}, pos);
}
inline CondP cond_not(CondP a, SourcePos pos = {}) {
  return mk_cond(CondK::Not, false, CmpOp::Eq, nullptr, nullptr,
                 {std::move(a)}, pos);
}

// ---------------------------------------------------------------------------
// Event programs: assignment sequences with conditional statements.

struct Stmt;

struct Program {
  std::vector<Stmt> stmts;
  Digest digest() const;
};

struct Stmt {
  enum class K { Assign, If };
  K k = K::Assign;
  // Assign
  std::string target;
  ExprP index;  // null for scalars
  ExprP rhs;
  // If
  CondP cond;
  std::shared_ptr<const Program> then_prog, else_prog;
  SourcePos pos;

  Digest digest() const {
    Digest d;
    d.absorb((std::uint64_t)k + 0x300);
    d.absorb(target);
    if (index) d.absorb(index->dig);
    if (rhs) d.absorb(rhs->dig);
    if (cond) d.absorb(cond->dig);
    if (then_prog) d.absorb(then_prog->digest());
    if (else_prog) d.absorb(else_prog->digest());
    return d;
  }
};

inline Digest Program::digest() const {
  Digest d;
  d.absorb((std::uint64_t)stmts.size() + 0x400);
  for (auto& s : stmts) d.absorb(s.digest());
  return d;
}

using ProgramP = std::shared_ptr<const Program>;

inline Stmt stmt_assign(std::string target, ExprP index, ExprP rhs,
                        SourcePos pos = {}) {
  Stmt s;
  s.k = Stmt::K::Assign;
  s.target = std::move(target);
  s.index = std::move(index);
  s.rhs = std::move(rhs);
  s.pos = pos;
  return s;
}

// ---------------------------------------------------------------------------
// Process expressions

struct Proc;
using ProcP = std::shared_ptr<const Proc>;

enum class ProcK {
  Stop,
  Skip,
  Prefix,     // label_base[.label_index] {prog} -> cont
  Seq,
  Parallel,   // pure interleaving, joint termination
  ExtChoice,
  IntChoice,
  Guard,      // [cond] body
  IfProc,     // if (cond) {prog} else {prog}, fires one 'ite' step then Skip
  Call,       // name(args), kept symbolic in canonical forms
};

struct Proc {
  ProcK k;
  // Prefix
  std::string label;
  ExprP label_index;  // null when the label has no .index suffix
  ProgramP prog;      // never null for Prefix (may be empty)
  // Guard / IfProc
  CondP cond;
  ProgramP then_prog, else_prog;
  // Call
  std::string callee;
  std::vector<ExprP> args;
  // children: Prefix cont, Guard body, binary ops both sides
  std::vector<ProcP> ch;
  SourcePos pos;
  Digest dig;
};

inline ProcP mk_proc(Proc p) {
  p.dig = Digest{};
  p.dig.absorb((std::uint64_t)p.k + 0x500);
  p.dig.absorb(p.label);
  if (p.label_index) p.dig.absorb(p.label_index->dig);
  if (p.prog) p.dig.absorb(p.prog->digest());
  if (p.cond) p.dig.absorb(p.cond->dig);
  if (p.then_prog) p.dig.absorb(p.then_prog->digest());
  if (p.else_prog) p.dig.absorb(p.else_prog->digest());
  p.dig.absorb(p.callee);
  for (auto& a : p.args) p.dig.absorb(a->dig);
  for (auto& c : p.ch) p.dig.absorb(c->dig);
  return std::make_shared<const Proc>(std::move(p));
}

inline ProcP proc_stop(SourcePos pos = {}) {
  Proc p; p.k = ProcK::Stop; p.pos = pos; return mk_proc(std::move(p));
}
inline ProcP proc_skip(SourcePos pos = {}) {
  Proc p; p.k = ProcK::Skip; p.pos = pos; return mk_proc(std::move(p));
}
inline ProcP proc_prefix(std::string label, ExprP idx, ProgramP prog, ProcP cont,
                         SourcePos pos = {}) {
  Proc p;
  p.k = ProcK::Prefix;
  p.label = std::move(label);
  p.label_index = std::move(idx);
  p.prog = prog ? std::move(prog) : std::make_shared<const Program>();
  p.ch = {std::move(cont)};
  p.pos = pos;
  return mk_proc(std::move(p));
}
inline ProcP proc_bin(ProcK k, ProcP a, ProcP b, SourcePos pos = {}) {
  Proc p; p.k = k; p.ch = {std::move(a), std::move(b)}; p.pos = pos;
  return mk_proc(std::move(p));
}
inline ProcP proc_guard(CondP c, ProcP body, SourcePos pos = {}) {
  Proc p; p.k = ProcK::Guard; p.cond = std::move(c); p.ch = {std::move(body)};
  p.pos = pos;
  return mk_proc(std::move(p));
}
inline ProcP proc_if(CondP c, ProgramP t, ProgramP e, SourcePos pos = {}) {
  Proc p; p.k = ProcK::IfProc; p.cond = std::move(c);
  p.then_prog = std::move(t); p.else_prog = std::move(e); p.pos = pos;
  return mk_proc(std::move(p));
}
inline ProcP proc_call(std::string name, std::vector<ExprP> args, SourcePos pos = {}) {
  Proc p; p.k = ProcK::Call; p.callee = std::move(name); p.args = std::move(args);
  p.pos = pos;
  return mk_proc(std::move(p));
}

// ---------------------------------------------------------------------------
// Parameter substitution: replaces Param nodes by expressions (normally
// literals). Used for call unfolding and bounded-quantifier expansion.

using Subst = std::vector<std::pair<std::string, ExprP>>;

inline const ExprP* subst_find(const Subst& s, const std::string& name) {
  for (auto& kv : s)
    if (kv.first == name) return &kv.second;
  return nullptr;
}

inline ExprP subst_expr(const ExprP& e, const Subst& s) {
  if (s.empty()) return e;
  switch (e->k) {
    case ExprK::Lit:
    case ExprK::Var:
      return e;
    case ExprK::Param: {
      const ExprP* r = subst_find(s, e->name);
      return r ? *r : e;
    }
    default: {
      bool changed = false;
      std::vector<ExprP> ch;
      ch.reserve(e->ch.size());
      for (auto& c : e->ch) {
        ch.push_back(subst_expr(c, s));
        changed |= ch.back() != c;
      }
      if (!changed) return e;
      return mk_expr(e->k, e->lit, e->name, std::move(ch), e->pos);
    }
  }
}

inline CondP subst_cond(const CondP& c, const Subst& s) {
  if (s.empty()) return c;
  switch (c->k) {
    case CondK::Lit:
      return c;
    case CondK::Cmp: {
      ExprP l = subst_expr(c->l, s), r = subst_expr(c->r, s);
      if (l == c->l && r == c->r) return c;
      return cond_cmp(c->op, std::move(l), std::move(r), c->pos);
    }
    default: {
      bool changed = false;
      std::vector<CondP> ch;
      ch.reserve(c->ch.size());
      for (auto& x : c->ch) {
        ch.push_back(subst_cond(x, s));
        changed |= ch.back() != x;
      }
      if (!changed) return c;
      return mk_cond(c->k, c->blit, c->op, nullptr, nullptr, std::move(ch), c->pos);
    }
  }
}

ProgramP subst_program(const ProgramP& p, const Subst& s);

inline Stmt subst_stmt(const Stmt& st, const Subst& s) {
  Stmt out = st;
  if (st.index) out.index = subst_expr(st.index, s);
  if (st.rhs) out.rhs = subst_expr(st.rhs, s);
  if (st.cond) out.cond = subst_cond(st.cond, s);
  if (st.then_prog) out.then_prog = subst_program(st.then_prog, s);
  if (st.else_prog) out.else_prog = subst_program(st.else_prog, s);
  return out;
}

inline ProgramP subst_program(const ProgramP& p, const Subst& s) {
  if (!p || s.empty()) return p;
  auto out = std::make_shared<Program>();
  out->stmts.reserve(p->stmts.size());
  for (auto& st : p->stmts) out->stmts.push_back(subst_stmt(st, s));
  return out;
}

inline ProcP subst_proc(const ProcP& p, const Subst& s) {
  if (s.empty()) return p;
  Proc out = *p;
  if (out.label_index) out.label_index = subst_expr(out.label_index, s);
  if (out.prog) out.prog = subst_program(out.prog, s);
  if (out.cond) out.cond = subst_cond(out.cond, s);
  if (out.then_prog) out.then_prog = subst_program(out.then_prog, s);
  if (out.else_prog) out.else_prog = subst_program(out.else_prog, s);
  for (auto& a : out.args) a = subst_expr(a, s);
  for (auto& c : out.ch) c = subst_proc(c, s);
  return mk_proc(std::move(out));
}

// ---------------------------------------------------------------------------
// Declarations, assertions, models

struct VarDecl {
  std::string name;
  Int array_len = 0;  // 0 = scalar
  bool has_range = false;
  Int lo = 0, hi = 0;
  std::vector<Int> init;  // size 1 for scalars, array_len for arrays
  SourcePos pos;

  bool is_array() const { return array_len > 0; }
  Int slot_count() const { return is_array() ? array_len : 1; }
};

struct ProcDef {
  std::string name;
  std::vector<std::string> params;
  ProcP body;
  SourcePos pos;
};

enum class AssertK { Reaches, ReachesOptimal, Safety, DeadlockFree };
enum class OptDir { Max, Min };

struct Assertion {
  AssertK k = AssertK::Reaches;
  std::string entry;
  std::vector<Int> entry_args;
  CondP cond;  // Reaches goal / Safety invariant; null for DeadlockFree
  std::string objective;  // ReachesOptimal only
  OptDir dir = OptDir::Max;
  SourcePos pos;
};

struct Model {
  std::vector<VarDecl> vars;
  std::vector<ProcDef> procs;
  std::vector<Assertion> asserts;

  const VarDecl* find_var(const std::string& n) const {
    for (auto& v : vars)
      if (v.name == n) return &v;
    return nullptr;
  }
  const ProcDef* find_proc(const std::string& n) const {
    for (auto& p : procs)
      if (p.name == n) return &p;
    return nullptr;
  }

  Digest digest() const {
    Digest d;
    for (auto& v : vars) {
      d.absorb(v.name);
      d.absorb_int(v.array_len);
      d.absorb_int(v.has_range ? 1 : 0);
      d.absorb_int(v.lo);
      d.absorb_int(v.hi);
      for (Int i : v.init) d.absorb_int(i);
    }
    for (auto& p : procs) {
      d.absorb(p.name);
      for (auto& a : p.params) d.absorb(a);
      d.absorb(p.body->dig);
    }
    for (auto& a : asserts) {
      d.absorb((std::uint64_t)a.k);
      d.absorb(a.entry);
      for (Int v : a.entry_args) d.absorb_int(v);
      if (a.cond) d.absorb(a.cond->dig);
      d.absorb(a.objective);
      d.absorb((std::uint64_t)a.dir);
    }
    return d;
  }
};

}  // namespace gmc
