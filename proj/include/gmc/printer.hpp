#pragma once

// Model pretty-printer. parse(print(parse(t))) is structurally identical to
// parse(t): defaults are materialized, compound assignments stay desugared,
// and parens are emitted wherever precedence demands them.

#include <string>

#include "gmc/ast.hpp"

namespace gmc {

namespace detail {

// Rational literals print as exact finite decimals. Parsed literals always
// have a denominator of the form 2^a*5^b; anything else falls back to a
// fraction, which is not re-parseable as the same value.
inline std::string print_rat(const Rat& r) {
  if (r.den == 1) return std::to_string(r.num);
  Int den = r.den;
  int twos = 0, fives = 0;
  while (den % 2 == 0) { den /= 2; ++twos; }
  while (den % 5 == 0) { den /= 5; ++fives; }
  if (den != 1)
    return "(" + std::to_string(r.num) + "/" + std::to_string(r.den) + ")";
  int digits = twos > fives ? twos : fives;
  __int128 scaled = (__int128)(r.num < 0 ? -r.num : r.num);
  for (int i = 0; i < digits; ++i) scaled *= 10;
  scaled /= r.den;
  std::string body;
  for (int i = 0; i < digits; ++i) {
    body.insert(body.begin(), char('0' + (int)(scaled % 10)));
    scaled /= 10;
  }
  std::string head = scaled == 0 ? "0" : [&] {
    std::string h;
    while (scaled > 0) { h.insert(h.begin(), char('0' + (int)(scaled % 10))); scaled /= 10; }
    return h;
  }();
  return (r.num < 0 ? "-" : "") + head + "." + body;
}

inline std::string print_expr(const ExprP& e, int parent);

inline std::string print_call_like(const char* name, const Expr& e) {
  std::string s = name;
  s += "(";
  for (std::size_t i = 0; i < e.ch.size(); ++i) {
    if (i) s += ", ";
    s += print_expr(e.ch[i], 0);
  }
  return s + ")";
}

// Precedence: Add/Sub 1, Mul/Div/Mod 2, Neg 3, Pow 4, atoms 5.
inline std::string print_expr(const ExprP& e, int parent) {
  std::string s;
  int prec = 5;
  switch (e->k) {
    case ExprK::Lit:
      s = print_rat(e->lit);
      if (e->lit.num < 0) prec = 3;
      break;
    case ExprK::Var:
    case ExprK::Param:
      s = e->name;
      break;
    case ExprK::Elem:
      s = e->name + "[" + print_expr(e->ch[0], 0) + "]";
      break;
    case ExprK::Neg:
      prec = 3;
      s = "-" + print_expr(e->ch[0], 3);
      break;
    case ExprK::Add: prec = 1;
      s = print_expr(e->ch[0], 1) + " + " + print_expr(e->ch[1], 2); break;
    case ExprK::Sub: prec = 1;
      s = print_expr(e->ch[0], 1) + " - " + print_expr(e->ch[1], 2); break;
    case ExprK::Mul: prec = 2;
      s = print_expr(e->ch[0], 2) + " * " + print_expr(e->ch[1], 3); break;
    case ExprK::Div: prec = 2;
      s = print_expr(e->ch[0], 2) + " / " + print_expr(e->ch[1], 3); break;
    case ExprK::Mod: prec = 2;
      s = print_expr(e->ch[0], 2) + " % " + print_expr(e->ch[1], 3); break;
    case ExprK::Pow: prec = 4;
      s = print_expr(e->ch[0], 5) + "^" + print_expr(e->ch[1], 3); break;
    case ExprK::Floor: s = print_call_like("floor", *e); break;
    case ExprK::ILog: s = print_call_like("ilog", *e); break;
    case ExprK::CvLin: s = print_call_like("cvlin", *e); break;
    case ExprK::CvPow: s = print_call_like("cvpow", *e); break;
    case ExprK::CvLog: s = print_call_like("cvlog", *e); break;
    case ExprK::CvSig: s = print_call_like("cvsig", *e); break;
  }
  return prec < parent ? "(" + s + ")" : s;
}

inline const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    default: return ">=";
  }
}

// Precedence: Or 1, And 2, Not 3, comparisons/literals 4.
inline std::string print_cond(const CondP& c, int parent) {
  std::string s;
  int prec = 4;
  switch (c->k) {
    case CondK::Lit:
      s = c->blit ? "true" : "false";
      break;
    case CondK::Cmp:
      s = print_expr(c->l, 0) + " " + cmp_text(c->op) + " " +
          print_expr(c->r, 0);
      break;
    case CondK::And: prec = 2;
      s = print_cond(c->ch[0], 2) + " && " + print_cond(c->ch[1], 3); break;
    case CondK::Or: prec = 1;
      s = print_cond(c->ch[0], 1) + " || " + print_cond(c->ch[1], 2); break;
    case CondK::Not: prec = 3;
      s = "!(" + print_cond(c->ch[0], 0) + ")"; break;
  }
  return prec < parent ? "(" + s + ")" : s;
}

inline std::string print_program(const Program& p);

inline std::string print_stmt(const Stmt& s) {
  if (s.k == Stmt::K::Assign) {
    std::string t = s.target;
    if (s.index) t += "[" + print_expr(s.index, 0) + "]";
    return t + " = " + print_expr(s.rhs, 0) + ";";
  }
  std::string out = "if (" + print_cond(s.cond, 0) + ") { " +
                    print_program(*s.then_prog) + " }";
  if (s.else_prog && !s.else_prog->stmts.empty())
    out += " else { " + print_program(*s.else_prog) + " }";
  return out;
}

inline std::string print_program(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.stmts.size(); ++i) {
    if (i) out += " ";
    out += print_stmt(p.stmts[i]);
  }
  return out;
}

// Precedence: Seq 1 (right-assoc), choices 2 (left), || 3, prefix/guard 4,
// atoms 5.
inline std::string print_proc(const ProcP& p, int parent) {
  std::string s;
  int prec = 5;
  switch (p->k) {
    case ProcK::Stop: s = "Stop"; break;
    case ProcK::Skip: s = "Skip"; break;
    case ProcK::Call: {
      s = p->callee + "(";
      for (std::size_t i = 0; i < p->args.size(); ++i) {
        if (i) s += ", ";
        s += print_expr(p->args[i], 0);
      }
      s += ")";
      break;
    }
    case ProcK::Prefix: {
      prec = 4;
      s = p->label;
      if (p->label_index) {
        const Expr& ix = *p->label_index;
        if (ix.k == ExprK::Lit && ix.lit.den == 1 && ix.lit.num >= 0)
          s += "." + std::to_string(ix.lit.num);
        else if (ix.k == ExprK::Var || ix.k == ExprK::Param)
          s += "." + ix.name;
        else
          s += ".(" + print_expr(p->label_index, 0) + ")";
      }
      if (p->prog && !p->prog->stmts.empty())
        s += "{" + print_program(*p->prog) + "}";
      s += " -> " + print_proc(p->ch[0], 4);
      break;
    }
    case ProcK::Guard:
      prec = 4;
      s = "[" + print_cond(p->cond, 0) + "] " + print_proc(p->ch[0], 4);
      break;
    case ProcK::IfProc:
      prec = 4;
      s = "if (" + print_cond(p->cond, 0) + ") { " +
          print_program(*p->then_prog) + " } else { " +
          print_program(*p->else_prog) + " }";
      break;
    case ProcK::Seq: prec = 1;
      s = print_proc(p->ch[0], 2) + "; " + print_proc(p->ch[1], 1); break;
    case ProcK::ExtChoice: prec = 2;
      s = print_proc(p->ch[0], 2) + " [] " + print_proc(p->ch[1], 3); break;
    case ProcK::IntChoice: prec = 2;
      s = print_proc(p->ch[0], 2) + " <> " + print_proc(p->ch[1], 3); break;
    case ProcK::Parallel: prec = 3;
      s = print_proc(p->ch[0], 3) + " || " + print_proc(p->ch[1], 4); break;
  }
  return prec < parent ? "(" + s + ")" : s;
}

}  // namespace detail

inline std::string print_expr(const ExprP& e) { return detail::print_expr(e, 0); }
inline std::string print_cond(const CondP& c) { return detail::print_cond(c, 0); }
inline std::string print_program(const Program& p) { return detail::print_program(p); }
inline std::string print_proc(const ProcP& p) { return detail::print_proc(p, 0); }

inline std::string print_var_decl(const VarDecl& v) {
  std::string s = "var " + v.name;
  if (v.is_array()) s += "[" + std::to_string(v.array_len) + "]";
  if (v.has_range)
    s += ":{" + std::to_string(v.lo) + ".." + std::to_string(v.hi) + "}";
  s += " = ";
  if (v.is_array()) {
    s += "[";
    for (std::size_t i = 0; i < v.init.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(v.init[i]);
    }
    s += "]";
  } else {
    s += std::to_string(v.init[0]);
  }
  return s + ";";
}

inline std::string print_assertion(const Assertion& a) {
  std::string s = "#assert " + a.entry + "(";
  for (std::size_t i = 0; i < a.entry_args.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(a.entry_args[i]);
  }
  s += ")";
  switch (a.k) {
    case AssertK::Reaches:
      s += " reaches " + print_cond(a.cond);
      break;
    case AssertK::ReachesOptimal:
      s += " reaches " + print_cond(a.cond) + " with " +
           (a.dir == OptDir::Max ? "max(" : "min(") + a.objective + ")";
      break;
    case AssertK::Safety:
      s += " |= [] " + print_cond(a.cond);
      break;
    case AssertK::DeadlockFree:
      s += " deadlockfree";
      break;
  }
  return s + ";";
}

inline std::string print_model(const Model& m) {
  std::string out;
  for (const auto& v : m.vars) out += print_var_decl(v) + "\n";
  if (!m.vars.empty()) out += "\n";
  for (const auto& d : m.procs) {
    out += d.name + "(";
    for (std::size_t i = 0; i < d.params.size(); ++i) {
      if (i) out += ", ";
      out += d.params[i];
    }
    out += ") = " + print_proc(d.body) + ";\n";
  }
  if (!m.asserts.empty()) out += "\n";
  for (const auto& a : m.asserts) out += print_assertion(a) + "\n";
  return out;
}

}  // namespace gmc
