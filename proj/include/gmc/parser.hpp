#pragma once

// Recursive-descent parser for model text.
//
// Precedence, loosest to tightest:
//   ;   (sequence, right-assoc)
//   []  <>  (choices, one level, left-assoc)
//   ||  (interleaving, left-assoc)
//   guards, event prefixes, atoms
//
// `#define` names expand into conditions at use sites, and bounded
// quantifiers expand into finite conjunctions/disjunctions, so neither
// survives into the AST.

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gmc/ast.hpp"
#include "gmc/lexer.hpp"

namespace gmc {

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Model parse_model() {
    Model m;
    std::set<std::string> var_names, proc_names;
    while (!at(Tok::End)) {
      if (at(Tok::KwVar)) {
        VarDecl v = parse_var_decl();
        if (!var_names.insert(v.name).second)
          throw ParseError(v.pos, "duplicate variable '" + v.name + "'");
        m.vars.push_back(std::move(v));
      } else if (at(Tok::HashDefine)) {
        Token t = eat(Tok::HashDefine);
        Token name = eat(Tok::Ident);
        CondP body = parse_cond();
        eat(Tok::Semi);
        if (defines_.count(name.text))
          throw ParseError(name.pos, "duplicate definition '" + name.text + "'");
        (void)t;
        defines_[name.text] = body;
      } else if (at(Tok::HashAssert)) {
        m.asserts.push_back(parse_assert());
      } else if (at(Tok::Ident)) {
        ProcDef p = parse_proc_def();
        if (!proc_names.insert(p.name).second)
          throw ParseError(p.pos, "duplicate process '" + p.name + "'");
        m.procs.push_back(std::move(p));
      } else {
        throw err("expected a declaration",
                  {"'var'", "'#define'", "'#assert'", "identifier"});
      }
    }
    return m;
  }

  CondP parse_cond_only() {
    CondP c = parse_cond();
    eat(Tok::End);
    return c;
  }
  ExprP parse_expr_only() {
    ExprP e = parse_expr();
    eat(Tok::End);
    return e;
  }
  Program parse_program_only() {
    Program p = parse_program(Tok::End);
    eat(Tok::End);
    return p;
  }
  std::pair<std::string, std::vector<Int>> parse_entry_only() {
    Token name = eat(Tok::Ident);
    std::vector<Int> args;
    if (at(Tok::LParen)) {
      eat(Tok::LParen);
      while (!at(Tok::RParen)) {
        args.push_back(const_int(parse_expr()));
        if (!at(Tok::RParen)) eat(Tok::Comma);
      }
      eat(Tok::RParen);
    }
    eat(Tok::End);
    return {name.text, std::move(args)};
  }
  Assertion parse_assert_tail_only(const std::string& entry_text) {
    // "main() reaches goal with max(v)" style inline assertion bodies.
    (void)entry_text;
    Assertion a = parse_assert_body();
    eat(Tok::End);
    return a;
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
  std::map<std::string, CondP> defines_;
  std::vector<std::string> params_;  // active parameter / quantifier bindings

  const Token& cur() const { return toks_[i_]; }
  bool at(Tok k) const { return cur().kind == k; }
  Token eat(Tok k) {
    if (!at(k))
      throw ParseError(cur().pos,
                       std::string("expected ") + tok_name(k) + ", found " +
                           found_desc(),
                       {tok_name(k)});
    return toks_[i_++];
  }
  std::string found_desc() const {
    const Token& t = cur();
    if (t.kind == Tok::Ident) return "'" + t.text + "'";
    return tok_name(t.kind);
  }
  ParseError err(const std::string& msg, std::vector<std::string> expected = {}) {
    return ParseError(cur().pos, msg + " (found " + found_desc() + ")",
                      std::move(expected));
  }
  bool is_param(const std::string& n) const {
    for (auto& p : params_)
      if (p == n) return true;
    return false;
  }

  // ---- declarations ----

  Int const_int(const ExprP& e) {
    Rat v = const_eval(e);
    if (!v.is_int()) throw ParseError(e->pos, "expected an integer constant");
    return v.num;
  }

  Rat const_eval(const ExprP& e) {
    switch (e->k) {
      case ExprK::Lit: return e->lit;
      case ExprK::Neg: return -const_eval(e->ch[0]);
      case ExprK::Add: return const_eval(e->ch[0]) + const_eval(e->ch[1]);
      case ExprK::Sub: return const_eval(e->ch[0]) - const_eval(e->ch[1]);
      case ExprK::Mul: return const_eval(e->ch[0]) * const_eval(e->ch[1]);
      case ExprK::Div: {
        Rat a = const_eval(e->ch[0]), b = const_eval(e->ch[1]);
        if (a.is_int() && b.is_int()) {
          if (b.num == 0) throw ParseError(e->pos, "division by zero in constant");
          return Rat(a.num / b.num);
        }
        return a / b;
      }
      case ExprK::Mod: {
        Rat a = const_eval(e->ch[0]), b = const_eval(e->ch[1]);
        if (!a.is_int() || !b.is_int() || b.num == 0)
          throw ParseError(e->pos, "invalid modulo in constant");
        return Rat(a.num % b.num);
      }
      case ExprK::Pow:
        return rat_pow(const_eval(e->ch[0]), const_int(e->ch[1]));
      default:
        throw ParseError(e->pos, "expected a constant expression");
    }
  }

  VarDecl parse_var_decl() {
    VarDecl v;
    v.pos = eat(Tok::KwVar).pos;
    v.name = eat(Tok::Ident).text;
    if (at(Tok::LBracket)) {
      eat(Tok::LBracket);
      v.array_len = const_int(parse_expr());
      eat(Tok::RBracket);
    }
    if (at(Tok::Colon)) {
      eat(Tok::Colon);
      eat(Tok::LBrace);
      v.lo = const_int(parse_expr());
      eat(Tok::DotDot);
      v.hi = const_int(parse_expr());
      eat(Tok::RBrace);
      v.has_range = true;
    }
    if (at(Tok::Assign)) {
      eat(Tok::Assign);
      if (at(Tok::LBracket)) {
        eat(Tok::LBracket);
        while (!at(Tok::RBracket)) {
          Int val = const_int(parse_expr());
          if (at(Tok::LParen)) {  // value(count) repetition
            eat(Tok::LParen);
            Int count = const_int(parse_expr());
            eat(Tok::RParen);
            if (count < 0) throw err("negative repetition count");
            for (Int k = 0; k < count; ++k) v.init.push_back(val);
          } else {
            v.init.push_back(val);
          }
          if (!at(Tok::RBracket)) eat(Tok::Comma);
        }
        eat(Tok::RBracket);
      } else {
        v.init.push_back(const_int(parse_expr()));
      }
    } else {
      // default initialization: zeros
      for (Int k = 0; k < v.slot_count(); ++k) v.init.push_back(0);
    }
    eat(Tok::Semi);
    if (!v.is_array() && v.init.size() != 1)
      throw ParseError(v.pos, "scalar '" + v.name + "' takes a single initializer");
    return v;
  }

  ProcDef parse_proc_def() {
    ProcDef d;
    Token name = eat(Tok::Ident);
    d.name = name.text;
    d.pos = name.pos;
    eat(Tok::LParen);
    while (!at(Tok::RParen)) {
      d.params.push_back(eat(Tok::Ident).text);
      if (!at(Tok::RParen)) eat(Tok::Comma);
    }
    eat(Tok::RParen);
    eat(Tok::Assign);
    params_ = d.params;
    d.body = parse_proc();
    params_.clear();
    eat(Tok::Semi);
    return d;
  }

  Assertion parse_assert() {
    eat(Tok::HashAssert);
    Assertion a = parse_assert_body();
    eat(Tok::Semi);
    return a;
  }

  Assertion parse_assert_body() {
    Assertion a;
    Token name = eat(Tok::Ident);
    a.entry = name.text;
    a.pos = name.pos;
    eat(Tok::LParen);
    while (!at(Tok::RParen)) {
      a.entry_args.push_back(const_int(parse_expr()));
      if (!at(Tok::RParen)) eat(Tok::Comma);
    }
    eat(Tok::RParen);
    if (at(Tok::KwReaches)) {
      eat(Tok::KwReaches);
      a.k = AssertK::Reaches;
      a.cond = parse_cond();
      if (at(Tok::KwWith)) {
        eat(Tok::KwWith);
        a.k = AssertK::ReachesOptimal;
        if (at(Tok::KwMax)) { eat(Tok::KwMax); a.dir = OptDir::Max; }
        else if (at(Tok::KwMin)) { eat(Tok::KwMin); a.dir = OptDir::Min; }
        else throw err("expected 'max' or 'min'", {"'max'", "'min'"});
        eat(Tok::LParen);
        a.objective = eat(Tok::Ident).text;
        eat(Tok::RParen);
      }
    } else if (at(Tok::Models)) {
      eat(Tok::Models);
      eat(Tok::ChoiceExt);  // the temporal box
      a.k = AssertK::Safety;
      a.cond = parse_cond();
    } else if (at(Tok::KwDeadlockFree)) {
      eat(Tok::KwDeadlockFree);
      a.k = AssertK::DeadlockFree;
    } else {
      throw err("expected an assertion form",
                {"'reaches'", "'|='", "'deadlockfree'"});
    }
    return a;
  }

  // ---- processes ----

  ProcP parse_proc() { return parse_seq(); }

  ProcP parse_seq() {
    ProcP lhs = parse_choice();
    if (at(Tok::Semi) && peek_continues_proc()) {
      SourcePos p = cur().pos;
      eat(Tok::Semi);
      ProcP rhs = parse_seq();
      return proc_bin(ProcK::Seq, std::move(lhs), std::move(rhs), p);
    }
    return lhs;
  }

  // A ';' ends a process definition unless a process expression follows.
  // "P(); Q() = ..." needs lookahead past the parens: '=' after the
  // matching ')' means a new definition, not a sequenced call.
  bool peek_continues_proc() const {
    std::size_t j = i_ + 1;
    if (j >= toks_.size()) return false;
    switch (toks_[j].kind) {
      case Tok::KwStop:
      case Tok::KwSkip:
      case Tok::KwIf:
      case Tok::LParen:
      case Tok::LBracket:
        return true;
      case Tok::Ident:
        break;
      default:
        return false;
    }
    if (j + 1 >= toks_.size() || toks_[j + 1].kind != Tok::LParen) return true;
    std::size_t k = j + 1;
    int depth = 0;
    for (; k < toks_.size(); ++k) {
      if (toks_[k].kind == Tok::LParen) ++depth;
      else if (toks_[k].kind == Tok::RParen && --depth == 0) { ++k; break; }
    }
    return !(k < toks_.size() && toks_[k].kind == Tok::Assign);
  }

  ProcP parse_choice() {
    ProcP lhs = parse_par();
    while (at(Tok::ChoiceExt) || at(Tok::ChoiceInt)) {
      ProcK k = at(Tok::ChoiceExt) ? ProcK::ExtChoice : ProcK::IntChoice;
      SourcePos p = cur().pos;
      ++i_;
      ProcP rhs = parse_par();
      lhs = proc_bin(k, std::move(lhs), std::move(rhs), p);
    }
    return lhs;
  }

  ProcP parse_par() {
    ProcP lhs = parse_prefix();
    while (at(Tok::Parallel)) {
      SourcePos p = eat(Tok::Parallel).pos;
      ProcP rhs = parse_prefix();
      lhs = proc_bin(ProcK::Parallel, std::move(lhs), std::move(rhs), p);
    }
    return lhs;
  }

  ProcP parse_prefix() {
    if (at(Tok::LBracket)) {
      SourcePos p = eat(Tok::LBracket).pos;
      CondP c = parse_cond();
      eat(Tok::RBracket);
      ProcP body = parse_prefix();
      return proc_guard(std::move(c), std::move(body), p);
    }
    if (at(Tok::KwStop)) return proc_stop(eat(Tok::KwStop).pos);
    if (at(Tok::KwSkip)) return proc_skip(eat(Tok::KwSkip).pos);
    if (at(Tok::KwIf)) {
      SourcePos p = eat(Tok::KwIf).pos;
      eat(Tok::LParen);
      CondP c = parse_cond();
      eat(Tok::RParen);
      eat(Tok::LBrace);
      auto t = std::make_shared<Program>(parse_program(Tok::RBrace));
      eat(Tok::RBrace);
      eat(Tok::KwElse);
      eat(Tok::LBrace);
      auto e = std::make_shared<Program>(parse_program(Tok::RBrace));
      eat(Tok::RBrace);
      return proc_if(std::move(c), std::move(t), std::move(e), p);
    }
    if (at(Tok::LParen)) {
      eat(Tok::LParen);
      ProcP inner = parse_proc();
      eat(Tok::RParen);
      return inner;
    }
    if (at(Tok::Ident)) {
      Token name = toks_[i_++];
      if (at(Tok::LParen)) {
        eat(Tok::LParen);
        std::vector<ExprP> args;
        while (!at(Tok::RParen)) {
          args.push_back(parse_expr());
          if (!at(Tok::RParen)) eat(Tok::Comma);
        }
        eat(Tok::RParen);
        return proc_call(name.text, std::move(args), name.pos);
      }
      // event prefix: name[.index][{prog}] -> cont
      ExprP idx;
      if (at(Tok::Dot)) {
        eat(Tok::Dot);
        if (at(Tok::IntLit)) {
          Token t = toks_[i_++];
          idx = expr_lit(Rat(t.int_val), t.pos);
        } else if (at(Tok::Ident)) {
          Token t = toks_[i_++];
          idx = is_param(t.text) ? expr_param(t.text, t.pos)
                                 : expr_var(t.text, t.pos);
        } else if (at(Tok::LParen)) {
          eat(Tok::LParen);
          idx = parse_expr();
          eat(Tok::RParen);
        } else {
          throw err("expected an event index",
                    {"integer", "identifier", "'('"});
        }
      }
      ProgramP prog;
      if (at(Tok::LBrace)) {
        eat(Tok::LBrace);
        prog = std::make_shared<Program>(parse_program(Tok::RBrace));
        eat(Tok::RBrace);
      }
      eat(Tok::Arrow);
      ProcP cont = parse_prefix();
      return proc_prefix(name.text, std::move(idx), std::move(prog),
                         std::move(cont), name.pos);
    }
    throw err("expected a process expression",
              {"'Stop'", "'Skip'", "'if'", "'('", "'['", "identifier"});
  }

  // ---- programs ----

  Program parse_program(Tok terminator) {
    Program p;
    while (!at(terminator) && !at(Tok::End)) p.stmts.push_back(parse_stmt());
    return p;
  }

  Stmt parse_stmt() {
    if (at(Tok::KwIf)) {
      Stmt s;
      s.k = Stmt::K::If;
      s.pos = eat(Tok::KwIf).pos;
      eat(Tok::LParen);
      s.cond = parse_cond();
      eat(Tok::RParen);
      s.then_prog = parse_stmt_or_block();
      if (at(Tok::KwElse)) {
        eat(Tok::KwElse);
        s.else_prog = parse_stmt_or_block();
      } else {
        s.else_prog = std::make_shared<const Program>();
      }
      return s;
    }
    Token name = eat(Tok::Ident);
    ExprP idx;
    if (at(Tok::LBracket)) {
      eat(Tok::LBracket);
      idx = parse_expr();
      eat(Tok::RBracket);
    }
    Tok op = cur().kind;
    if (op != Tok::Assign && op != Tok::PlusAssign && op != Tok::MinusAssign &&
        op != Tok::StarAssign)
      throw err("expected an assignment operator",
                {"'='", "'+='", "'-='", "'*='"});
    ++i_;
    ExprP rhs = parse_expr();
    eat(Tok::Semi);
    if (op != Tok::Assign) {
      ExprP self = idx ? expr_elem(name.text, idx, name.pos)
                       : (is_param(name.text) ? expr_param(name.text, name.pos)
                                              : expr_var(name.text, name.pos));
      ExprK k = op == Tok::PlusAssign ? ExprK::Add
                : op == Tok::MinusAssign ? ExprK::Sub
                                         : ExprK::Mul;
      rhs = expr_bin(k, std::move(self), std::move(rhs), name.pos);
    }
    return stmt_assign(name.text, std::move(idx), std::move(rhs), name.pos);
  }

  ProgramP parse_stmt_or_block() {
    if (at(Tok::LBrace)) {
      eat(Tok::LBrace);
      auto p = std::make_shared<Program>(parse_program(Tok::RBrace));
      eat(Tok::RBrace);
      return p;
    }
    auto p = std::make_shared<Program>();
    p->stmts.push_back(parse_stmt());
    return p;
  }

  // ---- conditions ----

  CondP parse_cond() {
    CondP lhs = parse_cand();
    while (at(Tok::Parallel)) {
      SourcePos p = eat(Tok::Parallel).pos;
      lhs = cond_or(std::move(lhs), parse_cand(), p);
    }
    return lhs;
  }

  CondP parse_cand() {
    CondP lhs = parse_cnot();
    while (at(Tok::AndAnd)) {
      SourcePos p = eat(Tok::AndAnd).pos;
      lhs = cond_and(std::move(lhs), parse_cnot(), p);
    }
    return lhs;
  }

  CondP parse_cnot() {
    if (at(Tok::Not)) {
      SourcePos p = eat(Tok::Not).pos;
      return cond_not(parse_cnot(), p);
    }
    return parse_cprim();
  }

  bool at_cmp_op() const {
    switch (cur().kind) {
      case Tok::Eq: case Tok::Ne: case Tok::Lt:
      case Tok::Le: case Tok::Gt: case Tok::Ge:
        return true;
      default:
        return false;
    }
  }

  CmpOp eat_cmp_op() {
    Tok k = toks_[i_++].kind;
    switch (k) {
      case Tok::Eq: return CmpOp::Eq;
      case Tok::Ne: return CmpOp::Ne;
      case Tok::Lt: return CmpOp::Lt;
      case Tok::Le: return CmpOp::Le;
      case Tok::Gt: return CmpOp::Gt;
      default: return CmpOp::Ge;
    }
  }

  CondP parse_cprim() {
    if (at(Tok::KwTrue)) return cond_lit(true, eat(Tok::KwTrue).pos);
    if (at(Tok::KwFalse)) return cond_lit(false, eat(Tok::KwFalse).pos);
    if (at(Tok::LParen) && i_ + 1 < toks_.size() &&
        (toks_[i_ + 1].kind == Tok::AndAnd || toks_[i_ + 1].kind == Tok::Parallel))
      return parse_quantifier();

    // A comparison of integer expressions, a parenthesized condition, or a
    // #define reference. Comparisons are tried first so '(x+1) > 3' works;
    // a failed attempt backtracks.
    std::size_t mark = i_;
    try {
      ExprP l = parse_expr();
      if (at_cmp_op()) {
        SourcePos p = cur().pos;
        CmpOp op = eat_cmp_op();
        ExprP r = parse_expr();
        return cond_cmp(op, std::move(l), std::move(r), p);
      }
      if (l->k == ExprK::Var) {
        auto it = defines_.find(l->name);
        if (it != defines_.end()) return it->second;
      }
      throw err("expected a comparison operator",
                {"'=='", "'!='", "'<'", "'<='", "'>'", "'>='"});
    } catch (const ParseError&) {
      if (!(toks_[mark].kind == Tok::LParen)) throw;
      i_ = mark;
    }
    eat(Tok::LParen);
    CondP c = parse_cond();
    eat(Tok::RParen);
    return c;
  }

  // (&& i:{lo..hi}@(body)) and its existential twin. Bounds must be
  // constant; the expansion is a finite conjunction/disjunction.
  CondP parse_quantifier() {
    SourcePos p = eat(Tok::LParen).pos;
    bool universal = at(Tok::AndAnd);
    ++i_;
    Token index = eat(Tok::Ident);
    eat(Tok::Colon);
    eat(Tok::LBrace);
    Int lo, hi;
    try {
      lo = const_int(parse_expr());
      eat(Tok::DotDot);
      hi = const_int(parse_expr());
    } catch (const ParseError& e) {
      throw ParseError(e.pos, "quantifier bounds must be constant");
    }
    eat(Tok::RBrace);
    eat(Tok::At);
    eat(Tok::LParen);
    params_.push_back(index.text);
    CondP body = parse_cond();
    params_.pop_back();
    eat(Tok::RParen);
    eat(Tok::RParen);
    if (hi - lo >= 10000)
      throw ParseError(p, "quantifier range too large (limit 10000)");
    if (hi < lo) return cond_lit(universal, p);
    CondP acc;
    for (Int v = lo; v <= hi; ++v) {
      Subst s{{index.text, expr_lit(Rat(v))}};
      CondP term = subst_cond(body, s);
      acc = acc ? (universal ? cond_and(std::move(acc), std::move(term), p)
                             : cond_or(std::move(acc), std::move(term), p))
                : term;
    }
    return acc;
  }

  // ---- integer expressions ----

  ExprP parse_expr() { return parse_add(); }

  ExprP parse_add() {
    ExprP lhs = parse_mul();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      ExprK k = at(Tok::Plus) ? ExprK::Add : ExprK::Sub;
      SourcePos p = cur().pos;
      ++i_;
      lhs = expr_bin(k, std::move(lhs), parse_mul(), p);
    }
    return lhs;
  }

  ExprP parse_mul() {
    ExprP lhs = parse_unary();
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
      ExprK k = at(Tok::Star) ? ExprK::Mul
                : at(Tok::Slash) ? ExprK::Div
                                 : ExprK::Mod;
      SourcePos p = cur().pos;
      ++i_;
      lhs = expr_bin(k, std::move(lhs), parse_unary(), p);
    }
    return lhs;
  }

  ExprP parse_unary() {
    if (at(Tok::Minus)) {
      SourcePos p = eat(Tok::Minus).pos;
      ExprP inner = parse_unary();
      // Fold into the literal so "-3" and a substituted Lit(-3) are the
      // same node; round-trip printing depends on this.
      if (inner->k == ExprK::Lit) return expr_lit(-inner->lit, p);
      return mk_expr(ExprK::Neg, Rat(0), "", {inner}, p);
    }
    return parse_pow();
  }

  ExprP parse_pow() {
    ExprP base = parse_postfix();
    if (at(Tok::Caret)) {
      SourcePos p = eat(Tok::Caret).pos;
      return expr_bin(ExprK::Pow, std::move(base), parse_unary(), p);
    }
    return base;
  }

  static int builtin_arity(const std::string& name, ExprK& k) {
    if (name == "floor") { k = ExprK::Floor; return 1; }
    if (name == "ilog") { k = ExprK::ILog; return 2; }
    if (name == "cvlin") { k = ExprK::CvLin; return 3; }
    if (name == "cvpow") { k = ExprK::CvPow; return 4; }
    if (name == "cvlog") { k = ExprK::CvLog; return 4; }
    if (name == "cvsig") { k = ExprK::CvSig; return 5; }
    return -1;
  }

  ExprP parse_postfix() {
    if (at(Tok::IntLit)) {
      Token t = toks_[i_++];
      return expr_lit(Rat(t.int_val), t.pos);
    }
    if (at(Tok::DecLit)) {
      Token t = toks_[i_++];
      return expr_lit(t.dec_val, t.pos);
    }
    if (at(Tok::LParen)) {
      eat(Tok::LParen);
      ExprP e = parse_expr();
      eat(Tok::RParen);
      return e;
    }
    if (at(Tok::Ident)) {
      Token t = toks_[i_++];
      if (at(Tok::LParen)) {
        ExprK k;
        int arity = builtin_arity(t.text, k);
        if (arity < 0)
          throw ParseError(t.pos, "unknown function '" + t.text + "'");
        eat(Tok::LParen);
        std::vector<ExprP> args;
        while (!at(Tok::RParen)) {
          args.push_back(parse_expr());
          if (!at(Tok::RParen)) eat(Tok::Comma);
        }
        eat(Tok::RParen);
        if ((int)args.size() != arity)
          throw ParseError(t.pos, "'" + t.text + "' takes " +
                                      std::to_string(arity) + " arguments");
        return mk_expr(k, Rat(0), "", std::move(args), t.pos);
      }
      if (at(Tok::LBracket)) {
        eat(Tok::LBracket);
        ExprP idx = parse_expr();
        eat(Tok::RBracket);
        return expr_elem(t.text, std::move(idx), t.pos);
      }
      return is_param(t.text) ? expr_param(t.text, t.pos)
                              : expr_var(t.text, t.pos);
    }
    throw err("expected an expression",
              {"integer", "identifier", "'('", "'-'"});
  }
};

}  // namespace detail

inline Model parse_model(std::string_view src) {
  return detail::Parser(src).parse_model();
}

inline CondP parse_cond_text(std::string_view src) {
  return detail::Parser(src).parse_cond_only();
}

inline ExprP parse_expr_text(std::string_view src) {
  return detail::Parser(src).parse_expr_only();
}

inline Program parse_program_text(std::string_view src) {
  return detail::Parser(src).parse_program_only();
}

// "main()" / "survey(2)" style entry references.
inline std::pair<std::string, std::vector<Int>> parse_entry_text(
    std::string_view src) {
  return detail::Parser(src).parse_entry_only();
}

// Inline assertion text: "main() reaches done == 1 with max(lambda)".
inline Assertion parse_assertion_text(std::string_view src) {
  return detail::Parser(src).parse_assert_tail_only("");
}

}  // namespace gmc
