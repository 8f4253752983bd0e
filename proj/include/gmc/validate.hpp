#pragma once

// Static checks over a parsed model. Total: never throws, every problem
// becomes a finding. An empty report means the model is executable.

#include <set>
#include <string>
#include <vector>

#include "gmc/ast.hpp"

namespace gmc {

struct Finding {
  SourcePos pos;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool ok() const { return findings.empty(); }
  std::string to_string() const {
    std::string out;
    for (const auto& f : findings)
      out += std::to_string(f.pos.line) + ":" + std::to_string(f.pos.col) +
             ": " + f.message + "\n";
    return out;
  }
};

namespace detail {

struct Validator {
  const Model& m;
  ValidationReport& rep;
  std::set<std::string> params;

  void add(SourcePos pos, std::string msg) {
    rep.findings.push_back({pos, std::move(msg)});
  }

  void check_var_ref(const std::string& name, bool indexed, SourcePos pos) {
    const VarDecl* v = m.find_var(name);
    if (!v) {
      add(pos, "unresolved identifier '" + name + "'");
      return;
    }
    if (indexed && !v->is_array())
      add(pos, "'" + name + "' is scalar but indexed");
    if (!indexed && v->is_array())
      add(pos, "'" + name + "' is an array and needs an index");
  }

  void walk(const ExprP& e) {
    if (!e) return;
    switch (e->k) {
      case ExprK::Var: check_var_ref(e->name, false, e->pos); break;
      case ExprK::Elem: check_var_ref(e->name, true, e->pos); break;
      case ExprK::Param:
        if (!params.count(e->name))
          add(e->pos, "unbound parameter '" + e->name + "'");
        break;
      default: break;
    }
    for (const auto& c : e->ch) walk(c);
  }

  void walk(const CondP& c) {
    if (!c) return;
    walk(c->l);
    walk(c->r);
    for (const auto& k : c->ch) walk(k);
  }

  void walk(const Program& p) {
    for (const auto& s : p.stmts) {
      if (s.k == Stmt::K::Assign) {
        if (params.count(s.target) && !s.index) {
          add(s.pos, "cannot assign to parameter '" + s.target + "'");
        } else {
          check_var_ref(s.target, s.index != nullptr, s.pos);
        }
        walk(s.index);
        walk(s.rhs);
      } else {
        walk(s.cond);
        if (s.then_prog) walk(*s.then_prog);
        if (s.else_prog) walk(*s.else_prog);
      }
    }
  }

  void walk(const ProcP& p) {
    if (!p) return;
    switch (p->k) {
      case ProcK::Prefix:
        walk(p->label_index);
        if (p->prog) walk(*p->prog);
        break;
      case ProcK::Guard:
        walk(p->cond);
        break;
      case ProcK::IfProc:
        walk(p->cond);
        if (p->then_prog) walk(*p->then_prog);
        if (p->else_prog) walk(*p->else_prog);
        break;
      case ProcK::Call: {
        const ProcDef* d = m.find_proc(p->callee);
        if (!d)
          add(p->pos, "call to undefined process '" + p->callee + "'");
        else if (d->params.size() != p->args.size())
          add(p->pos, "'" + p->callee + "' takes " +
                          std::to_string(d->params.size()) +
                          " arguments, got " + std::to_string(p->args.size()));
        for (const auto& a : p->args) walk(a);
        break;
      }
      default: break;
    }
    for (const auto& c : p->ch) walk(c);
  }

  void run() {
    for (const auto& v : m.vars) {
      if (v.is_array() && v.array_len < 1)
        add(v.pos, "array '" + v.name + "' needs positive length");
      if ((Int)v.init.size() != v.slot_count())
        add(v.pos, "'" + v.name + "' initializes " +
                       std::to_string(v.init.size()) + " of " +
                       std::to_string(v.slot_count()) + " slots");
      if (v.has_range) {
        if (v.lo > v.hi)
          add(v.pos, "'" + v.name + "' has empty range");
        for (Int x : v.init)
          if (x < v.lo || x > v.hi) {
            add(v.pos, "'" + v.name + "' initializer " + std::to_string(x) +
                           " outside {" + std::to_string(v.lo) + ".." +
                           std::to_string(v.hi) + "}");
            break;
          }
      }
    }
    for (const auto& d : m.procs) {
      params = std::set<std::string>(d.params.begin(), d.params.end());
      if (params.size() != d.params.size())
        add(d.pos, "'" + d.name + "' has duplicate parameters");
      walk(d.body);
    }
    params.clear();
    for (const auto& a : m.asserts) {
      const ProcDef* d = m.find_proc(a.entry);
      if (!d)
        add(a.pos, "assertion on undefined process '" + a.entry + "'");
      else if (d->params.size() != a.entry_args.size())
        add(a.pos, "'" + a.entry + "' takes " +
                       std::to_string(d->params.size()) + " arguments, got " +
                       std::to_string(a.entry_args.size()));
      walk(a.cond);
      if (a.k == AssertK::ReachesOptimal) {
        const VarDecl* v = m.find_var(a.objective);
        if (!v)
          add(a.pos, "objective '" + a.objective + "' not declared");
        else if (v->is_array())
          add(a.pos, "objective '" + a.objective + "' must be scalar");
      }
    }
  }
};

}  // namespace detail

inline ValidationReport validate_model(const Model& m) {
  ValidationReport rep;
  detail::Validator v{m, rep, {}};
  v.run();
  return rep;
}

}  // namespace gmc
