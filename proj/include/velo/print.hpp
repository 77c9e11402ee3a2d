#pragma once

// Rendering of core terms: the S-expression dump used by `:dump-core`, and a
// surface-syntax view used when showing values and shared subterms.

#include <sstream>
#include <string>
#include <vector>

#include "velo/syntax/ast.hpp"
#include "velo/syntax/pretty.hpp"
#include "velo/term.hpp"

namespace velo {

inline void dump_ty(std::ostream& os, const Ty& t) {
  switch (t.kind()) {
    case Ty::Kind::Nat: os << "Nat"; return;
    case Ty::Kind::Bool: os << "Bool"; return;
    case Ty::Kind::Arr:
      os << "(-> ";
      dump_ty(os, t.dom());
      os << ' ';
      dump_ty(os, t.cod());
      os << ')';
      return;
  }
}

inline void dump_core(std::ostream& os, const Term& t, const MetaStore& store) {
  switch (t.tag()) {
    case Term::Tag::Var:
      os << "(var " << t.var_index() << ')';
      return;
    case Term::Tag::Lam:
      os << "(lam ";
      dump_ty(os, t.lam_param());
      os << ' ';
      dump_core(os, t.lam_body(), store);
      os << ')';
      return;
    case Term::Tag::Call: {
      const Prim& p = t.call_prim();
      if (p.op() == Prim::Op::Nat) {
        os << "(nat " << p.nat_value() << ')';
        return;
      }
      if (p.op() == Prim::Op::Bool) {
        os << "(bool " << (p.bool_value() ? "true" : "false") << ')';
        return;
      }
      os << "(call " << prim_name(p.op());
      for (const Term& a : t.call_args()) {
        os << ' ';
        dump_core(os, a, store);
      }
      os << ')';
      return;
    }
    case Term::Tag::Met: {
      const MetaRef m = t.met_ref();
      os << "(meta " << (m < store.size() ? store[m].name : "#" + std::to_string(m)) << " (thin \""
         << t.met_embed().bits() << "\"))";
      return;
    }
  }
}

/// Deterministic S-expression form, e.g. `(call add (nat 1) (var 0))`.
inline std::string dump_core(const Term& t, const MetaStore& store = {}) {
  std::ostringstream os;
  dump_core(os, t, store);
  return os.str();
}

namespace detail {

inline std::string fresh_binder(const std::vector<std::string>& names) {
  for (std::size_t i = names.size();; ++i) {
    std::string candidate = "x" + std::to_string(i);
    bool taken = false;
    for (const auto& n : names) taken = taken || n == candidate;
    if (!taken) return candidate;
  }
}

inline syntax::SurfaceTerm to_surface(const Term& t, const MetaStore& store, std::vector<std::string>& names) {
  using syntax::SurfaceTerm;
  switch (t.tag()) {
    case Term::Tag::Var: {
      const std::size_t i = t.var_index();
      if (i < names.size()) return SurfaceTerm::var(names[names.size() - 1 - i]);
      return SurfaceTerm::var("#" + std::to_string(i));
    }
    case Term::Tag::Lam: {
      std::string x = fresh_binder(names);
      names.push_back(x);
      SurfaceTerm body = to_surface(t.lam_body(), store, names);
      names.pop_back();
      return SurfaceTerm::lam(std::move(x), t.lam_param(), std::move(body));
    }
    case Term::Tag::Call: {
      const Prim& p = t.call_prim();
      std::vector<SurfaceTerm> args;
      for (const Term& a : t.call_args()) args.push_back(to_surface(a, store, names));
      switch (p.op()) {
        case Prim::Op::Nat: return SurfaceTerm::nat_lit(p.nat_value());
        case Prim::Op::Bool: return SurfaceTerm::bool_lit(p.bool_value());
        case Prim::Op::Add: return SurfaceTerm::prim(syntax::Op::Add, std::move(args));
        case Prim::Op::Mul: return SurfaceTerm::prim(syntax::Op::Mul, std::move(args));
        case Prim::Op::And: return SurfaceTerm::prim(syntax::Op::And, std::move(args));
        case Prim::Op::Or: return SurfaceTerm::prim(syntax::Op::Or, std::move(args));
        case Prim::Op::Not: return SurfaceTerm::prim(syntax::Op::Not, std::move(args));
        case Prim::Op::App: return SurfaceTerm::app(std::move(args[0]), std::move(args[1]));
      }
      break;
    }
    case Term::Tag::Met: {
      const MetaRef m = t.met_ref();
      return SurfaceTerm::hole(m < store.size() ? store[m].name : "#" + std::to_string(m));
    }
  }
  return SurfaceTerm::var("?");
}

}  // namespace detail

/// Surface syntax for a core term. `names` are the binder names of the
/// ambient context, oldest-first; inner binders are named x0, x1, ...
inline std::string show_term(const Term& t, const MetaStore& store = {}, std::vector<std::string> names = {}) {
  return syntax::pretty(detail::to_surface(t, store, names));
}

/// `ε, a : Nat, f : Nat -> Bool`; entries oldest-first.
inline std::string show_context(const Context& ctx, const std::vector<std::string>& names) {
  std::string out = "ε";
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    out += ", ";
    out += i < names.size() ? names[i] : "_";
    out += " : " + to_string(ctx[i]);
  }
  return out;
}

}  // namespace velo
