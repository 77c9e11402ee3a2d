#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "velo/syntax/lexer.hpp"
#include "velo/ty.hpp"

namespace velo::syntax {

/// Object types appear in lambda annotations exactly as in the core.
using SurfaceTy = Ty;

enum class Op { Add, Mul, And, Or, Not };

inline const char* op_symbol(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Mul: return "*";
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Not: return "!";
  }
  return "?";
}

inline std::size_t op_arity(Op op) { return op == Op::Not ? 1 : 2; }

/// Surface syntax tree. Children by kind:
///   Lam: [body]   App: [fun, arg]   PrimOp: args   Let: [bound, body]
struct SurfaceTerm {
  enum class Kind { Var, Lam, App, NatLit, BoolLit, PrimOp, Let, Hole };

  Kind kind = Kind::NatLit;
  Span span;
  std::string name;  // Var, Lam parameter, Let binder, Hole
  SurfaceTy annot;   // Lam
  Nat nat = 0;       // NatLit
  bool boolean = false;
  Op op = Op::Add;   // PrimOp
  std::vector<SurfaceTerm> children;

  static SurfaceTerm var(std::string name, Span sp = {}) {
    SurfaceTerm t;
    t.kind = Kind::Var;
    t.name = std::move(name);
    t.span = sp;
    return t;
  }
  static SurfaceTerm lam(std::string param, SurfaceTy annot, SurfaceTerm body, Span sp = {}) {
    SurfaceTerm t;
    t.kind = Kind::Lam;
    t.name = std::move(param);
    t.annot = std::move(annot);
    t.children.push_back(std::move(body));
    t.span = sp;
    return t;
  }
  static SurfaceTerm app(SurfaceTerm f, SurfaceTerm a, Span sp = {}) {
    SurfaceTerm t;
    t.kind = Kind::App;
    t.children.push_back(std::move(f));
    t.children.push_back(std::move(a));
    t.span = sp;
    return t;
  }
  static SurfaceTerm nat_lit(Nat v, Span sp = {}) {
    SurfaceTerm t;
    t.kind = Kind::NatLit;
    t.nat = std::move(v);
    t.span = sp;
    return t;
  }
  static SurfaceTerm bool_lit(bool b, Span sp = {}) {
    SurfaceTerm t;
    t.kind = Kind::BoolLit;
    t.boolean = b;
    t.span = sp;
    return t;
  }
  static SurfaceTerm prim(Op op, std::vector<SurfaceTerm> args, Span sp = {}) {
    SurfaceTerm t;
    t.kind = Kind::PrimOp;
    t.op = op;
    t.children = std::move(args);
    t.span = sp;
    return t;
  }
  static SurfaceTerm let(std::string name, SurfaceTerm bound, SurfaceTerm body, Span sp = {}) {
    SurfaceTerm t;
    t.kind = Kind::Let;
    t.name = std::move(name);
    t.children.push_back(std::move(bound));
    t.children.push_back(std::move(body));
    t.span = sp;
    return t;
  }
  static SurfaceTerm hole(std::string name, Span sp = {}) {
    SurfaceTerm t;
    t.kind = Kind::Hole;
    t.name = std::move(name);
    t.span = sp;
    return t;
  }
};

/// Structural equality ignoring spans.
inline bool same_shape(const SurfaceTerm& a, const SurfaceTerm& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case SurfaceTerm::Kind::Var:
    case SurfaceTerm::Kind::Hole:
      if (a.name != b.name) return false;
      break;
    case SurfaceTerm::Kind::Lam:
      if (a.name != b.name || !(a.annot == b.annot)) return false;
      break;
    case SurfaceTerm::Kind::Let:
      if (a.name != b.name) return false;
      break;
    case SurfaceTerm::Kind::NatLit:
      if (a.nat != b.nat) return false;
      break;
    case SurfaceTerm::Kind::BoolLit:
      if (a.boolean != b.boolean) return false;
      break;
    case SurfaceTerm::Kind::PrimOp:
      if (a.op != b.op) return false;
      break;
    case SurfaceTerm::Kind::App:
      break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!same_shape(a.children[i], b.children[i])) return false;
  return true;
}

struct Definition {
  std::string name;
  Span name_span;
  SurfaceTerm body;
};

/// A source file: `def` items followed by an optional trailing expression.
struct Program {
  std::vector<Definition> defs;
  std::optional<SurfaceTerm> trailing;
};

struct ReplCommand {
  enum class Kind { Load, TypeOf, Holes, Fill, Eval, Fold, Cse, DumpCore, Quit, Define };

  Kind kind = Kind::Eval;
  std::string argument;             // Load: path; Fill: hole name; Define: name
  std::optional<SurfaceTerm> term;  // absent for `:t` / `:eval` on the focused term
};

}  // namespace velo::syntax
