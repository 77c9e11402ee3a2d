#pragma once

#include <sstream>
#include <string>

#include "velo/syntax/ast.hpp"

namespace velo::syntax {

namespace detail {

// Binding strength, loosest first.
enum Prec { kBinder = 0, kOr, kAnd, kAdd, kMul, kUnary, kApp, kAtom };

inline int op_prec(Op op) {
  switch (op) {
    case Op::Or: return kOr;
    case Op::And: return kAnd;
    case Op::Add: return kAdd;
    case Op::Mul: return kMul;
    case Op::Not: return kUnary;
  }
  return kAtom;
}

inline void pretty(std::ostream& os, const SurfaceTerm& t, int ctx) {
  using K = SurfaceTerm::Kind;
  int own = kAtom;
  switch (t.kind) {
    case K::Lam:
    case K::Let: own = kBinder; break;
    case K::App: own = kApp; break;
    case K::PrimOp: own = op_prec(t.op); break;
    default: break;
  }
  const bool parens = own < ctx;
  if (parens) os << '(';
  switch (t.kind) {
    case K::Var: os << t.name; break;
    case K::Hole: os << '?' << t.name; break;
    case K::NatLit: os << t.nat; break;
    case K::BoolLit: os << (t.boolean ? "true" : "false"); break;
    case K::Lam:
      os << '\\' << t.name << " : " << t.annot << " => ";
      pretty(os, t.children[0], kBinder);
      break;
    case K::Let:
      os << "let " << t.name << " = ";
      pretty(os, t.children[0], kBinder);
      os << " in ";
      pretty(os, t.children[1], kBinder);
      break;
    case K::App:
      pretty(os, t.children[0], kApp);
      os << ' ';
      pretty(os, t.children[1], kAtom);
      break;
    case K::PrimOp:
      if (t.op == Op::Not) {
        os << '!';
        pretty(os, t.children[0], kUnary);
      } else {
        pretty(os, t.children[0], own);
        os << ' ' << op_symbol(t.op) << ' ';
        pretty(os, t.children[1], own + 1);
      }
      break;
  }
  if (parens) os << ')';
}

}  // namespace detail

/// Prints with the fewest parentheses that still re-parse to the same tree.
inline std::string pretty(const SurfaceTerm& t) {
  std::ostringstream os;
  detail::pretty(os, t, detail::kBinder);
  return os.str();
}

}  // namespace velo::syntax
