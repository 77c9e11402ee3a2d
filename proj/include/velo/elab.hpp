#pragma once

// Elaboration from surface syntax to core terms, in two passes.
//
// collect_holes walks the tree bottom-up. It synthesises types (checking
// locally where a type is already known) and records every hole occurrence.
// Where several subtrees mention the same hole, the contexts are reconciled
// to their longest common prefix, so the hole ends up living in the part of
// the context that every occurrence shares.
//
// emit_core then walks top-down, allocating one Meta per hole and giving
// each occurrence the prefix thinning from the hole's reconciled context
// into the occurrence context.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "velo/check.hpp"
#include "velo/decide.hpp"
#include "velo/rename.hpp"
#include "velo/syntax/ast.hpp"
#include "velo/term.hpp"
#include "velo/thin.hpp"

namespace velo::elab {

using syntax::Span;
using syntax::SurfaceTerm;

/// A typing context together with the source names of its binders. Each
/// binder also carries an identity, so that two different binders of the
/// same type at the same depth are not mistaken for one another.
struct Scope {
  Context ctx;
  std::vector<std::string> names;  // parallel to ctx, oldest-first
  std::vector<std::size_t> ids;    // parallel to ctx; empty means positional

  std::size_t id_at(std::size_t pos) const { return pos < ids.size() ? ids[pos] : pos; }

  Scope extended(const std::string& name, const Ty& ty, std::optional<std::size_t> id = std::nullopt) const {
    Scope s = *this;
    while (s.ids.size() < s.ctx.size()) s.ids.push_back(s.ids.size());
    s.ids.push_back(id ? *id : s.ctx.size());
    s.ctx.push(ty);
    s.names.push_back(name);
    return s;
  }

  /// De Bruijn index of the innermost binder called `name`.
  std::optional<std::size_t> lookup(const std::string& name) const {
    for (std::size_t i = names.size(); i-- > 0;)
      if (names[i] == name) return names.size() - 1 - i;
    return std::nullopt;
  }
};

/// The part of a scope a hole may see: a context plus binder identities.
struct HoleScope {
  Context ctx;
  std::vector<std::size_t> ids;

  static HoleScope of(const Scope& s) {
    HoleScope h{s.ctx, {}};
    for (std::size_t i = 0; i < s.ctx.size(); ++i) h.ids.push_back(s.id_at(i));
    return h;
  }

  /// Longest common prefix, binder by binder.
  HoleScope meet(const HoleScope& o) const {
    std::size_t n = 0;
    while (n < ids.size() && n < o.ids.size() && ids[n] == o.ids[n]) ++n;
    return HoleScope{ctx.prefix(n), std::vector<std::size_t>(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n))};
  }
};

/// A closed top-level definition that later terms may mention by name.
struct GlobalDef {
  Term term;
  MetaStore store;
};
using Globals = std::map<std::string, GlobalDef>;

struct TypeError {
  enum class Kind {
    UnboundVariable,
    Mismatch,
    NotAFunction,
    HoleTypeConflict,
    ArityError,
    CannotInferHole,
    HoleyDefinition,
    UnknownHole,
    DuplicateHole,
  };

  Kind kind;
  Span span;
  std::string name;                   // variable, hole, operator or definition
  std::vector<std::string> in_scope;  // UnboundVariable
  std::optional<Ty> expected;
  std::optional<Ty> actual;
  Path path;                          // Mismatch: where expected and actual diverge
  std::size_t expected_arity = 0;
  std::size_t got_arity = 0;
  std::string detail;
};

inline const char* kind_name(TypeError::Kind k) {
  switch (k) {
    case TypeError::Kind::UnboundVariable: return "unbound-variable";
    case TypeError::Kind::Mismatch: return "mismatch";
    case TypeError::Kind::NotAFunction: return "not-a-function";
    case TypeError::Kind::HoleTypeConflict: return "hole-type-conflict";
    case TypeError::Kind::ArityError: return "arity";
    case TypeError::Kind::CannotInferHole: return "cannot-infer-hole";
    case TypeError::Kind::HoleyDefinition: return "holey-definition";
    case TypeError::Kind::UnknownHole: return "unknown-hole";
    case TypeError::Kind::DuplicateHole: return "duplicate-hole";
  }
  return "error";
}

// ---------------------------------------------------------------------------
// Pass 1

struct SkelNode {
  enum class Kind { Local, Global, Lam, App, Prim, Let, NatLit, BoolLit, Hole };

  Kind kind;
  Span span;
  Ty ty;
  Scope scope;  // ambient
  /// Holes beneath this node, each with the context reconciled so far.
  std::map<std::string, HoleScope> holes;

  std::size_t index = 0;  // Local
  std::string name;       // Global, Hole, Lam/Let binder
  Ty binder_ty;           // Lam parameter, Let-bound type
  syntax::Op op = syntax::Op::Add;
  Nat nat = 0;
  bool boolean = false;
  std::vector<SkelNode> children;
};

struct HoleInfo {
  Context ctx;                     // reconciled over every occurrence
  std::vector<std::string> names;  // binder names of ctx
  Ty ty;
  Span first_span;
};

struct HoleySkeleton {
  SkelNode root;
  std::map<std::string, HoleInfo> table;
};

namespace detail {

struct Failure {
  TypeError error;
};

inline TypeError make_error(TypeError::Kind k, Span span) {
  TypeError e{};
  e.kind = k;
  e.span = span;
  return e;
}

inline TypeError mismatch(Span span, const Ty& expected, const Ty& actual, std::string detail = {}) {
  TypeError e = make_error(TypeError::Kind::Mismatch, span);
  e.expected = expected;
  e.actual = actual;
  auto d = ty_eq(expected, actual);
  if (d.is_no()) e.path = d.no().path;
  e.detail = std::move(detail);
  return e;
}

class Collector {
 public:
  Collector(const Globals& globals, std::map<std::string, Ty> fixed, std::size_t first_id = 0)
      : globals_(globals), hole_ty_(std::move(fixed)), next_id_(first_id) {}

  SkelNode synth(const SurfaceTerm& s, const Scope& scope) {
    using K = SurfaceTerm::Kind;
    switch (s.kind) {
      case K::Var: return variable(s, scope);
      case K::NatLit: {
        SkelNode n = leaf(SkelNode::Kind::NatLit, s, scope, Ty::nat());
        n.nat = s.nat;
        return n;
      }
      case K::BoolLit: {
        SkelNode n = leaf(SkelNode::Kind::BoolLit, s, scope, Ty::boolean());
        n.boolean = s.boolean;
        return n;
      }
      case K::PrimOp: return prim_op(s, scope);
      case K::Lam: {
        SkelNode body = synth(s.children[0], bind(scope, s.name, s.annot));
        SkelNode n = leaf(SkelNode::Kind::Lam, s, scope, Ty::arrow(s.annot, body.ty));
        n.name = s.name;
        n.binder_ty = s.annot;
        adopt(n, std::move(body));
        return n;
      }
      case K::App: {
        SkelNode f = synth(s.children[0], scope);
        if (!f.ty.is_arrow()) {
          TypeError e = make_error(TypeError::Kind::NotAFunction, s.children[0].span);
          e.actual = f.ty;
          throw Failure{e};
        }
        SkelNode a = check(s.children[1], scope, f.ty.dom());
        SkelNode n = leaf(SkelNode::Kind::App, s, scope, f.ty.cod());
        adopt(n, std::move(f));
        adopt(n, std::move(a));
        return n;
      }
      case K::Let: {
        SkelNode bound = synth(s.children[0], scope);
        SkelNode body = synth(s.children[1], bind(scope, s.name, bound.ty));
        return let_node(s, scope, std::move(bound), std::move(body));
      }
      case K::Hole: {
        auto it = hole_ty_.find(s.name);
        if (it == hole_ty_.end()) {
          TypeError e = make_error(TypeError::Kind::CannotInferHole, s.span);
          e.name = s.name;
          throw Failure{e};
        }
        return hole(s, scope, it->second);
      }
    }
    throw Failure{make_error(TypeError::Kind::ArityError, s.span)};
  }

  SkelNode check(const SurfaceTerm& s, const Scope& scope, const Ty& want) {
    using K = SurfaceTerm::Kind;
    switch (s.kind) {
      case K::Hole: {
        auto it = hole_ty_.find(s.name);
        if (it == hole_ty_.end()) {
          hole_ty_.emplace(s.name, want);
        } else if (!(it->second == want)) {
          TypeError e = make_error(TypeError::Kind::HoleTypeConflict, s.span);
          e.name = s.name;
          e.expected = it->second;
          e.actual = want;
          throw Failure{e};
        }
        return hole(s, scope, want);
      }
      case K::Lam: {
        if (!want.is_arrow()) break;
        if (!(s.annot == want.dom()))
          throw Failure{mismatch(s.span, want.dom(), s.annot, "in the annotation of '" + s.name + "'")};
        SkelNode body = check(s.children[0], bind(scope, s.name, s.annot), want.cod());
        SkelNode n = leaf(SkelNode::Kind::Lam, s, scope, want);
        n.name = s.name;
        n.binder_ty = s.annot;
        adopt(n, std::move(body));
        return n;
      }
      case K::App: {
        const SurfaceTerm& f = s.children[0];
        if (f.kind != K::Lam && f.kind != K::Hole) break;
        // The function's type is only known through its argument.
        SkelNode a = synth(s.children[1], scope);
        SkelNode fn = check(f, scope, Ty::arrow(a.ty, want));
        SkelNode n = leaf(SkelNode::Kind::App, s, scope, want);
        adopt(n, std::move(fn));
        adopt(n, std::move(a));
        return n;
      }
      case K::Let: {
        SkelNode bound = synth(s.children[0], scope);
        SkelNode body = check(s.children[1], bind(scope, s.name, bound.ty), want);
        return let_node(s, scope, std::move(bound), std::move(body));
      }
      default: break;
    }
    SkelNode n = synth(s, scope);
    if (!(n.ty == want)) throw Failure{mismatch(s.span, want, n.ty)};
    return n;
  }

  const std::map<std::string, Ty>& hole_types() const { return hole_ty_; }

 private:
  static SkelNode leaf(SkelNode::Kind k, const SurfaceTerm& s, const Scope& scope, Ty ty) {
    SkelNode n;
    n.kind = k;
    n.span = s.span;
    n.ty = std::move(ty);
    n.scope = scope;
    return n;
  }

  Scope bind(const Scope& scope, const std::string& name, const Ty& ty) {
    return scope.extended(name, ty, next_id_++);
  }

  // Attach a child and reconcile its holes with those already seen here.
  static void adopt(SkelNode& parent, SkelNode child) {
    for (const auto& [name, ctx] : child.holes) {
      auto it = parent.holes.find(name);
      if (it == parent.holes.end())
        parent.holes.emplace(name, ctx);
      else
        it->second = it->second.meet(ctx);
    }
    parent.children.push_back(std::move(child));
  }

  SkelNode hole(const SurfaceTerm& s, const Scope& scope, const Ty& ty) {
    SkelNode n = leaf(SkelNode::Kind::Hole, s, scope, ty);
    n.name = s.name;
    n.holes.emplace(s.name, HoleScope::of(scope));
    return n;
  }

  SkelNode let_node(const SurfaceTerm& s, const Scope& scope, SkelNode bound, SkelNode body) {
    SkelNode n = leaf(SkelNode::Kind::Let, s, scope, body.ty);
    n.name = s.name;
    n.binder_ty = bound.ty;
    adopt(n, std::move(bound));
    adopt(n, std::move(body));
    return n;
  }

  SkelNode variable(const SurfaceTerm& s, const Scope& scope) {
    if (auto i = scope.lookup(s.name)) {
      SkelNode n = leaf(SkelNode::Kind::Local, s, scope, scope.ctx.at_index(*i));
      n.index = *i;
      return n;
    }
    if (auto g = globals_.find(s.name); g != globals_.end()) {
      if (!g->second.store.empty()) {
        TypeError e = make_error(TypeError::Kind::HoleyDefinition, s.span);
        e.name = s.name;
        e.detail = "'" + s.name + "' still has " + std::to_string(g->second.store.size()) + " unfilled hole(s)";
        throw Failure{e};
      }
      SkelNode n = leaf(SkelNode::Kind::Global, s, scope, g->second.term.ty());
      n.name = s.name;
      return n;
    }
    TypeError e = make_error(TypeError::Kind::UnboundVariable, s.span);
    e.name = s.name;
    for (const auto& nm : scope.names)
      if (std::find(e.in_scope.begin(), e.in_scope.end(), nm) == e.in_scope.end()) e.in_scope.push_back(nm);
    throw Failure{e};
  }

  SkelNode prim_op(const SurfaceTerm& s, const Scope& scope) {
    const std::size_t arity = syntax::op_arity(s.op);
    if (s.children.size() != arity) {
      TypeError e = make_error(TypeError::Kind::ArityError, s.span);
      e.name = syntax::op_symbol(s.op);
      e.expected_arity = arity;
      e.got_arity = s.children.size();
      throw Failure{e};
    }
    const bool numeric = s.op == syntax::Op::Add || s.op == syntax::Op::Mul;
    const Ty operand = numeric ? Ty::nat() : Ty::boolean();
    SkelNode n = leaf(SkelNode::Kind::Prim, s, scope, operand);
    n.op = s.op;
    for (const SurfaceTerm& c : s.children) adopt(n, check(c, scope, operand));
    return n;
  }

  const Globals& globals_;
  std::map<std::string, Ty> hole_ty_;
  std::size_t next_id_;
};

}  // namespace detail

/// Pass 1. When `expected` is given the term is checked against it,
/// otherwise its type is synthesised.
inline DecInfo<TypeError, HoleySkeleton> collect_holes(const SurfaceTerm& s, const Scope& scope,
                                                       const Globals& globals = {},
                                                       const std::optional<Ty>& expected = std::nullopt) {
  std::size_t first_id = scope.ctx.size();
  for (std::size_t i = 0; i < scope.ctx.size(); ++i) first_id = std::max(first_id, scope.id_at(i) + 1);
  detail::Collector c(globals, {}, first_id);
  try {
    SkelNode root = expected ? c.check(s, scope, *expected) : c.synth(s, scope);
    HoleySkeleton sk;
    // First-span bookkeeping and binder names come from a left-to-right walk.
    std::vector<const SkelNode*> stack{&root};
    std::vector<const SkelNode*> order;
    while (!stack.empty()) {
      const SkelNode* n = stack.back();
      stack.pop_back();
      order.push_back(n);
      for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(&*it);
    }
    for (const SkelNode* n : order) {
      if (n->kind != SkelNode::Kind::Hole || sk.table.count(n->name)) continue;
      const Context& ctx = root.holes.at(n->name).ctx;
      HoleInfo info;
      info.ctx = ctx;
      info.names.assign(n->scope.names.begin(), n->scope.names.begin() + static_cast<std::ptrdiff_t>(ctx.size()));
      info.ty = c.hole_types().at(n->name);
      info.first_span = n->span;
      sk.table.emplace(n->name, std::move(info));
    }
    sk.root = std::move(root);
    return yes(std::move(sk));
  } catch (detail::Failure& f) {
    return no(std::move(f.error));
  }
}

// ---------------------------------------------------------------------------
// Pass 2

struct Elaborated {
  Term term;
  MetaStore store;
};

namespace detail {

class Emitter {
 public:
  Emitter(const HoleySkeleton& sk, const Globals& globals) : sk_(sk), globals_(globals) {}

  Term emit(const SkelNode& n) {
    using K = SkelNode::Kind;
    switch (n.kind) {
      case K::Local: return Term::var(n.index, n.ty);
      case K::Global: {
        const Term& closed = globals_.at(n.name).term;
        return rename(closed, prefix_thinning(Context{}, n.scope.ctx));
      }
      case K::NatLit: return Term::nat(n.nat);
      case K::BoolLit: return Term::boolean(n.boolean);
      case K::Lam: return Term::lam(n.binder_ty, emit(n.children[0]));
      case K::App: {
        Term f = emit(n.children[0]);
        Term a = emit(n.children[1]);
        const Ty dom = n.children[1].ty;
        return Term::call(Prim::app(dom, n.ty), {std::move(f), std::move(a)});
      }
      case K::Let: {
        Term bound = emit(n.children[0]);
        Term body = emit(n.children[1]);
        return Term::call(Prim::app(n.binder_ty, n.ty), {Term::lam(n.binder_ty, std::move(body)), std::move(bound)});
      }
      case K::Prim: {
        std::vector<Term> args;
        for (const SkelNode& c : n.children) args.push_back(emit(c));
        return Term::call(prim_of(n.op), std::move(args));
      }
      case K::Hole: {
        MetaRef ref;
        if (auto found = store_.find(n.name)) {
          ref = *found;
        } else {
          const HoleInfo& info = sk_.table.at(n.name);
          ref = store_.add(Meta{n.name, info.ctx, info.ty, info.names});
        }
        return Term::met(ref, prefix_thinning(store_[ref].ctx, n.scope.ctx), n.ty);
      }
    }
    throw VeloError("emit_core: unknown skeleton node");
  }

  MetaStore take_store() { return std::move(store_); }

 private:
  static Prim prim_of(syntax::Op op) {
    switch (op) {
      case syntax::Op::Add: return Prim::add();
      case syntax::Op::Mul: return Prim::mul();
      case syntax::Op::And: return Prim::and_();
      case syntax::Op::Or: return Prim::or_();
      case syntax::Op::Not: return Prim::not_();
    }
    return Prim::add();
  }

  const HoleySkeleton& sk_;
  const Globals& globals_;
  MetaStore store_;
};

}  // namespace detail

/// Pass 2. Metas are numbered in order of first occurrence.
inline Elaborated emit_core(const HoleySkeleton& sk, const Globals& globals = {}) {
  detail::Emitter e(sk, globals);
  Term t = e.emit(sk.root);
  return {std::move(t), e.take_store()};
}

/// Surface `App` becomes a PApp call, operators become their prims and
/// `let x = e in b` becomes `(\x => b) e`.
inline DecInfo<TypeError, Elaborated> elaborate(const SurfaceTerm& s, const Scope& scope = {},
                                                const Globals& globals = {},
                                                const std::optional<Ty>& expected = std::nullopt) {
  auto sk = collect_holes(s, scope, globals, expected);
  if (sk.is_no()) return no(std::move(sk).no());
  return yes(emit_core(sk.yes(), globals));
}

// ---------------------------------------------------------------------------
// Filling holes

namespace detail {

class Filler {
 public:
  Filler(MetaRef target, std::size_t inserted, Term replacement)
      : target_(target), inserted_(inserted), replacement_(std::move(replacement)) {}

  MetaRef remap(MetaRef r) const { return r < target_ ? r : r - 1 + inserted_; }

  Term go(const Term& t) const {
    if (!t.has_meta()) return t;
    switch (t.tag()) {
      case Term::Tag::Var: return t;
      case Term::Tag::Lam: return Term::lam(t.lam_param(), go(t.lam_body()));
      case Term::Tag::Call: {
        std::vector<Term> args;
        for (const Term& a : t.call_args()) args.push_back(go(a));
        return Term::call(t.call_prim(), std::move(args));
      }
      case Term::Tag::Met:
        if (t.met_ref() == target_) return rename(replacement_, t.met_embed());
        return Term::met(remap(t.met_ref()), t.met_embed(), t.ty());
    }
    return t;
  }

 private:
  MetaRef target_;
  std::size_t inserted_;
  Term replacement_;
};

inline Term shift_metas(const Term& t, MetaRef offset) {
  if (!t.has_meta() || offset == 0) return t;
  switch (t.tag()) {
    case Term::Tag::Var: return t;
    case Term::Tag::Lam: return Term::lam(t.lam_param(), shift_metas(t.lam_body(), offset));
    case Term::Tag::Call: {
      std::vector<Term> args;
      for (const Term& a : t.call_args()) args.push_back(shift_metas(a, offset));
      return Term::call(t.call_prim(), std::move(args));
    }
    case Term::Tag::Met: return Term::met(t.met_ref() + offset, t.met_embed(), t.ty());
  }
  return t;
}

}  // namespace detail

/// Replaces every occurrence of hole `name` in `t` by `replacement`, renamed
/// along each occurrence's embedding. `replacement` must live in the hole's
/// context with the hole's type; its own holes take the filled hole's place
/// in the store.
inline DecInfo<TypeError, Elaborated> fill_hole(const Term& t, const MetaStore& store, const std::string& name,
                                                const Elaborated& replacement, const Context& replacement_ctx) {
  auto ref = store.find(name);
  if (!ref) {
    TypeError e = detail::make_error(TypeError::Kind::UnknownHole, {});
    e.name = name;
    return no(std::move(e));
  }
  const Meta& meta = store[*ref];
  if (!(replacement_ctx == meta.ctx)) {
    TypeError e = detail::make_error(TypeError::Kind::Mismatch, {});
    e.name = name;
    e.detail = "replacement is not in the context of ?" + name;
    return no(std::move(e));
  }
  if (auto v = validate_term(replacement.term, meta.ctx, replacement.store); v.is_no()) {
    TypeError e = detail::make_error(TypeError::Kind::Mismatch, {});
    e.name = name;
    e.detail = "replacement is ill-formed: " + v.no().reason;
    return no(std::move(e));
  }
  const Ty got = infer_ty(replacement.term, meta.ctx, replacement.store);
  if (!(got == meta.ty)) {
    TypeError e = detail::mismatch({}, meta.ty, got, "filling ?" + name);
    e.name = name;
    return no(std::move(e));
  }
  for (const Meta& m : replacement.store.metas()) {
    if (store.find(m.name)) {
      TypeError e = detail::make_error(TypeError::Kind::DuplicateHole, {});
      e.name = m.name;
      return no(std::move(e));
    }
  }

  std::vector<Meta> metas;
  for (MetaRef i = 0; i < *ref; ++i) metas.push_back(store[i]);
  for (const Meta& m : replacement.store.metas()) metas.push_back(m);
  for (MetaRef i = *ref + 1; i < store.size(); ++i) metas.push_back(store[i]);

  const detail::Filler filler(*ref, replacement.store.size(), detail::shift_metas(replacement.term, *ref));
  return yes(Elaborated{filler.go(t), MetaStore(std::move(metas))});
}

}  // namespace velo::elab
