#pragma once

// Runtime validity checks for core terms. The well-scopedness and
// well-typedness witnesses are never stored; these functions recompute them.

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "velo/decide.hpp"
#include "velo/term.hpp"

namespace velo {

class IllFormed : public VeloError {
 public:
  using VeloError::VeloError;
};

struct VarProblem {
  enum class Kind { OutOfRange, TypeMismatch };
  Kind kind;
  std::optional<Ty> found;  // set for TypeMismatch
};

/// Yes iff `index` is below |ctx| and the entry that many steps from the
/// newest end has type `expected`.
inline DecInfo<VarProblem, Unit> validate_var(const Context& ctx, std::size_t index, const Ty& expected) {
  if (index >= ctx.size()) return no(VarProblem{VarProblem::Kind::OutOfRange, std::nullopt});
  const Ty& found = ctx.at_index(index);
  if (!(found == expected)) return no(VarProblem{VarProblem::Kind::TypeMismatch, found});
  return yes();
}

/// First invariant violation found in a pre-order walk.
struct Violation {
  Path path;
  std::string reason;
};

namespace detail {

class TermValidator {
 public:
  explicit TermValidator(const MetaStore& store) : store_(store) {}

  std::optional<std::string> check(const Term& t, Context& ctx) {
    switch (t.tag()) {
      case Term::Tag::Var: {
        auto v = validate_var(ctx, t.var_index(), t.ty());
        if (v) return std::nullopt;
        if (v.no().kind == VarProblem::Kind::OutOfRange)
          return "variable " + std::to_string(t.var_index()) + " out of range in a context of size " +
                 std::to_string(ctx.size());
        return "variable " + std::to_string(t.var_index()) + " recorded as " + to_string(t.ty()) +
               " but bound as " + to_string(*v.no().found);
      }
      case Term::Tag::Lam: {
        ctx.push(t.lam_param());
        path_.push_back(0);
        auto r = check(t.lam_body(), ctx);
        ctx.pop();
        if (r) return r;
        path_.pop_back();
        if (!(t.ty() == Ty::arrow(t.lam_param(), t.lam_body().ty()))) return "lambda type annotation is stale";
        return std::nullopt;
      }
      case Term::Tag::Call: {
        const Signature sig = prim_signature(t.call_prim());
        const auto& args = t.call_args();
        if (args.size() != sig.args.size())
          return std::string("prim ") + prim_name(t.call_prim().op()) + " expects " +
                 std::to_string(sig.args.size()) + " arguments, got " + std::to_string(args.size());
        for (std::size_t i = 0; i < args.size(); ++i) {
          path_.push_back(i);
          if (auto r = check(args[i], ctx)) return r;
          if (!(args[i].ty() == sig.args[i]))
            return std::string("argument of ") + prim_name(t.call_prim().op()) + " has type " +
                   to_string(args[i].ty()) + ", expected " + to_string(sig.args[i]);
          path_.pop_back();
        }
        if (!(t.ty() == sig.ret)) return "call type annotation is stale";
        return std::nullopt;
      }
      case Term::Tag::Met: {
        const MetaRef m = t.met_ref();
        if (m >= store_.size()) return "metavariable reference " + std::to_string(m) + " out of range";
        const Meta& meta = store_[m];
        const Thinning& th = t.met_embed();
        if (!(th.source() == meta.ctx)) return "embedding of ?" + meta.name + " does not start at its context";
        if (!(th.target() == ctx)) return "embedding of ?" + meta.name + " does not end at the ambient context";
        if (!(t.ty() == meta.ty)) return "occurrence of ?" + meta.name + " recorded with the wrong type";
        return std::nullopt;
      }
    }
    return "unknown node";
  }

  Path path_;

 private:
  const MetaStore& store_;
};

}  // namespace detail

/// Checks every term invariant; on failure reports the child-index path to
/// the first offending node.
inline DecInfo<Violation, Unit> validate_term(const Term& t, const Context& ctx = {},
                                              const MetaStore& store = {}) {
  detail::TermValidator v(store);
  Context scratch = ctx;
  if (auto reason = v.check(t, scratch)) return no(Violation{std::move(v.path_), std::move(*reason)});
  return yes();
}

/// Recomputes the type of `t` from scratch, ignoring cached annotations.
/// Throws IllFormed on hand-built terms that break the invariants.
inline Ty infer_ty(const Term& t, const Context& ctx = {}, const MetaStore& store = {}) {
  switch (t.tag()) {
    case Term::Tag::Var:
      if (t.var_index() >= ctx.size()) throw IllFormed("infer_ty: variable out of range");
      return ctx.at_index(t.var_index());
    case Term::Tag::Lam:
      return Ty::arrow(t.lam_param(), infer_ty(t.lam_body(), ctx.extended(t.lam_param()), store));
    case Term::Tag::Call: {
      const Signature sig = prim_signature(t.call_prim());
      const auto& args = t.call_args();
      if (args.size() != sig.args.size()) throw IllFormed("infer_ty: wrong number of arguments");
      for (std::size_t i = 0; i < args.size(); ++i)
        if (!(infer_ty(args[i], ctx, store) == sig.args[i])) throw IllFormed("infer_ty: argument type mismatch");
      return sig.ret;
    }
    case Term::Tag::Met: {
      if (t.met_ref() >= store.size()) throw IllFormed("infer_ty: dangling metavariable");
      const Meta& m = store[t.met_ref()];
      if (!(t.met_embed().source() == m.ctx) || !(t.met_embed().target() == ctx))
        throw IllFormed("infer_ty: metavariable embedding does not match its contexts");
      return m.ty;
    }
  }
  throw IllFormed("infer_ty: unknown node");
}

}  // namespace velo
