#pragma once

// Call-by-value small-step evaluation, shaped like the progress theorem:
// a closed well-typed term is a value, is blocked on a hole, or steps.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "velo/decide.hpp"
#include "velo/rename.hpp"
#include "velo/term.hpp"
#include "velo/thin.hpp"

namespace velo {

class IllTyped : public VeloError {
 public:
  using VeloError::VeloError;
};

/// Lambdas and literals.
inline bool is_value(const Term& t) {
  return t.tag() == Term::Tag::Lam || t.is_literal();
}

namespace detail {

class Substituter {
 public:
  Substituter(const Context& ctx, const Term& arg) : outer_(ctx), arg_(arg) {}

  // `t` lives in ctx·A·Δ where Δ = scope_ minus ctx.
  Term go(const Term& t, Context& scope, std::size_t depth) const {
    switch (t.tag()) {
      case Term::Tag::Var: {
        const std::size_t i = t.var_index();
        if (i < depth) return t;
        if (i > depth) return Term::var(i - 1, t.ty());
        return depth == 0 ? arg_ : rename(arg_, prefix_thinning(outer_, scope));
      }
      case Term::Tag::Lam: {
        scope.push(t.lam_param());
        Term body = go(t.lam_body(), scope, depth + 1);
        scope.pop();
        return Term::lam(t.lam_param(), std::move(body));
      }
      case Term::Tag::Call: {
        if (t.call_args().empty()) return t;
        std::vector<Term> args;
        args.reserve(t.call_args().size());
        for (const Term& a : t.call_args()) args.push_back(go(a, scope, depth));
        return Term::call(t.call_prim(), std::move(args));
      }
      case Term::Tag::Met: {
        const Thinning& e = t.met_embed();
        const std::size_t pos = outer_.size();
        if (e.mask().size() != scope.size() + 1)
          throw IllTyped("subst_top: metavariable embedding does not match its context");
        if (e.mask()[pos]) throw IllTyped("subst_top: metavariable depends on the substituted variable");
        std::vector<bool> mask = e.mask();
        mask.erase(mask.begin() + static_cast<std::ptrdiff_t>(pos));
        return Term::met(t.met_ref(), Thinning(e.source(), scope, std::move(mask)), t.ty());
      }
    }
    return t;
  }

 private:
  const Context& outer_;
  const Term& arg_;
};

/// A Met node in `body` that can see the variable about to be substituted.
inline std::optional<Path> capturing_meta(const Term& body, std::size_t outer_size, Path& path) {
  if (!body.has_meta()) return std::nullopt;
  switch (body.tag()) {
    case Term::Tag::Met:
      if (body.met_embed().mask().at(outer_size)) return path;
      return std::nullopt;
    case Term::Tag::Lam: {
      path.push_back(0);
      auto r = capturing_meta(body.lam_body(), outer_size, path);
      path.pop_back();
      return r;
    }
    case Term::Tag::Call:
      for (std::size_t i = 0; i < body.call_args().size(); ++i) {
        path.push_back(i);
        auto r = capturing_meta(body.call_args()[i], outer_size, path);
        path.pop_back();
        if (r) return r;
      }
      return std::nullopt;
    default: return std::nullopt;
  }
}

}  // namespace detail

/// body[0 := arg], for `body` in ctx·A and `arg` in ctx. Every hole in
/// `body` must be blind to the substituted variable.
inline Term subst_top(const Term& body, const Term& arg, const Context& ctx = {}) {
  Context scope = ctx;
  return detail::Substituter(ctx, arg).go(body, scope, 0);
}

struct StepResult {
  enum class Kind { IsValue, Blocked, Stepped };

  Kind kind;
  Term term;         // the value, the unchanged blocked term, or the successor
  MetaRef meta = 0;  // Blocked
  Path path;         // Blocked: where the blocking hole sits
  std::string rule;  // Stepped: beta, delta-*, cong-arg(i)

  static StepResult value(Term t) { return {Kind::IsValue, std::move(t), 0, {}, {}}; }
  static StepResult blocked(Term t, MetaRef m, Path p) { return {Kind::Blocked, std::move(t), m, std::move(p), {}}; }
  static StepResult stepped(Term t, std::string rule) { return {Kind::Stepped, std::move(t), 0, {}, std::move(rule)}; }
};

namespace detail {

inline StepResult step_at(const Term& t, Path& path) {
  switch (t.tag()) {
    case Term::Tag::Var: throw IllTyped("step: free variable in a closed term");
    case Term::Tag::Lam: return StepResult::value(t);
    case Term::Tag::Met: return StepResult::blocked(t, t.met_ref(), path);
    case Term::Tag::Call: break;
  }
  if (t.is_literal()) return StepResult::value(t);

  const auto& args = t.call_args();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (is_value(args[i])) continue;
    path.push_back(i);
    StepResult r = step_at(args[i], path);
    path.pop_back();
    if (r.kind == StepResult::Kind::Blocked) {
      r.term = t;
      return r;
    }
    std::vector<Term> next = args;
    next[i] = std::move(r.term);
    return StepResult::stepped(Term::call(t.call_prim(), std::move(next)), "cong-arg(" + std::to_string(i) + ")");
  }

  auto nat = [&](std::size_t i) -> const Nat& { return args.at(i).call_prim().nat_value(); };
  auto boolean = [&](std::size_t i) { return args.at(i).call_prim().bool_value(); };
  auto stepped = &StepResult::stepped;
  switch (t.call_prim().op()) {
    case Prim::Op::Add: return stepped(Term::nat(nat(0) + nat(1)), "delta-add");
    case Prim::Op::Mul: return stepped(Term::nat(nat(0) * nat(1)), "delta-mul");
    case Prim::Op::And: return stepped(Term::boolean(boolean(0) && boolean(1)), "delta-and");
    case Prim::Op::Or: return stepped(Term::boolean(boolean(0) || boolean(1)), "delta-or");
    case Prim::Op::Not: return stepped(Term::boolean(!boolean(0)), "delta-not");
    case Prim::Op::App: {
      const Term& f = args.at(0);
      if (f.tag() != Term::Tag::Lam) throw IllTyped("step: applying a non-function value");
      // A hole that sees the parameter cannot absorb the argument.
      Path inner = path;
      inner.push_back(0);
      inner.push_back(0);
      if (auto p = capturing_meta(f.lam_body(), 0, inner)) {
        const Term* m = &f.lam_body();
        for (std::size_t k = path.size() + 2; k < p->size(); ++k)
          m = m->tag() == Term::Tag::Lam ? &m->lam_body() : &m->call_args()[(*p)[k]];
        return StepResult::blocked(t, m->met_ref(), *p);
      }
      return stepped(subst_top(f.lam_body(), args.at(1)), "beta");
    }
    default: break;
  }
  throw IllTyped("step: literal with arguments");
}

}  // namespace detail

/// One step of a closed term. Throws IllTyped only when the term breaks the
/// typing invariants.
inline StepResult step(const Term& t) {
  Path path;
  return detail::step_at(t, path);
}

struct EvalResult {
  enum class Kind { Final, BlockedOn, OutOfFuel };

  Kind kind;
  Term term;  // value, or the term at the point evaluation stopped
  std::size_t steps = 0;
  MetaRef meta = 0;  // BlockedOn
  Path path;         // BlockedOn

  static EvalResult done(Kind k, Term t, std::size_t n) { return {k, std::move(t), n, 0, {}}; }
};

inline constexpr std::size_t kDefaultFuel = 1'000'000;

inline EvalResult evaluate(const Term& t, std::size_t fuel = kDefaultFuel) {
  Term cur = t;
  for (std::size_t n = 0;; ++n) {
    if (n == fuel) {
      if (is_value(cur)) return EvalResult::done(EvalResult::Kind::Final, cur, n);
      return EvalResult::done(EvalResult::Kind::OutOfFuel, cur, n);
    }
    StepResult r = step(cur);
    switch (r.kind) {
      case StepResult::Kind::IsValue: return EvalResult::done(EvalResult::Kind::Final, std::move(r.term), n);
      case StepResult::Kind::Blocked: return {EvalResult::Kind::BlockedOn, std::move(cur), n, r.meta, std::move(r.path)};
      case StepResult::Kind::Stepped: cur = std::move(r.term); break;
    }
  }
}

}  // namespace velo
