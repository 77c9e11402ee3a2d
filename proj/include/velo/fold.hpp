#pragma once

// Constant folding over the uniform Call representation. The traversal
// recurses into every node the same way and then consults one flat rule
// table at each Call; no rule needs to know how the others recurse.

#include <optional>
#include <span>
#include <vector>

#include "velo/term.hpp"

namespace velo {

namespace detail {

inline bool is_nat(const Term& t) { return t.tag() == Term::Tag::Call && t.call_prim().op() == Prim::Op::Nat; }
inline bool is_bool(const Term& t) { return t.tag() == Term::Tag::Call && t.call_prim().op() == Prim::Op::Bool; }
inline bool is_nat(const Term& t, int v) { return is_nat(t) && t.call_prim().nat_value() == v; }
inline bool is_bool(const Term& t, bool b) { return is_bool(t) && t.call_prim().bool_value() == b; }
inline bool is_call(const Term& t, Prim::Op op) { return t.tag() == Term::Tag::Call && t.call_prim().op() == op; }

}  // namespace detail

/// One rewrite: given an operator and its already-folded arguments, either
/// produce the replacement or decline.
struct FoldRule {
  const char* name;
  Prim::Op op;
  std::optional<Term> (*apply)(std::span<const Term> args);
};

/// The rule table, tried in order. Absorbing rules (x * 0, x && false,
/// x || true) only fire when the operand they discard contains no hole.
inline const std::vector<FoldRule>& fold_rules() {
  using detail::is_bool;
  using detail::is_nat;
  using Op = Prim::Op;
  using R = std::optional<Term>;
  static const std::vector<FoldRule> rules = {
      {"add-lit", Op::Add,
       [](std::span<const Term> a) -> R {
         if (is_nat(a[0]) && is_nat(a[1]))
           return Term::nat(a[0].call_prim().nat_value() + a[1].call_prim().nat_value());
         return std::nullopt;
       }},
      {"add-zero-left", Op::Add, [](std::span<const Term> a) -> R { return is_nat(a[0], 0) ? R(a[1]) : std::nullopt; }},
      {"add-zero-right", Op::Add, [](std::span<const Term> a) -> R { return is_nat(a[1], 0) ? R(a[0]) : std::nullopt; }},
      {"mul-lit", Op::Mul,
       [](std::span<const Term> a) -> R {
         if (is_nat(a[0]) && is_nat(a[1]))
           return Term::nat(a[0].call_prim().nat_value() * a[1].call_prim().nat_value());
         return std::nullopt;
       }},
      {"mul-zero-left", Op::Mul,
       [](std::span<const Term> a) -> R {
         return is_nat(a[0], 0) && !a[1].has_meta() ? R(Term::nat(0)) : std::nullopt;
       }},
      {"mul-zero-right", Op::Mul,
       [](std::span<const Term> a) -> R {
         return is_nat(a[1], 0) && !a[0].has_meta() ? R(Term::nat(0)) : std::nullopt;
       }},
      {"mul-one-left", Op::Mul, [](std::span<const Term> a) -> R { return is_nat(a[0], 1) ? R(a[1]) : std::nullopt; }},
      {"mul-one-right", Op::Mul, [](std::span<const Term> a) -> R { return is_nat(a[1], 1) ? R(a[0]) : std::nullopt; }},
      {"and-true-left", Op::And, [](std::span<const Term> a) -> R { return is_bool(a[0], true) ? R(a[1]) : std::nullopt; }},
      {"and-true-right", Op::And, [](std::span<const Term> a) -> R { return is_bool(a[1], true) ? R(a[0]) : std::nullopt; }},
      {"and-false-left", Op::And,
       [](std::span<const Term> a) -> R {
         return is_bool(a[0], false) && !a[1].has_meta() ? R(Term::boolean(false)) : std::nullopt;
       }},
      {"and-false-right", Op::And,
       [](std::span<const Term> a) -> R {
         return is_bool(a[1], false) && !a[0].has_meta() ? R(Term::boolean(false)) : std::nullopt;
       }},
      {"or-false-left", Op::Or, [](std::span<const Term> a) -> R { return is_bool(a[0], false) ? R(a[1]) : std::nullopt; }},
      {"or-false-right", Op::Or, [](std::span<const Term> a) -> R { return is_bool(a[1], false) ? R(a[0]) : std::nullopt; }},
      {"or-true-left", Op::Or,
       [](std::span<const Term> a) -> R {
         return is_bool(a[0], true) && !a[1].has_meta() ? R(Term::boolean(true)) : std::nullopt;
       }},
      {"or-true-right", Op::Or,
       [](std::span<const Term> a) -> R {
         return is_bool(a[1], true) && !a[0].has_meta() ? R(Term::boolean(true)) : std::nullopt;
       }},
      {"not-lit", Op::Not,
       [](std::span<const Term> a) -> R {
         return is_bool(a[0]) ? R(Term::boolean(!a[0].call_prim().bool_value())) : std::nullopt;
       }},
      {"not-not", Op::Not,
       [](std::span<const Term> a) -> R {
         return detail::is_call(a[0], Op::Not) ? R(a[0].call_args()[0]) : std::nullopt;
       }},
  };
  return rules;
}

/// First matching rule for `p` applied to already-folded `args`, or nullopt
/// when nothing applies. Application is never reduced here.
inline std::optional<Term> fold_prim(const Prim& p, std::span<const Term> args) {
  for (const FoldRule& r : fold_rules()) {
    if (r.op != p.op()) continue;
    if (auto out = r.apply(args)) return out;
  }
  return std::nullopt;
}

inline Term constant_fold(const Term& t) {
  switch (t.tag()) {
    case Term::Tag::Var:
    case Term::Tag::Met: return t;
    case Term::Tag::Lam: return Term::lam(t.lam_param(), constant_fold(t.lam_body()));
    case Term::Tag::Call: {
      std::vector<Term> args;
      args.reserve(t.call_args().size());
      for (const Term& a : t.call_args()) args.push_back(constant_fold(a));
      if (auto r = fold_prim(t.call_prim(), args)) return *r;
      return Term::call(t.call_prim(), std::move(args));
    }
  }
  return t;
}

}  // namespace velo
