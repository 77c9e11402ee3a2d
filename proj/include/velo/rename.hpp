#pragma once

// Moving terms along thinnings: rename (weakening) and its partial inverse
// strengthen.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "velo/decide.hpp"
#include "velo/term.hpp"
#include "velo/thin.hpp"

namespace velo {

/// Transports `t` from th.source to th.target. Metavariable embeddings are
/// post-composed with the thinning.
inline Term rename(const Term& t, const Thinning& th) {
  if (th.is_identity()) return t;
  switch (t.tag()) {
    case Term::Tag::Var:
      return Term::var(apply_thinning(th, t.var_index()), t.ty());
    case Term::Tag::Lam:
      return Term::lam(t.lam_param(), rename(t.lam_body(), th.keep(t.lam_param())));
    case Term::Tag::Call: {
      std::vector<Term> args;
      args.reserve(t.call_args().size());
      for (const Term& a : t.call_args()) args.push_back(rename(a, th));
      return Term::call(t.call_prim(), std::move(args));
    }
    case Term::Tag::Met:
      return Term::met(t.met_ref(), thin_compose(t.met_embed(), th), t.ty());
  }
  return t;
}

/// Free variables of the term (as indices into th.target) that the thinning
/// does not cover, in increasing order.
struct StrengthenFailure {
  std::vector<std::size_t> indices;
};

namespace detail {

class Strengthener {
 public:
  std::set<std::size_t> offending;

  // `th` is the caller's thinning extended under `depth` binders.
  std::optional<Term> go(const Term& t, const Thinning& th, std::size_t depth) {
    switch (t.tag()) {
      case Term::Tag::Var: {
        const std::size_t i = t.var_index();
        if (i < depth) return Term::var(i, t.ty());
        auto pre = thinning_preimage(th, i);
        if (!pre) {
          offending.insert(i - depth);
          return std::nullopt;
        }
        return Term::var(*pre, t.ty());
      }
      case Term::Tag::Lam: {
        auto body = go(t.lam_body(), th.keep(t.lam_param()), depth + 1);
        if (!body) return std::nullopt;
        return Term::lam(t.lam_param(), std::move(*body));
      }
      case Term::Tag::Call: {
        std::vector<Term> args;
        bool ok = true;
        for (const Term& a : t.call_args()) {
          auto r = go(a, th, depth);
          if (r)
            args.push_back(std::move(*r));
          else
            ok = false;  // keep scanning to report every offender
        }
        if (!ok) return std::nullopt;
        return Term::call(t.call_prim(), std::move(args));
      }
      case Term::Tag::Met: {
        const Thinning& e = t.met_embed();
        const auto& outer = th.mask();
        const auto& inner = e.mask();
        if (inner.size() != outer.size())
          throw ContextMismatch("strengthen: metavariable embedding does not end at the term's context");
        std::vector<bool> mask;
        bool ok = true;
        for (std::size_t p = 0; p < outer.size(); ++p) {
          if (outer[p]) {
            mask.push_back(inner[p]);
          } else if (inner[p]) {
            offending.insert(outer.size() - 1 - p - depth);
            ok = false;
          }
        }
        if (!ok) return std::nullopt;
        return Term::met(t.met_ref(), Thinning(e.source(), th.source(), std::move(mask)), t.ty());
      }
    }
    return std::nullopt;
  }
};

}  // namespace detail

/// Finds s with rename(s, th) == t, or reports the free variables of t that
/// fall outside the image of th.
inline DecInfo<StrengthenFailure, Term> strengthen(const Term& t, const Thinning& th) {
  detail::Strengthener s;
  auto r = s.go(t, th, 0);
  if (r) return yes(std::move(*r));
  return no(StrengthenFailure{std::vector<std::size_t>(s.offending.begin(), s.offending.end())});
}

}  // namespace velo
