#pragma once

#include <cstdint>
#include <unordered_map>

#include "velo/term.hpp"

namespace velo {

/// Observer for term_eq. The default does nothing; tests plug in a recorder
/// to check the order in which the comparison inspects nodes.
struct NoEqProbe {
  void tag_compare() {}
  void recurse() {}
};

/// Structural equality of two terms over the same context.
///
/// Head constructors are compared first. Pairs with different heads are
/// answered by the single catch-all below, so only same-constructor pairs
/// get a case of their own: the work is linear in the number of
/// constructors rather than quadratic.
template <class Probe>
bool term_eq(const Term& s, const Term& t, Probe& probe) {
  probe.tag_compare();
  if (s.tag() != t.tag()) return false;
  if (s.identity() == t.identity()) return true;
  switch (s.tag()) {
    case Term::Tag::Var:
      return s.var_index() == t.var_index() && s.ty() == t.ty();
    case Term::Tag::Lam:
      if (!(s.lam_param() == t.lam_param())) return false;
      probe.recurse();
      return term_eq(s.lam_body(), t.lam_body(), probe);
    case Term::Tag::Call: {
      if (!(s.call_prim() == t.call_prim())) return false;
      const auto& xs = s.call_args();
      const auto& ys = t.call_args();
      if (xs.size() != ys.size() || s.size() != t.size()) return false;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        probe.recurse();
        if (!term_eq(xs[i], ys[i], probe)) return false;
      }
      return true;
    }
    case Term::Tag::Met:
      return s.met_ref() == t.met_ref() && s.met_embed().mask() == t.met_embed().mask() && s.ty() == t.ty();
  }
  return false;
}

inline bool term_eq(const Term& s, const Term& t) {
  NoEqProbe probe;
  return term_eq(s, t, probe);
}

// ---------------------------------------------------------------------------
// Hashing

inline constexpr std::uint64_t kDefaultHashSeed = 0x5eed'7e1a'0c0d'e5a1ULL;

namespace detail {

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finaliser over the running state
  std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_ty(std::uint64_t h, const Ty& t) {
  h = mix(h, static_cast<std::uint64_t>(t.kind()) + 1);
  if (t.is_arrow()) {
    h = hash_ty(h, t.dom());
    h = hash_ty(h, t.cod());
  }
  return h;
}

inline std::uint64_t hash_nat(std::uint64_t h, const Nat& n) {
  const auto& be = n.backend();
  h = mix(h, be.size());
  for (std::size_t i = 0; i < be.size(); ++i) h = mix(h, static_cast<std::uint64_t>(be.limbs()[i]));
  return h;
}

inline std::uint64_t hash_prim(std::uint64_t h, const Prim& p) {
  h = mix(h, static_cast<std::uint64_t>(p.op()) + 101);
  switch (p.op()) {
    case Prim::Op::Nat: return hash_nat(h, p.nat_value());
    case Prim::Op::Bool: return mix(h, p.bool_value() ? 2 : 1);
    case Prim::Op::App: return hash_ty(hash_ty(h, p.app_dom()), p.app_cod());
    default: return h;
  }
}

}  // namespace detail

/// Structural hash with a per-node memo. The memo is keyed on node identity,
/// so a hasher must not outlive the terms it has seen.
class TermHasher {
 public:
  explicit TermHasher(std::uint64_t seed = kDefaultHashSeed) : seed_(seed) {}

  std::uint64_t operator()(const Term& t) {
    if (auto it = memo_.find(t.identity()); it != memo_.end()) return it->second;
    std::uint64_t h = detail::mix(seed_, static_cast<std::uint64_t>(t.tag()) + 17);
    switch (t.tag()) {
      case Term::Tag::Var:
        h = detail::mix(h, t.var_index());
        h = detail::hash_ty(h, t.ty());
        break;
      case Term::Tag::Lam:
        h = detail::hash_ty(h, t.lam_param());
        h = detail::mix(h, (*this)(t.lam_body()));
        break;
      case Term::Tag::Call:
        h = detail::hash_prim(h, t.call_prim());
        for (const Term& a : t.call_args()) h = detail::mix(h, (*this)(a));
        break;
      case Term::Tag::Met:
        h = detail::mix(h, t.met_ref());
        for (bool b : t.met_embed().mask()) h = detail::mix(h, b ? 3 : 5);
        h = detail::hash_ty(h, t.ty());
        break;
    }
    memo_.emplace(t.identity(), h);
    return h;
  }

 private:
  std::uint64_t seed_;
  std::unordered_map<const void*, std::uint64_t> memo_;
};

/// Structural 64-bit digest; term_eq(s, t) implies equal hashes.
inline std::uint64_t term_hash(const Term& t, std::uint64_t seed = kDefaultHashSeed) {
  TermHasher h(seed);
  return h(t);
}

}  // namespace velo
