#pragma once

// Evidence-carrying decisions. A DecInfo<E, P> is either Yes with positive
// evidence P, or No with evidence E explaining the failure. Neither side is a
// bare boolean; both payloads are plain data that can be re-checked.

#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "velo/ty.hpp"

namespace velo {

struct Unit {
  friend bool operator==(Unit, Unit) { return true; }
};

template <class P>
struct Yes {
  P evidence;
};

template <class E>
struct No {
  E evidence;
};

template <class P>
Yes<std::decay_t<P>> yes(P&& p) {
  return {std::forward<P>(p)};
}
inline Yes<Unit> yes() { return {Unit{}}; }

template <class E>
No<std::decay_t<E>> no(E&& e) {
  return {std::forward<E>(e)};
}

template <class E, class P>
class DecInfo {
 public:
  using no_type = E;
  using yes_type = P;

  DecInfo(Yes<P> y) : v_(std::in_place_index<1>, std::move(y)) {}
  DecInfo(No<E> n) : v_(std::in_place_index<0>, std::move(n)) {}

  bool is_yes() const { return v_.index() == 1; }
  bool is_no() const { return v_.index() == 0; }
  explicit operator bool() const { return is_yes(); }

  const P& yes() const& { return std::get<1>(v_).evidence; }
  P& yes() & { return std::get<1>(v_).evidence; }
  P&& yes() && { return std::move(std::get<1>(v_).evidence); }

  const E& no() const& { return std::get<0>(v_).evidence; }
  E& no() & { return std::get<0>(v_).evidence; }
  E&& no() && { return std::move(std::get<0>(v_).evidence); }

 private:
  std::variant<No<E>, Yes<P>> v_;
};

// ---------------------------------------------------------------------------
// Order on naturals.

/// x <= y, witnessed by x + diff = y.
struct LteEvidence {
  Nat x, y, diff;
  bool check() const { return diff >= 0 && x + diff == y; }
};

/// x > y, witnessed by y + diff = x with diff positive.
struct GtEvidence {
  Nat x, y, diff;
  bool check() const { return diff > 0 && y + diff == x; }
};

inline DecInfo<LteEvidence, GtEvidence> is_gt(const Nat& x, const Nat& y) {
  if (x > y) return yes(GtEvidence{x, y, x - y});
  return no(LteEvidence{x, y, y - x});
}

// ---------------------------------------------------------------------------
// Searches over sequences.

template <class P>
struct AnyWitness {
  std::size_t index;
  P evidence;
};

/// One piece of negative evidence per element, in order. Empty iff the input
/// was empty.
template <class E>
using AllCounter = std::vector<E>;

template <class E>
struct FirstFailure {
  std::size_t index;
  E evidence;
};

template <class P>
using AllWitness = std::vector<P>;

namespace detail {
template <class Pred, class Range>
using decision_t = std::decay_t<std::invoke_result_t<Pred&, decltype(*std::begin(std::declval<Range&>()))>>;
}

/// Leftmost element satisfying `pred`, or the per-element reasons none did.
template <class Pred, class Range>
auto decide_any(Pred&& pred, const Range& xs)
    -> DecInfo<AllCounter<typename detail::decision_t<Pred, const Range>::no_type>,
               AnyWitness<typename detail::decision_t<Pred, const Range>::yes_type>> {
  using D = detail::decision_t<Pred, const Range>;
  AllCounter<typename D::no_type> counter;
  std::size_t i = 0;
  for (const auto& x : xs) {
    auto d = pred(x);
    if (d.is_yes()) {
      return yes(AnyWitness<typename D::yes_type>{i, std::move(d).yes()});
    }
    counter.push_back(std::move(d).no());
    ++i;
  }
  return no(std::move(counter));
}

/// Evidence for every element, or the first element that fails.
template <class Pred, class Range>
auto decide_all(Pred&& pred, const Range& xs)
    -> DecInfo<FirstFailure<typename detail::decision_t<Pred, const Range>::no_type>,
               AllWitness<typename detail::decision_t<Pred, const Range>::yes_type>> {
  using D = detail::decision_t<Pred, const Range>;
  AllWitness<typename D::yes_type> witness;
  std::size_t i = 0;
  for (const auto& x : xs) {
    auto d = pred(x);
    if (d.is_no()) {
      return no(FirstFailure<typename D::no_type>{i, std::move(d).no()});
    }
    witness.push_back(std::move(d).yes());
    ++i;
  }
  return yes(std::move(witness));
}

// ---------------------------------------------------------------------------
// Type equality.

/// Where two types first disagree: child path (0 = domain, 1 = codomain)
/// and the two differing subterms.
struct TyMismatch {
  std::vector<std::size_t> path;
  Ty left;
  Ty right;
};

inline DecInfo<TyMismatch, Unit> ty_eq(const Ty& a, const Ty& b) {
  std::vector<std::size_t> path;
  const Ty* l = &a;
  const Ty* r = &b;
  // Walk the arrow spine; dom mismatches are found by recursion.
  while (true) {
    if (l->kind() != r->kind()) return no(TyMismatch{path, *l, *r});
    if (!l->is_arrow()) return yes();
    auto dom = ty_eq(l->dom(), r->dom());
    if (dom.is_no()) {
      TyMismatch m = std::move(dom).no();
      path.push_back(0);
      path.insert(path.end(), m.path.begin(), m.path.end());
      m.path = std::move(path);
      return no(std::move(m));
    }
    path.push_back(1);
    l = &l->cod();
    r = &r->cod();
  }
}

using Path = std::vector<std::size_t>;

inline std::string path_string(const Path& path) {
  std::string out = "[";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(path[i]);
  }
  return out + "]";
}

}  // namespace velo
