#pragma once

// Common-subexpression elimination.
//
// Repeated compound subterms are found by hashing and confirmed with
// term_eq. For each class, largest first, every occurrence is strengthened
// to the context of the lowest node containing all of them; the class is
// dropped if some occurrence uses a variable bound below that node. The node
// is then rewritten to
//
//     (\s : T => node[occurrences := s]) shared
//
// with the rest of the node weakened past the new binder.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "velo/decide.hpp"
#include "velo/equality.hpp"
#include "velo/print.hpp"
#include "velo/rename.hpp"
#include "velo/term.hpp"
#include "velo/thin.hpp"

namespace velo {

struct CseBinding {
  std::string shared;  // dump_core form at the binding site
  std::size_t occurrences;
};

struct CseSkip {
  std::string shared;
  std::size_t occurrences;
  std::string reason;
};

struct CseReport {
  std::vector<CseBinding> bindings;
  std::vector<CseSkip> skipped;
  std::size_t nodes_before = 0;
  std::size_t nodes_after = 0;
};

struct CseResult {
  Term term;
  CseReport report;
};

namespace detail {

struct Occurrence {
  Path path;
  Term term;
  std::size_t order;  // pre-order position, for leftmost-first tie breaks
};

struct OccurrenceClass {
  std::vector<Occurrence> occ;
  std::size_t size() const { return occ.front().term.size(); }
};

inline void collect_occurrences(const Term& t, Path& path, std::vector<Occurrence>& out, std::size_t& counter) {
  const std::size_t order = counter++;
  if (t.size() >= 2) out.push_back(Occurrence{path, t, order});
  switch (t.tag()) {
    case Term::Tag::Lam:
      path.push_back(0);
      collect_occurrences(t.lam_body(), path, out, counter);
      path.pop_back();
      break;
    case Term::Tag::Call:
      for (std::size_t i = 0; i < t.call_args().size(); ++i) {
        path.push_back(i);
        collect_occurrences(t.call_args()[i], path, out, counter);
        path.pop_back();
      }
      break;
    default: break;
  }
}

/// Classes with at least two members, largest first, then leftmost first.
inline std::vector<OccurrenceClass> repeated_classes(const Term& root) {
  std::vector<Occurrence> all;
  Path path;
  std::size_t counter = 0;
  collect_occurrences(root, path, all, counter);

  TermHasher hasher;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_hash;  // hash -> class indices
  std::vector<OccurrenceClass> classes;
  for (Occurrence& o : all) {
    auto& bucket = by_hash[hasher(o.term)];
    bool placed = false;
    for (std::size_t ci : bucket) {
      if (term_eq(classes[ci].occ.front().term, o.term)) {
        classes[ci].occ.push_back(std::move(o));
        placed = true;
        break;
      }
    }
    if (!placed) {
      bucket.push_back(classes.size());
      classes.push_back(OccurrenceClass{{std::move(o)}});
    }
  }
  std::vector<OccurrenceClass> repeated;
  for (auto& c : classes)
    if (c.occ.size() >= 2) repeated.push_back(std::move(c));
  std::stable_sort(repeated.begin(), repeated.end(), [](const OccurrenceClass& a, const OccurrenceClass& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.occ.front().order < b.occ.front().order;
  });
  return repeated;
}

inline bool is_prefix(const Path& p, const Path& q) {
  return p.size() <= q.size() && std::equal(p.begin(), p.end(), q.begin());
}

/// Context at `path` below `root`, whose own context is `ctx`.
inline Context context_at(const Term& root, const Path& path, Context ctx) {
  const Term* t = &root;
  for (std::size_t step : path) {
    if (t->tag() == Term::Tag::Lam) {
      ctx.push(t->lam_param());
      t = &t->lam_body();
    } else {
      t = &t->call_args()[step];
    }
  }
  return ctx;
}

inline const Term& node_at(const Term& root, const Path& path) {
  const Term* t = &root;
  for (std::size_t step : path) t = t->tag() == Term::Tag::Lam ? &t->lam_body() : &t->call_args()[step];
  return *t;
}

/// Rebuilds `root` with the node at `path` replaced by `replacement`.
inline Term replace_at(const Term& root, const Path& path, std::size_t i, const Term& replacement) {
  if (i == path.size()) return replacement;
  if (root.tag() == Term::Tag::Lam)
    return Term::lam(root.lam_param(), replace_at(root.lam_body(), path, i + 1, replacement));
  std::vector<Term> args = root.call_args();
  args[path[i]] = replace_at(args[path[i]], path, i + 1, replacement);
  return Term::call(root.call_prim(), std::move(args));
}

class Abstractor {
 public:
  Abstractor(const std::set<Path>& targets, Ty shared_ty) : targets_(targets), shared_ty_(std::move(shared_ty)) {}

  // `node` lives in Γ·Δ (|Δ| = depth); `th` embeds Γ·Δ into Γ·T·Δ.
  Term go(const Term& node, Path& rel, const Thinning& th, std::size_t depth) const {
    if (targets_.count(rel)) return Term::var(depth, shared_ty_);
    if (!contains_target(rel)) return rename(node, th);
    if (node.tag() == Term::Tag::Lam) {
      rel.push_back(0);
      Term body = go(node.lam_body(), rel, th.keep(node.lam_param()), depth + 1);
      rel.pop_back();
      return Term::lam(node.lam_param(), std::move(body));
    }
    std::vector<Term> args;
    for (std::size_t i = 0; i < node.call_args().size(); ++i) {
      rel.push_back(i);
      args.push_back(go(node.call_args()[i], rel, th, depth));
      rel.pop_back();
    }
    return Term::call(node.call_prim(), std::move(args));
  }

 private:
  bool contains_target(const Path& rel) const {
    auto it = targets_.lower_bound(rel);
    return it != targets_.end() && is_prefix(rel, *it);
  }

  const std::set<Path>& targets_;
  Ty shared_ty_;
};

}  // namespace detail

/// Shares repeated compound subterms of `t` (whose context is `ctx`).
/// Classes that mention holes, that cannot be strengthened to a common
/// binding site, or whose sharing would not shrink the term are skipped and
/// listed in the report.
inline CseResult cse(const Term& t, const MetaStore& store, const Context& ctx = {}) {
  CseResult result{t, {}};
  result.report.nodes_before = t.size();
  std::set<std::string> skipped_seen;
  auto skip = [&](const detail::OccurrenceClass& c, std::string reason) {
    std::string shown = dump_core(c.occ.front().term, store);
    if (skipped_seen.insert(shown).second)
      result.report.skipped.push_back(CseSkip{std::move(shown), c.occ.size(), std::move(reason)});
  };

  // Each applied binding restarts the search on the rewritten term.
  for (std::size_t round = 0; round <= t.size(); ++round) {
    Term& cur = result.term;
    bool applied = false;
    for (const detail::OccurrenceClass& c : detail::repeated_classes(cur)) {
      const std::size_t k = c.occ.size();
      const std::size_t m = c.size();
      if (c.occ.front().term.has_meta()) {
        skip(c, "mentions a hole");
        continue;
      }
      if ((k - 1) * (m - 1) < 2) {
        skip(c, "too small to pay for a binder");
        continue;
      }

      Path site = c.occ.front().path;
      for (const auto& o : c.occ) {
        std::size_t n = 0;
        while (n < site.size() && n < o.path.size() && site[n] == o.path[n]) ++n;
        site.resize(n);
      }
      const Context site_ctx = detail::context_at(cur, site, ctx);

      std::optional<Term> shared;
      std::string failure;
      for (const auto& o : c.occ) {
        const Context occ_ctx = detail::context_at(cur, o.path, ctx);
        auto s = strengthen(o.term, prefix_thinning(site_ctx, occ_ctx));
        if (s.is_no()) {
          failure = "uses a variable bound below the binding site";
          break;
        }
        if (!shared) {
          shared = std::move(s).yes();
        } else if (!term_eq(*shared, s.yes())) {
          failure = "occurrences denote different terms at the binding site";
          break;
        }
      }
      if (!failure.empty()) {
        skip(c, failure);
        continue;
      }

      const Ty shared_ty = shared->ty();
      std::set<Path> targets;
      for (const auto& o : c.occ) targets.insert(Path(o.path.begin() + static_cast<std::ptrdiff_t>(site.size()), o.path.end()));
      const Term& node = detail::node_at(cur, site);
      std::vector<bool> mask(site_ctx.size() + 1, true);
      mask.back() = false;
      const Thinning weaken(site_ctx, site_ctx.extended(shared_ty), std::move(mask));
      Path rel;
      Term body = detail::Abstractor(targets, shared_ty).go(node, rel, weaken, 0);
      Term binding = Term::call(Prim::app(shared_ty, node.ty()), {Term::lam(shared_ty, std::move(body)), *shared});

      result.report.bindings.push_back(CseBinding{dump_core(*shared, store), k});
      cur = detail::replace_at(cur, site, 0, binding);
      applied = true;
      break;
    }
    if (!applied) break;
  }
  result.report.nodes_after = result.term.size();
  return result;
}

}  // namespace velo
