#pragma once

// Thinnings: order-preserving embeddings of one context into another.
//
// The mask has one bit per target entry, oldest-first. A 1-bit marks the
// image of the next source entry; a 0-bit marks a target entry the source
// does not see.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "velo/ty.hpp"

namespace velo {

class ContextMismatch : public VeloError {
 public:
  using VeloError::VeloError;
};

class NotAPrefix : public VeloError {
 public:
  using VeloError::VeloError;
};

class OutOfRange : public VeloError {
 public:
  using VeloError::VeloError;
};

class Thinning {
 public:
  /// Throws ContextMismatch unless the 1-bits of `mask` select `source`
  /// out of `target`, in order.
  Thinning(Context source, Context target, std::vector<bool> mask)
      : source_(std::move(source)), target_(std::move(target)), mask_(std::move(mask)) {
    if (mask_.size() != target_.size())
      throw ContextMismatch("thinning mask length " + std::to_string(mask_.size()) +
                            " does not match target size " + std::to_string(target_.size()));
    std::size_t next = 0;
    for (std::size_t i = 0; i < mask_.size(); ++i) {
      if (!mask_[i]) continue;
      if (next >= source_.size() || !(source_[next] == target_[i]))
        throw ContextMismatch("thinning mask does not select the source context");
      ++next;
    }
    if (next != source_.size()) throw ContextMismatch("thinning mask selects too few entries");
  }

  const Context& source() const { return source_; }
  const Context& target() const { return target_; }
  const std::vector<bool>& mask() const { return mask_; }

  /// Mask as a bit-string, oldest-first, e.g. "110".
  std::string bits() const {
    std::string s;
    s.reserve(mask_.size());
    for (bool b : mask_) s.push_back(b ? '1' : '0');
    return s;
  }

  bool is_identity() const {
    return std::all_of(mask_.begin(), mask_.end(), [](bool b) { return b; });
  }

  /// Extend under a binder: both sides gain `t`, mapped to each other.
  Thinning keep(const Ty& t) const {
    Thinning r = *this;
    r.source_.push(t);
    r.target_.push(t);
    r.mask_.push_back(true);
    return r;
  }

  /// Extend the target only: the new entry is invisible to the source.
  Thinning drop(const Ty& t) const {
    Thinning r = *this;
    r.target_.push(t);
    r.mask_.push_back(false);
    return r;
  }

  friend bool operator==(const Thinning& a, const Thinning& b) {
    return a.mask_ == b.mask_ && a.source_ == b.source_ && a.target_ == b.target_;
  }

 private:
  Context source_;
  Context target_;
  std::vector<bool> mask_;
};

inline Thinning thin_id(const Context& ctx) {
  return Thinning(ctx, ctx, std::vector<bool>(ctx.size(), true));
}

/// Embeds f.source into g.target. Requires f.target == g.source.
inline Thinning thin_compose(const Thinning& f, const Thinning& g) {
  if (!(f.target() == g.source()))
    throw ContextMismatch("thin_compose: target of the first thinning is not the source of the second");
  std::vector<bool> mask;
  mask.reserve(g.mask().size());
  std::size_t next = 0;
  for (bool b : g.mask()) {
    if (b) {
      mask.push_back(f.mask()[next]);
      ++next;
    } else {
      mask.push_back(false);
    }
  }
  return Thinning(f.source(), g.target(), std::move(mask));
}

/// The embedding 1^|prefix| 0^(|full| - |prefix|).
inline Thinning prefix_thinning(const Context& prefix, const Context& full) {
  if (!prefix.is_prefix_of(full)) throw NotAPrefix("context is not a prefix of the target context");
  std::vector<bool> mask(full.size(), false);
  std::fill_n(mask.begin(), prefix.size(), true);
  return Thinning(prefix, full, std::move(mask));
}

/// Longest common prefix, oldest-first.
inline Context common_prefix(const Context& a, const Context& b) {
  std::size_t n = 0;
  const std::size_t limit = std::min(a.size(), b.size());
  while (n < limit && a[n] == b[n]) ++n;
  return a.prefix(n);
}

/// Transports a De Bruijn index of the source to the corresponding index of
/// the target.
inline std::size_t apply_thinning(const Thinning& th, std::size_t index) {
  const std::size_t src = th.source().size();
  if (index >= src)
    throw OutOfRange("apply_thinning: index " + std::to_string(index) + " outside a source of size " +
                     std::to_string(src));
  // Oldest-first position in the source, then find that 1-bit in the mask.
  std::size_t wanted = src - 1 - index;
  const auto& mask = th.mask();
  for (std::size_t p = 0; p < mask.size(); ++p) {
    if (!mask[p]) continue;
    if (wanted == 0) return mask.size() - 1 - p;
    --wanted;
  }
  throw OutOfRange("apply_thinning: malformed mask");  // unreachable for valid thinnings
}

/// Partial inverse of apply_thinning: the source index whose image is
/// `index`, if the target entry is in the image at all.
inline std::optional<std::size_t> thinning_preimage(const Thinning& th, std::size_t index) {
  const auto& mask = th.mask();
  if (index >= mask.size()) return std::nullopt;
  const std::size_t p = mask.size() - 1 - index;
  if (!mask[p]) return std::nullopt;
  std::size_t ones_after = 0;
  for (std::size_t q = p + 1; q < mask.size(); ++q) ones_after += mask[q] ? 1 : 0;
  return ones_after;
}

}  // namespace velo
