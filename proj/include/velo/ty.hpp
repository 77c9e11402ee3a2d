#pragma once

#include <cstddef>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace velo {

/// Unbounded natural number used for Nat literals and evidence.
using Nat = boost::multiprecision::cpp_int;

/// Base class for precondition violations raised by the library.
class VeloError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Object-language type: Nat, Bool or an arrow. Immutable, cheap to copy.
class Ty {
 public:
  enum class Kind : unsigned char { Nat, Bool, Arr };

  static Ty nat() { return Ty(Kind::Nat, nullptr, nullptr); }
  static Ty boolean() { return Ty(Kind::Bool, nullptr, nullptr); }
  static Ty arrow(Ty dom, Ty cod) {
    return Ty(Kind::Arr, std::make_shared<const Ty>(std::move(dom)),
              std::make_shared<const Ty>(std::move(cod)));
  }

  Ty() : Ty(Kind::Nat, nullptr, nullptr) {}

  Kind kind() const { return kind_; }
  bool is_arrow() const { return kind_ == Kind::Arr; }

  const Ty& dom() const {
    if (!dom_) throw VeloError("dom() of a non-arrow type");
    return *dom_;
  }
  const Ty& cod() const {
    if (!cod_) throw VeloError("cod() of a non-arrow type");
    return *cod_;
  }

  friend bool operator==(const Ty& a, const Ty& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ != Kind::Arr) return true;
    if (a.dom_ == b.dom_ && a.cod_ == b.cod_) return true;
    return *a.dom_ == *b.dom_ && *a.cod_ == *b.cod_;
  }

  std::size_t size() const {
    return kind_ == Kind::Arr ? 1 + dom_->size() + cod_->size() : 1;
  }

 private:
  Ty(Kind k, std::shared_ptr<const Ty> d, std::shared_ptr<const Ty> c)
      : kind_(k), dom_(std::move(d)), cod_(std::move(c)) {}

  Kind kind_;
  std::shared_ptr<const Ty> dom_;
  std::shared_ptr<const Ty> cod_;
};

/// Surface rendering: `Nat`, `Bool`, `Nat -> Bool`; arrows associate right.
inline void print_ty(std::ostream& os, const Ty& t, bool parens_on_arrow = false) {
  switch (t.kind()) {
    case Ty::Kind::Nat: os << "Nat"; return;
    case Ty::Kind::Bool: os << "Bool"; return;
    case Ty::Kind::Arr:
      if (parens_on_arrow) os << '(';
      print_ty(os, t.dom(), true);
      os << " -> ";
      print_ty(os, t.cod(), false);
      if (parens_on_arrow) os << ')';
      return;
  }
}

inline std::string to_string(const Ty& t) {
  std::ostringstream os;
  print_ty(os, t);
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const Ty& t) {
  print_ty(os, t);
  return os;
}

/// Typing context in snoc order: entries oldest-first, newest binding last.
/// De Bruijn index 0 names the newest entry.
class Context {
 public:
  Context() = default;
  Context(std::initializer_list<Ty> tys) : entries_(tys) {}
  explicit Context(std::vector<Ty> tys) : entries_(std::move(tys)) {}

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Entry by position, oldest-first.
  const Ty& operator[](std::size_t pos) const { return entries_[pos]; }

  /// Entry by De Bruijn index (0 = newest). Caller checks the range.
  const Ty& at_index(std::size_t index) const {
    return entries_[entries_.size() - 1 - index];
  }

  Context extended(Ty t) const {
    Context c = *this;
    c.entries_.push_back(std::move(t));
    return c;
  }

  void push(Ty t) { entries_.push_back(std::move(t)); }
  void pop() { entries_.pop_back(); }

  /// The oldest `n` entries.
  Context prefix(std::size_t n) const {
    return Context(std::vector<Ty>(entries_.begin(), entries_.begin() + static_cast<std::ptrdiff_t>(n)));
  }

  bool is_prefix_of(const Context& other) const {
    if (size() > other.size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
      if (!(entries_[i] == other.entries_[i])) return false;
    return true;
  }

  const std::vector<Ty>& entries() const { return entries_; }

  friend bool operator==(const Context& a, const Context& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<Ty> entries_;
};

inline std::ostream& operator<<(std::ostream& os, const Context& c) {
  os << "[";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) os << ", ";
    os << c[i];
  }
  return os << "]";
}

}  // namespace velo
