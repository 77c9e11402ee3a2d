#pragma once

// Core IR. A term is one of four shapes: a De Bruijn variable, a lambda, a
// call of a primitive on a list of subterms, or an occurrence of a
// metavariable (hole) together with the thinning that embeds the hole's own
// context into the occurrence context.
//
// Every builtin operation, including literals and function application, is
// a Prim, so structural traversals only ever recurse in one place.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "velo/thin.hpp"
#include "velo/ty.hpp"

namespace velo {

class Prim {
 public:
  enum class Op : unsigned char { Nat, Bool, Add, Mul, And, Or, Not, App };

  static Prim nat(Nat v) {
    Prim p(Op::Nat);
    p.nat_ = std::move(v);
    return p;
  }
  static Prim boolean(bool b) {
    Prim p(Op::Bool);
    p.bool_ = b;
    return p;
  }
  static Prim add() { return Prim(Op::Add); }
  static Prim mul() { return Prim(Op::Mul); }
  static Prim and_() { return Prim(Op::And); }
  static Prim or_() { return Prim(Op::Or); }
  static Prim not_() { return Prim(Op::Not); }
  static Prim app(Ty dom, Ty cod) {
    Prim p(Op::App);
    p.dom_ = std::move(dom);
    p.cod_ = std::move(cod);
    return p;
  }

  Op op() const { return op_; }
  bool is_literal() const { return op_ == Op::Nat || op_ == Op::Bool; }
  const Nat& nat_value() const { return nat_; }
  bool bool_value() const { return bool_; }
  const Ty& app_dom() const { return dom_; }
  const Ty& app_cod() const { return cod_; }

  friend bool operator==(const Prim& a, const Prim& b) {
    if (a.op_ != b.op_) return false;
    switch (a.op_) {
      case Op::Nat: return a.nat_ == b.nat_;
      case Op::Bool: return a.bool_ == b.bool_;
      case Op::App: return a.dom_ == b.dom_ && a.cod_ == b.cod_;
      default: return true;
    }
  }

 private:
  explicit Prim(Op op) : op_(op) {}

  Op op_;
  Nat nat_ = 0;
  bool bool_ = false;
  Ty dom_;
  Ty cod_;
};

inline const char* prim_name(Prim::Op op) {
  switch (op) {
    case Prim::Op::Nat: return "nat";
    case Prim::Op::Bool: return "bool";
    case Prim::Op::Add: return "add";
    case Prim::Op::Mul: return "mul";
    case Prim::Op::And: return "and";
    case Prim::Op::Or: return "or";
    case Prim::Op::Not: return "not";
    case Prim::Op::App: return "app";
  }
  return "?";
}

struct Signature {
  std::vector<Ty> args;
  Ty ret;
};

inline Signature prim_signature(const Prim& p) {
  const Ty n = Ty::nat();
  const Ty b = Ty::boolean();
  switch (p.op()) {
    case Prim::Op::Nat: return {{}, n};
    case Prim::Op::Bool: return {{}, b};
    case Prim::Op::Add:
    case Prim::Op::Mul: return {{n, n}, n};
    case Prim::Op::And:
    case Prim::Op::Or: return {{b, b}, b};
    case Prim::Op::Not: return {{b}, b};
    case Prim::Op::App: return {{Ty::arrow(p.app_dom(), p.app_cod()), p.app_dom()}, p.app_cod()};
  }
  return {{}, n};
}

inline Ty prim_result(const Prim& p) {
  switch (p.op()) {
    case Prim::Op::Nat:
    case Prim::Op::Add:
    case Prim::Op::Mul: return Ty::nat();
    case Prim::Op::App: return p.app_cod();
    default: return Ty::boolean();
  }
}

inline std::size_t prim_arity(const Prim& p) {
  switch (p.op()) {
    case Prim::Op::Nat:
    case Prim::Op::Bool: return 0;
    case Prim::Op::Not: return 1;
    default: return 2;
  }
}

using MetaRef = std::size_t;

class Term {
 public:
  enum class Tag : unsigned char { Var, Lam, Call, Met };

  struct VarData {
    std::size_t index;
  };
  struct LamData;
  struct CallData;
  struct MetData;

  /// `ty` is the variable's type as recorded at construction.
  static Term var(std::size_t index, Ty ty);
  static Term lam(Ty param, Term body);
  static Term call(Prim prim, std::vector<Term> args);
  static Term met(MetaRef meta, Thinning embed, Ty ty);

  static Term nat(Nat v) { return call(Prim::nat(std::move(v)), {}); }
  static Term boolean(bool b) { return call(Prim::boolean(b), {}); }

  Tag tag() const;
  /// Cached type; validate_term checks it against recomputation.
  const Ty& ty() const;
  /// Node count.
  std::size_t size() const;
  /// True if a Met node occurs anywhere below.
  bool has_meta() const;

  std::size_t var_index() const;
  const Ty& lam_param() const;
  const Term& lam_body() const;
  const Prim& call_prim() const;
  const std::vector<Term>& call_args() const;
  MetaRef met_ref() const;
  const Thinning& met_embed() const;

  bool is_literal() const { return tag() == Tag::Call && call_prim().is_literal(); }

  /// Node identity, for memo tables keyed on shared subterms.
  const void* identity() const { return node_.get(); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  const Node& node() const { return *node_; }

  std::shared_ptr<const Node> node_;
};

struct Term::LamData {
  Ty param;
  Term body;
};
struct Term::CallData {
  Prim prim;
  std::vector<Term> args;
};
struct Term::MetData {
  MetaRef meta;
  Thinning embed;
};

struct Term::Node {
  Ty ty;
  std::size_t size;
  bool has_meta;
  std::variant<VarData, LamData, CallData, MetData> data;
};

inline Term Term::var(std::size_t index, Ty ty) {
  return Term(std::make_shared<const Node>(Node{std::move(ty), 1, false, VarData{index}}));
}

inline Term Term::lam(Ty param, Term body) {
  Ty t = Ty::arrow(param, body.ty());
  const std::size_t sz = 1 + body.size();
  const bool hm = body.has_meta();
  return Term(std::make_shared<const Node>(Node{std::move(t), sz, hm, LamData{std::move(param), std::move(body)}}));
}

inline Term Term::call(Prim prim, std::vector<Term> args) {
  Ty t = prim_result(prim);
  std::size_t sz = 1;
  bool hm = false;
  for (const Term& a : args) {
    sz += a.size();
    hm = hm || a.has_meta();
  }
  return Term(std::make_shared<const Node>(Node{std::move(t), sz, hm, CallData{std::move(prim), std::move(args)}}));
}

inline Term Term::met(MetaRef meta, Thinning embed, Ty ty) {
  return Term(std::make_shared<const Node>(Node{std::move(ty), 1, true, MetData{meta, std::move(embed)}}));
}

inline Term::Tag Term::tag() const { return static_cast<Tag>(node().data.index()); }
inline const Ty& Term::ty() const { return node().ty; }
inline std::size_t Term::size() const { return node().size; }
inline bool Term::has_meta() const { return node().has_meta; }

inline std::size_t Term::var_index() const { return std::get<VarData>(node().data).index; }
inline const Ty& Term::lam_param() const { return std::get<LamData>(node().data).param; }
inline const Term& Term::lam_body() const { return std::get<LamData>(node().data).body; }
inline const Prim& Term::call_prim() const { return std::get<CallData>(node().data).prim; }
inline const std::vector<Term>& Term::call_args() const { return std::get<CallData>(node().data).args; }
inline MetaRef Term::met_ref() const { return std::get<MetData>(node().data).meta; }
inline const Thinning& Term::met_embed() const { return std::get<MetData>(node().data).embed; }

/// A hole: its name, the context it lives in, and its type. `binder_names`
/// parallels `ctx` and is only used for display.
struct Meta {
  std::string name;
  Context ctx;
  Ty ty;
  std::vector<std::string> binder_names;
};

/// Ordered, append-only during elaboration. MetaRef indexes into it.
class MetaStore {
 public:
  MetaStore() = default;
  explicit MetaStore(std::vector<Meta> metas) : metas_(std::move(metas)) {}

  std::size_t size() const { return metas_.size(); }
  bool empty() const { return metas_.empty(); }
  const Meta& operator[](MetaRef r) const { return metas_.at(r); }
  const std::vector<Meta>& metas() const { return metas_; }

  std::optional<MetaRef> find(const std::string& name) const {
    for (std::size_t i = 0; i < metas_.size(); ++i)
      if (metas_[i].name == name) return i;
    return std::nullopt;
  }

  MetaRef add(Meta m) {
    if (find(m.name)) throw VeloError("duplicate metavariable ?" + m.name);
    metas_.push_back(std::move(m));
    return metas_.size() - 1;
  }

 private:
  std::vector<Meta> metas_;
};

}  // namespace velo
