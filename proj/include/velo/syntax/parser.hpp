#pragma once

// Recursive-descent parser.
//
//   term   := '\' IDENT ':' type '=>' term
//           | 'let' IDENT '=' term 'in' term
//           | or
//   or     := and ('||' and)*
//   and    := add ('&&' add)*
//   add    := mul ('+' mul)*
//   mul    := unary ('*' unary)*
//   unary  := '!' unary | app
//   app    := atom atom*
//   atom   := IDENT | NUMBER | 'true' | 'false' | HOLE | '(' term ')'
//   type   := tatom ('->' type)?
//   tatom  := 'Nat' | 'Bool' | '(' type ')'
//
//   program := item* (term ';'?)?
//   item    := 'def' IDENT '=' term ';'?
//
// Application continues across line breaks, so a trailing expression after
// a definition needs the ';' to end that definition's body.

#include <cctype>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "velo/syntax/ast.hpp"
#include "velo/syntax/lexer.hpp"

namespace velo::syntax {

class UnknownCommand : public VeloError {
 public:
  explicit UnknownCommand(std::string name)
      : VeloError("unknown command ':" + name + "'"), name(std::move(name)) {}
  std::string name;
};

class Parser {
 public:
  /// `end_offset` positions errors reported at end of input.
  Parser(std::vector<Token> tokens, std::size_t end_offset)
      : toks_(std::move(tokens)), end_(end_offset) {}

  SurfaceTerm parse_whole_term() {
    SurfaceTerm t = term();
    expect_end();
    return t;
  }

  Program parse_program() {
    Program p;
    while (at(Tok::Def)) {
      next();
      Token name = expect(Tok::Ident);
      expect(Tok::Equals);
      p.defs.push_back(Definition{name.text, name.span, term()});
      if (at(Tok::Semi)) next();
    }
    if (!at_end()) {
      p.trailing = term();
      if (at(Tok::Semi)) next();
    }
    if (!at_end()) fail({tok_name(Tok::Semi), "end of input"});
    return p;
  }

  bool at_end() const { return pos_ >= toks_.size(); }

 private:
  bool at(Tok k) const { return !at_end() && toks_[pos_].kind == k; }
  const Token& next() { return toks_[pos_++]; }

  Span here() const { return at_end() ? Span{end_, end_} : toks_[pos_].span; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string msg = "expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    msg += at_end() ? ", found end of input" : ", found " + describe(toks_[pos_]);
    throw SyntaxError(here(), msg, std::move(expected));
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::Ident: return "identifier '" + t.text + "'";
      case Tok::NatLit: return "number " + t.text;
      case Tok::Hole: return "hole ?" + t.text;
      default: return tok_name(t.kind);
    }
  }

  Token expect(Tok k) {
    if (!at(k)) fail({tok_name(k)});
    return next();
  }

  void expect_end() {
    if (!at_end()) fail({"end of input"});
  }

  static bool starts_atom(Tok k) {
    return k == Tok::Ident || k == Tok::NatLit || k == Tok::True || k == Tok::False || k == Tok::Hole ||
           k == Tok::LParen;
  }

  SurfaceTerm term() {
    if (at(Tok::Lambda)) {
      const Span start = next().span;
      Token param = expect(Tok::Ident);
      expect(Tok::Colon);
      SurfaceTy annot = type();
      expect(Tok::FatArrow);
      SurfaceTerm body = term();
      const Span sp = cover(start, body.span);
      return SurfaceTerm::lam(param.text, std::move(annot), std::move(body), sp);
    }
    if (at(Tok::Let)) {
      const Span start = next().span;
      Token name = expect(Tok::Ident);
      expect(Tok::Equals);
      SurfaceTerm bound = term();
      expect(Tok::In);
      SurfaceTerm body = term();
      const Span sp = cover(start, body.span);
      return SurfaceTerm::let(name.text, std::move(bound), std::move(body), sp);
    }
    return binary(0);
  }

  // Levels 0..3: || && + *
  SurfaceTerm binary(int level) {
    static constexpr Tok kTok[] = {Tok::BarBar, Tok::AmpAmp, Tok::Plus, Tok::Star};
    static constexpr Op kOp[] = {Op::Or, Op::And, Op::Add, Op::Mul};
    if (level == 4) return unary();
    SurfaceTerm lhs = binary(level + 1);
    while (at(kTok[level])) {
      next();
      SurfaceTerm rhs = binary(level + 1);
      const Span sp = cover(lhs.span, rhs.span);
      std::vector<SurfaceTerm> args;
      args.push_back(std::move(lhs));
      args.push_back(std::move(rhs));
      lhs = SurfaceTerm::prim(kOp[level], std::move(args), sp);
    }
    return lhs;
  }

  SurfaceTerm unary() {
    if (at(Tok::Bang)) {
      const Span start = next().span;
      SurfaceTerm arg = unary();
      const Span sp = cover(start, arg.span);
      std::vector<SurfaceTerm> args;
      args.push_back(std::move(arg));
      return SurfaceTerm::prim(Op::Not, std::move(args), sp);
    }
    return application();
  }

  SurfaceTerm application() {
    SurfaceTerm f = atom();
    while (!at_end() && starts_atom(toks_[pos_].kind)) {
      SurfaceTerm a = atom();
      const Span sp = cover(f.span, a.span);
      f = SurfaceTerm::app(std::move(f), std::move(a), sp);
    }
    return f;
  }

  SurfaceTerm atom() {
    if (at_end()) fail(atom_starts());
    const Token& t = toks_[pos_];
    switch (t.kind) {
      case Tok::Ident: next(); return SurfaceTerm::var(t.text, t.span);
      case Tok::NatLit: next(); return SurfaceTerm::nat_lit(Nat(t.text), t.span);
      case Tok::True: next(); return SurfaceTerm::bool_lit(true, t.span);
      case Tok::False: next(); return SurfaceTerm::bool_lit(false, t.span);
      case Tok::Hole: next(); return SurfaceTerm::hole(t.text, t.span);
      case Tok::LParen: {
        const Span open = next().span;
        SurfaceTerm inner = term();
        const Span close = expect(Tok::RParen).span;
        inner.span = cover(open, close);
        return inner;
      }
      default: fail(atom_starts());
    }
  }

  static std::vector<std::string> atom_starts() {
    return {tok_name(Tok::Ident), tok_name(Tok::NatLit), tok_name(Tok::True), tok_name(Tok::False),
            tok_name(Tok::Hole), tok_name(Tok::LParen), tok_name(Tok::Lambda), tok_name(Tok::Let),
            tok_name(Tok::Bang)};
  }

  SurfaceTy type() {
    SurfaceTy dom = type_atom();
    if (at(Tok::Arrow)) {
      next();
      return Ty::arrow(std::move(dom), type());
    }
    return dom;
  }

  SurfaceTy type_atom() {
    if (at(Tok::TyNat)) {
      next();
      return Ty::nat();
    }
    if (at(Tok::TyBool)) {
      next();
      return Ty::boolean();
    }
    if (at(Tok::LParen)) {
      next();
      SurfaceTy t = type();
      expect(Tok::RParen);
      return t;
    }
    fail({tok_name(Tok::TyNat), tok_name(Tok::TyBool), tok_name(Tok::LParen)});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t end_;
};

/// Parses a complete term; every token must be consumed.
inline SurfaceTerm parse_term(const std::vector<Token>& tokens) {
  const std::size_t end = tokens.empty() ? 0 : tokens.back().span.end;
  return Parser(tokens, end).parse_whole_term();
}

inline SurfaceTerm parse_term(std::string_view source) {
  return Parser(lex(source), source.size()).parse_whole_term();
}

inline Program parse_program(std::string_view source) {
  return Parser(lex(source), source.size()).parse_program();
}

/// Lines starting with ':' are commands, `def name = e` defines, anything
/// else is a term to evaluate. Spans are offsets into `line`.
inline ReplCommand parse_repl(std::string_view line) {
  using K = ReplCommand::Kind;
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;

  auto rest_term = [&](std::size_t from) -> std::optional<SurfaceTerm> {
    auto toks = lex(line, from);
    if (toks.empty()) return std::nullopt;
    return Parser(std::move(toks), line.size()).parse_whole_term();
  };

  if (i < line.size() && line[i] == ':') {
    std::size_t j = i + 1;
    while (j < line.size() && (std::isalpha(static_cast<unsigned char>(line[j])) || line[j] == '-')) ++j;
    const std::string word(line.substr(i + 1, j - i - 1));
    std::size_t k = j;
    while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    std::size_t e = line.size();
    while (e > k && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
    const std::string_view rest = line.substr(k, e - k);

    auto no_args = [&](K kind) {
      if (!rest.empty()) throw SyntaxError({k, e}, "':" + word + "' takes no arguments");
      ReplCommand c;
      c.kind = kind;
      return c;
    };

    ReplCommand c;
    if (word == "load" || word == "l") {
      if (rest.empty()) throw SyntaxError({k, e}, "':load' needs a file path", {"path"});
      c.kind = K::Load;
      c.argument = std::string(rest);
      return c;
    }
    if (word == "t" || word == "type") {
      c.kind = K::TypeOf;
      c.term = rest_term(k);
      return c;
    }
    if (word == "eval") {
      c.kind = K::Eval;
      c.term = rest_term(k);
      return c;
    }
    if (word == "fill") {
      std::size_t p = k;
      if (p < line.size() && line[p] == '?') ++p;
      const std::size_t name_start = p;
      while (p < line.size() && detail::ident_char(line[p])) ++p;
      if (p == name_start || !detail::ident_start(line[name_start]))
        throw SyntaxError({k, p}, "':fill' needs a hole name", {tok_name(Tok::Hole)});
      c.kind = K::Fill;
      c.argument = std::string(line.substr(name_start, p - name_start));
      c.term = rest_term(p);
      if (!c.term) throw SyntaxError({line.size(), line.size()}, "':fill' needs a term", {"term"});
      return c;
    }
    if (word == "holes") return no_args(K::Holes);
    if (word == "fold") return no_args(K::Fold);
    if (word == "cse") return no_args(K::Cse);
    if (word == "dump-core") return no_args(K::DumpCore);
    if (word == "quit" || word == "q") return no_args(K::Quit);
    throw UnknownCommand(word);
  }

  auto toks = lex(line);
  if (!toks.empty() && toks.front().kind == Tok::Def) {
    Program p = Parser(std::move(toks), line.size()).parse_program();
    if (p.defs.size() != 1 || p.trailing)
      throw SyntaxError({0, line.size()}, "expected a single definition");
    ReplCommand c;
    c.kind = K::Define;
    c.argument = p.defs[0].name;
    c.term = std::move(p.defs[0].body);
    return c;
  }
  ReplCommand c;
  c.kind = K::Eval;
  c.term = Parser(std::move(toks), line.size()).parse_whole_term();
  return c;
}

}  // namespace velo::syntax
