#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "velo/ty.hpp"

namespace velo::syntax {

/// Half-open byte range [start, end) into the source text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool contains(const Span& inner) const { return start <= inner.start && inner.end <= end; }
  friend bool operator==(const Span&, const Span&) = default;
};

inline Span cover(const Span& a, const Span& b) { return {std::min(a.start, b.start), std::max(a.end, b.end)}; }

enum class Tok {
  Lambda,    // \ .
  Ident,
  Colon,
  TyNat,
  TyBool,
  Arrow,     // ->
  FatArrow,  // =>
  Equals,
  Plus,
  Star,
  AmpAmp,
  BarBar,
  Bang,
  LParen,
  RParen,
  NatLit,
  True,
  False,
  Hole,      // ?name; text holds the name without '?'
  Let,
  In,
  Def,
  Semi,      // ; ends a file item
};

inline const char* tok_name(Tok k) {
  switch (k) {
    case Tok::Lambda: return "'\\'";
    case Tok::Ident: return "identifier";
    case Tok::Colon: return "':'";
    case Tok::TyNat: return "'Nat'";
    case Tok::TyBool: return "'Bool'";
    case Tok::Arrow: return "'->'";
    case Tok::FatArrow: return "'=>'";
    case Tok::Equals: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Star: return "'*'";
    case Tok::AmpAmp: return "'&&'";
    case Tok::BarBar: return "'||'";
    case Tok::Bang: return "'!'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::NatLit: return "number";
    case Tok::True: return "'true'";
    case Tok::False: return "'false'";
    case Tok::Hole: return "hole";
    case Tok::Let: return "'let'";
    case Tok::In: return "'in'";
    case Tok::Def: return "'def'";
    case Tok::Semi: return "';'";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

/// Lexical or grammatical error. `expected` is empty for lexical errors.
class SyntaxError : public VeloError {
 public:
  SyntaxError(Span span, std::string message, std::vector<std::string> expected = {})
      : VeloError(message), span(span), message(std::move(message)), expected(std::move(expected)) {}

  Span span;
  std::string message;
  std::vector<std::string> expected;
};

namespace detail {

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline Tok keyword_or_ident(std::string_view w) {
  if (w == "let") return Tok::Let;
  if (w == "in") return Tok::In;
  if (w == "def") return Tok::Def;
  if (w == "true") return Tok::True;
  if (w == "false") return Tok::False;
  if (w == "Nat") return Tok::TyNat;
  if (w == "Bool") return Tok::TyBool;
  return Tok::Ident;
}

}  // namespace detail

/// Splits `src` into tokens. Whitespace and `--` line comments are skipped.
/// Lexing starts at byte `from`; spans are offsets into `src`.
/// Throws SyntaxError on a character that starts no token.
inline std::vector<Token> lex(std::string_view src, std::size_t from = 0) {
  std::vector<Token> out;
  std::size_t i = from;
  const std::size_t n = src.size();
  auto emit = [&](Tok k, std::size_t start, std::size_t end, std::string text = {}) {
    out.push_back(Token{k, std::move(text), Span{start, end}});
  };
  while (i < n) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < n && src[i + 1] == '-') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      emit(Tok::NatLit, start, i, std::string(src.substr(start, i - start)));
      continue;
    }
    if (detail::ident_start(c)) {
      while (i < n && detail::ident_char(src[i])) ++i;
      std::string w(src.substr(start, i - start));
      const Tok kind = detail::keyword_or_ident(w);
      emit(kind, start, i, std::move(w));
      continue;
    }
    if (c == '?') {
      ++i;
      if (i >= n || !detail::ident_start(src[i])) throw SyntaxError({start, i}, "expected a hole name after '?'");
      while (i < n && detail::ident_char(src[i])) ++i;
      emit(Tok::Hole, start, i, std::string(src.substr(start + 1, i - start - 1)));
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < n && src[i + 1] == b; };
    if (two('-', '>')) { emit(Tok::Arrow, start, i + 2); i += 2; continue; }
    if (two('=', '>')) { emit(Tok::FatArrow, start, i + 2); i += 2; continue; }
    if (two('&', '&')) { emit(Tok::AmpAmp, start, i + 2); i += 2; continue; }
    if (two('|', '|')) { emit(Tok::BarBar, start, i + 2); i += 2; continue; }
    switch (c) {
      case '\\': emit(Tok::Lambda, start, ++i); continue;
      case ':': emit(Tok::Colon, start, ++i); continue;
      case '=': emit(Tok::Equals, start, ++i); continue;
      case '+': emit(Tok::Plus, start, ++i); continue;
      case '*': emit(Tok::Star, start, ++i); continue;
      case '!': emit(Tok::Bang, start, ++i); continue;
      case '(': emit(Tok::LParen, start, ++i); continue;
      case ')': emit(Tok::RParen, start, ++i); continue;
      case ';': emit(Tok::Semi, start, ++i); continue;
      default: break;
    }
    // Report the whole UTF-8 sequence as one character.
    std::size_t len = 1;
    const auto lead = static_cast<unsigned char>(c);
    if (lead >= 0xF0) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    len = std::min(len, n - i);
    throw SyntaxError({start, start + len},
                      "unexpected character '" + std::string(src.substr(start, len)) + "'");
  }
  return out;
}

/// 1-based line and column of a byte offset.
struct LineCol {
  std::size_t line;
  std::size_t col;
};

inline LineCol line_col(std::string_view src, std::size_t offset) {
  LineCol lc{1, 1};
  for (std::size_t i = 0; i < offset && i < src.size(); ++i) {
    if (src[i] == '\n') {
      ++lc.line;
      lc.col = 1;
    } else {
      ++lc.col;
    }
  }
  return lc;
}

}  // namespace velo::syntax
