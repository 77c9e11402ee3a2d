#pragma once

// Sessions, commands and diagnostics for the REPL and the batch CLI.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "velo/check.hpp"
#include "velo/cse.hpp"
#include "velo/elab.hpp"
#include "velo/eval.hpp"
#include "velo/fold.hpp"
#include "velo/print.hpp"
#include "velo/syntax/parser.hpp"
#include "velo/term.hpp"

namespace velo::repl {

using syntax::ReplCommand;
using syntax::Span;

struct Settings {
  std::size_t fuel = kDefaultFuel;
  bool json_errors = false;
  bool color = false;
};

/// A rendered error: a kind, a source position and evidence lines.
struct Diagnostic {
  std::string kind;
  std::string file;
  Span span;
  std::size_t line = 1;
  std::size_t col = 1;
  std::vector<std::pair<std::string, std::string>> evidence;
  std::optional<Ty> expected;
  std::optional<Ty> actual;
  std::optional<Path> path;
};

/// Output of one command.
struct Reply {
  enum class Status { Ok, Error, Blocked };

  Status status = Status::Ok;
  std::string out;  // for stdout
  std::string err;  // for stderr
  bool quit = false;
};

/// Where a piece of source text came from, for positions in diagnostics.
struct Source {
  std::string file;
  std::string_view text;
  std::size_t first_line = 1;  // line number of text[0]
};

inline Diagnostic locate(Diagnostic d, const Source& src) {
  d.file = src.file;
  const auto lc = syntax::line_col(src.text, d.span.start);
  d.line = lc.line + src.first_line - 1;
  d.col = lc.col;
  return d;
}

inline std::string join(const std::vector<std::string>& xs, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

inline Diagnostic from_type_error(const elab::TypeError& e) {
  using K = elab::TypeError::Kind;
  Diagnostic d;
  d.kind = elab::kind_name(e.kind);
  d.span = e.span;
  d.expected = e.expected;
  d.actual = e.actual;
  switch (e.kind) {
    case K::UnboundVariable:
      d.evidence.push_back({"variable", e.name});
      d.evidence.push_back({"in scope", e.in_scope.empty() ? "(nothing)" : join(e.in_scope)});
      break;
    case K::Mismatch:
    case K::NotAFunction:
    case K::HoleTypeConflict:
      if (!e.name.empty()) d.evidence.push_back({e.kind == K::Mismatch ? "name" : "hole", e.kind == K::Mismatch ? e.name : "?" + e.name});
      if (e.expected) d.evidence.push_back({"expected", to_string(*e.expected)});
      if (e.actual) d.evidence.push_back({"actual", to_string(*e.actual)});
      if (e.expected && e.actual) {
        d.path = e.path;
        d.evidence.push_back({"path", path_string(e.path)});
      }
      break;
    case K::ArityError:
      d.evidence.push_back({"operator", e.name});
      d.evidence.push_back({"expected", std::to_string(e.expected_arity) + " argument(s)"});
      d.evidence.push_back({"actual", std::to_string(e.got_arity) + " argument(s)"});
      break;
    case K::CannotInferHole:
    case K::UnknownHole:
    case K::DuplicateHole: d.evidence.push_back({"hole", "?" + e.name}); break;
    case K::HoleyDefinition: d.evidence.push_back({"definition", e.name}); break;
  }
  if (!e.detail.empty()) d.evidence.push_back({"note", e.detail});
  return d;
}

inline Diagnostic from_syntax_error(const syntax::SyntaxError& e) {
  Diagnostic d;
  d.kind = "syntax";
  d.span = e.span;
  d.evidence.push_back({"message", e.message});
  if (!e.expected.empty()) d.evidence.push_back({"expected", join(e.expected, " or ")});
  return d;
}

inline Diagnostic simple(std::string kind, std::string key, std::string value, Span span = {}) {
  Diagnostic d;
  d.kind = std::move(kind);
  d.span = span;
  d.evidence.push_back({std::move(key), std::move(value)});
  return d;
}

inline std::string render_text(const Diagnostic& d, bool color) {
  std::ostringstream os;
  os << d.file << ':' << d.line << ':' << d.col << ": ";
  os << (color ? "\x1b[1;31merror\x1b[0m" : "error");
  os << ": " << d.kind << '\n';
  std::size_t width = 0;
  for (const auto& [k, v] : d.evidence) width = std::max(width, k.size());
  for (const auto& [k, v] : d.evidence) os << "  " << k << ':' << std::string(width - k.size() + 1, ' ') << v << '\n';
  return os.str();
}

inline std::string render_json(const Diagnostic& d) {
  nlohmann::ordered_json j;
  j["kind"] = d.kind;
  j["file"] = d.file;
  j["span"] = {{"start", d.span.start}, {"end", d.span.end}, {"line", d.line}, {"col", d.col}};
  j["expected"] = d.expected ? nlohmann::ordered_json(to_string(*d.expected)) : nlohmann::ordered_json(nullptr);
  j["actual"] = d.actual ? nlohmann::ordered_json(to_string(*d.actual)) : nlohmann::ordered_json(nullptr);
  j["path"] = d.path ? nlohmann::ordered_json(*d.path) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json ev = nlohmann::ordered_json::object();
  for (const auto& [k, v] : d.evidence) ev[k] = v;
  j["evidence"] = std::move(ev);
  return j.dump() + '\n';
}

/// A named top-level definition, or an anonymous focused term.
struct Entry {
  std::string name;  // empty for an anonymous term
  Term term;
  MetaStore store;
};

inline const char* kPrelude =
    "def double = \\n : Nat => n + n\n"
    "def square = \\n : Nat => n * n\n"
    "def twice = \\f : Nat -> Nat => \\n : Nat => f (f n)\n"
    "def implies = \\p : Bool => \\q : Bool => !p || q\n";

inline std::string plural(std::size_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

class Session {
 public:
  Settings settings;

  const std::vector<std::string>& order() const { return order_; }
  const elab::Globals& globals() const { return globals_; }
  const std::optional<Entry>& focus() const { return focus_; }

  /// Runs one REPL line.
  Reply run_line(std::string_view line) {
    ++line_no_;
    const Source src{"<repl>", line, line_no_};
    std::size_t first = 0;
    while (first < line.size() && std::isspace(static_cast<unsigned char>(line[first]))) ++first;
    if (first == line.size() || line.substr(first, 2) == "--") return {};
    try {
      return run_command(syntax::parse_repl(line), src);
    } catch (const syntax::SyntaxError& e) {
      return error(locate(from_syntax_error(e), src));
    } catch (const syntax::UnknownCommand& e) {
      return error(locate(simple("unknown-command", "command", ":" + e.name, {first, line.size()}), src));
    }
  }

  /// Runs a parsed command whose spans point into `src`.
  Reply run_command(const ReplCommand& cmd, const Source& src) {
    using K = ReplCommand::Kind;
    switch (cmd.kind) {
      case K::Quit: {
        Reply r;
        r.quit = true;
        return r;
      }
      case K::Load: return load_file(cmd.argument);
      case K::Define: return define(cmd.argument, *cmd.term, src);
      case K::TypeOf: return type_of(cmd.term, src);
      case K::Eval: return eval(cmd.term, src);
      case K::Holes: return holes();
      case K::Fill: return fill(cmd.argument, *cmd.term, src);
      case K::Fold: return fold();
      case K::Cse: return run_cse();
      case K::DumpCore: {
        if (!focus_) return no_focus(src);
        return ok(dump_core(focus_->term, focus_->store) + '\n');
      }
    }
    return {};
  }

  /// Loads `def` items from a file. All or nothing.
  Reply load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return error(io_error(path, "cannot open file"));
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    return load_source(text, path, true);
  }

  /// Loads `def` items from text. On error the session is unchanged.
  Reply load_source(std::string_view text, const std::string& file, bool set_focus) {
    const Source src{file, text, 1};
    Session next = *this;
    syntax::Program prog;
    try {
      prog = syntax::parse_program(text);
    } catch (const syntax::SyntaxError& e) {
      return error(locate(from_syntax_error(e), src));
    }
    for (const auto& def : prog.defs) {
      auto r = next.add_definition(def.name, def.name_span, def.body, src);
      if (r) return error(*r);
    }
    if (prog.trailing) {
      auto r = next.elaborate_closed(*prog.trailing, src, true);
      if (r.is_no()) return error(r.no());
      next.focus_ = Entry{"", std::move(r.yes().term), std::move(r.yes().store)};
    } else if (set_focus && !prog.defs.empty()) {
      next.focus_ = next.entry(prog.defs.back().name);
    }
    next.line_no_ = line_no_;
    *this = std::move(next);
    return ok("loaded " + plural(prog.defs.size(), "definition") + " from " + file + '\n');
  }

  bool load_prelude() { return load_source(kPrelude, "<prelude>", false).status == Reply::Status::Ok; }

  /// Elaborates a closed term against the session's definitions. Terms that
  /// will be kept (`owns_holes`) may not reuse another definition's hole names.
  DecInfo<Diagnostic, elab::Elaborated> elaborate_closed(const syntax::SurfaceTerm& s, const Source& src,
                                                         bool owns_holes = false) const {
    auto r = elab::elaborate(s, {}, globals_);
    if (r.is_no()) return no(locate(from_type_error(r.no()), src));
    if (owns_holes)
      if (auto d = hole_clash(r.yes().store, "", s.span, src)) return no(std::move(*d));
    return yes(std::move(r).yes());
  }

  /// Renders an evaluation outcome; `with_steps` adds the step count.
  Reply evaluate_entry(const Term& t, const MetaStore& store, bool with_steps) const {
    const EvalResult r = evaluate(t, settings.fuel);
    switch (r.kind) {
      case EvalResult::Kind::Final: {
        std::string out = "= " + show_term(r.term, store);
        if (with_steps) out += " (" + plural(r.steps, "step") + ")";
        return ok(out + '\n');
      }
      case EvalResult::Kind::BlockedOn: {
        const Meta& m = store[r.meta];
        Reply rep;
        rep.status = Reply::Status::Blocked;
        rep.out = "blocked on ?" + m.name + " : " + to_string(m.ty) + " in " + show_context(m.ctx, m.binder_names) + '\n';
        return rep;
      }
      case EvalResult::Kind::OutOfFuel: {
        Diagnostic d = simple("out-of-fuel", "steps", std::to_string(r.steps));
        d.file = "<eval>";
        return error(d);
      }
    }
    return {};
  }

  /// Applies constant folding and/or CSE to every named definition.
  void apply_passes(bool do_fold, bool do_cse) {
    for (const auto& name : order_) {
      auto& g = globals_.at(name);
      if (do_fold) g.term = constant_fold(g.term);
      if (do_cse) g.term = cse(g.term, g.store).term;
      if (focus_ && focus_->name == name) focus_ = entry(name);
    }
  }

  Entry entry(const std::string& name) const {
    const auto& g = globals_.at(name);
    return Entry{name, g.term, g.store};
  }

 private:
  Reply ok(std::string out) const {
    Reply r;
    r.out = std::move(out);
    return r;
  }

  Reply error(const Diagnostic& d) const {
    Reply r;
    r.status = Reply::Status::Error;
    r.err = settings.json_errors ? render_json(d) : render_text(d, settings.color);
    return r;
  }

  Diagnostic io_error(const std::string& path, std::string message) const {
    Diagnostic d = simple("io", "message", std::move(message));
    d.evidence.push_back({"path", path});
    d.file = "<repl>";
    d.line = line_no_ == 0 ? 1 : line_no_;
    return d;
  }

  Reply no_focus(const Source& src) const {
    return error(locate(simple("no-focus", "note", "nothing loaded or defined yet"), src));
  }

  /// A hole name in `store` that another definition already uses.
  std::optional<Diagnostic> hole_clash(const MetaStore& store, const std::string& owner, Span span,
                                       const Source& src) const {
    for (const Meta& m : store.metas()) {
      for (const auto& name : order_) {
        if (name == owner) continue;
        if (globals_.at(name).store.find(m.name)) {
          Diagnostic d = simple("duplicate-hole", "hole", "?" + m.name, span);
          d.evidence.push_back({"note", "already used by definition '" + name + "'"});
          return locate(std::move(d), src);
        }
      }
    }
    return std::nullopt;
  }

  std::optional<Diagnostic> add_definition(const std::string& name, Span name_span, const syntax::SurfaceTerm& body,
                                           const Source& src) {
    if (globals_.count(name)) {
      Diagnostic d = simple("duplicate-definition", "name", name, name_span);
      return locate(std::move(d), src);
    }
    auto r = elaborate_closed(body, src, true);
    if (r.is_no()) return r.no();
    globals_.emplace(name, elab::GlobalDef{r.yes().term, r.yes().store});
    order_.push_back(name);
    return std::nullopt;
  }

  Reply define(const std::string& name, const syntax::SurfaceTerm& body, const Source& src) {
    Span name_span{};
    if (auto p = src.text.find(name); p != std::string_view::npos) name_span = {p, p + name.size()};
    if (auto d = add_definition(name, name_span, body, src)) return error(*d);
    focus_ = entry(name);
    std::string out = "defined " + name + " : " + to_string(focus_->term.ty());
    if (!focus_->store.empty()) out += " (" + plural(focus_->store.size(), "hole") + ")";
    return ok(out + '\n');
  }

  Reply type_of(const std::optional<syntax::SurfaceTerm>& term, const Source& src) const {
    if (!term) {
      if (!focus_) return no_focus(src);
      return ok(to_string(focus_->term.ty()) + '\n');
    }
    auto r = elaborate_closed(*term, src);
    if (r.is_no()) return error(r.no());
    return ok(to_string(r.yes().term.ty()) + '\n');
  }

  Reply eval(const std::optional<syntax::SurfaceTerm>& term, const Source& src) const {
    if (!term) {
      if (!focus_) return no_focus(src);
      return evaluate_entry(focus_->term, focus_->store, true);
    }
    auto r = elaborate_closed(*term, src);
    if (r.is_no()) return error(r.no());
    return evaluate_entry(r.yes().term, r.yes().store, true);
  }

  std::string hole_lines(const MetaStore& store) const {
    std::string out;
    for (const Meta& m : store.metas())
      out += "?" + m.name + " : " + to_string(m.ty) + " in " + show_context(m.ctx, m.binder_names) + '\n';
    return out;
  }

  Reply holes() const {
    if (!focus_ || focus_->store.empty()) return ok("no holes\n");
    return ok(hole_lines(focus_->store));
  }

  /// Replaces the focused term (and its definition, if named).
  void update_focus(Term term, MetaStore store) {
    focus_->term = std::move(term);
    focus_->store = std::move(store);
    if (!focus_->name.empty()) globals_.at(focus_->name) = elab::GlobalDef{focus_->term, focus_->store};
  }

  Reply fill(const std::string& hole, const syntax::SurfaceTerm& replacement, const Source& src) {
    // The focused term first, then any definition that owns the hole.
    std::optional<Entry> owner;
    if (focus_ && focus_->store.find(hole)) {
      owner = focus_;
    } else {
      for (const auto& name : order_)
        if (globals_.at(name).store.find(hole)) owner = entry(name);
    }
    if (!owner) {
      Diagnostic d = simple("unknown-hole", "hole", "?" + hole, replacement.span);
      return error(locate(std::move(d), src));
    }
    const Meta& meta = owner->store[*owner->store.find(hole)];
    const elab::Scope scope{meta.ctx, meta.binder_names, {}};
    auto r = elab::elaborate(replacement, scope, globals_, meta.ty);
    if (r.is_no()) return error(locate(from_type_error(r.no()), src));
    if (auto d = hole_clash(r.yes().store, owner->name, replacement.span, src)) return error(*d);
    auto filled = elab::fill_hole(owner->term, owner->store, hole, r.yes(), meta.ctx);
    if (filled.is_no()) {
      elab::TypeError e = filled.no();
      if (e.span == Span{}) e.span = replacement.span;
      return error(locate(from_type_error(e), src));
    }
    if (auto v = validate_term(filled.yes().term, {}, filled.yes().store); v.is_no()) {
      Diagnostic d = simple("internal", "note", "fill produced an ill-formed term: " + v.no().reason);
      return error(locate(std::move(d), src));
    }

    const bool owner_is_focus = focus_ && focus_->name == owner->name && focus_->store.find(hole);
    if (!owner_is_focus) focus_ = owner;
    update_focus(filled.yes().term, filled.yes().store);

    std::string out = "filled ?" + hole + '\n';
    if (focus_->store.empty())
      out += "no holes remain\n";
    else
      out += hole_lines(focus_->store);
    return ok(out);
  }

  Reply fold() {
    if (!focus_) return ok("nothing to fold\n");
    const std::size_t before = focus_->term.size();
    Term folded = constant_fold(focus_->term);
    const std::size_t after = folded.size();
    update_focus(std::move(folded), focus_->store);
    return ok("fold: " + std::to_string(before) + " -> " + plural(after, "node") + '\n');
  }

  Reply run_cse() {
    if (!focus_) return ok("nothing to share\n");
    CseResult r = cse(focus_->term, focus_->store);
    std::string out = "cse: " + std::to_string(r.report.nodes_before) + " -> " + plural(r.report.nodes_after, "node") + '\n';
    for (const auto& b : r.report.bindings) out += "  shared x" + std::to_string(b.occurrences) + " " + b.shared + '\n';
    for (const auto& s : r.report.skipped)
      out += "  skipped x" + std::to_string(s.occurrences) + " " + s.shared + ": " + s.reason + '\n';
    update_focus(std::move(r.term), focus_->store);
    return ok(out);
  }

  std::vector<std::string> order_;
  elab::Globals globals_;
  std::optional<Entry> focus_;
  std::size_t line_no_ = 0;
};

/// Runs a script line by line and returns a transcript: each input line
/// prefixed with "> ", followed by everything the command printed.
inline std::string run_script(Session& s, std::string_view script) {
  std::string out;
  std::size_t pos = 0;
  while (pos < script.size()) {
    std::size_t nl = script.find('\n', pos);
    if (nl == std::string_view::npos) nl = script.size();
    const std::string_view line = script.substr(pos, nl - pos);
    pos = nl + 1;
    out += "> ";
    out += line;
    out += '\n';
    Reply r = s.run_line(line);
    out += r.out;
    out += r.err;
    if (r.quit) break;
  }
  return out;
}

}  // namespace velo::repl
