// velo: batch evaluator and interactive REPL.
//
//   velo                      start the REPL
//   velo file.velo            load definitions, then start the REPL
//   velo --eval "1 + 2 * 3"   evaluate and exit (0 ok, 1 error, 2 blocked)

#include <unistd.h>

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "velo/repl.hpp"

namespace {

using velo::repl::Reply;

void emit(const Reply& r) {
  std::cout << r.out << std::flush;
  std::cerr << r.err << std::flush;
}

int exit_code(const Reply& r) {
  switch (r.status) {
    case Reply::Status::Ok: return 0;
    case Reply::Status::Error: return 1;
    case Reply::Status::Blocked: return 2;
  }
  return 1;
}

int repl_loop(velo::repl::Session& session, bool echo) {
  const bool interactive = isatty(STDIN_FILENO) != 0;
  std::string line;
  for (;;) {
    if (interactive) std::cout << "velo> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (echo) std::cout << "> " << line << '\n' << std::flush;
    Reply r = session.run_line(line);
    emit(r);
    if (r.quit) break;
  }
  if (interactive) std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"velo: a small typed functional language with holes"};
  std::string file;
  std::string expr;
  bool do_fold = false;
  bool do_cse = false;
  bool dump = false;
  bool no_prelude = false;
  bool echo = false;
  velo::repl::Settings settings;

  app.add_option("file", file, "source file of `def` items to load");
  auto* eval_opt = app.add_option("--eval", expr, "evaluate an expression and exit");
  app.add_flag("--fold", do_fold, "constant-fold loaded definitions and the --eval term");
  app.add_flag("--cse", do_cse, "share common subexpressions in loaded definitions and the --eval term");
  app.add_flag("--dump-core", dump, "print the core form of loaded definitions and the --eval term");
  app.add_option("--fuel", settings.fuel, "evaluation step budget")->check(CLI::PositiveNumber);
  app.add_flag("--json-errors", settings.json_errors, "report errors as JSON objects, one per line");
  app.add_flag("--no-prelude", no_prelude, "do not load the standard definitions");
  app.add_flag("--color", settings.color, "colour diagnostics");
  app.add_flag("--echo", echo, "echo REPL input lines, prefixed with '> '");
  CLI11_PARSE(app, argc, argv);

  velo::repl::Session session;
  session.settings = settings;
  if (!no_prelude && !session.load_prelude()) {
    std::cerr << "velo: the prelude failed to load\n";
    return 1;
  }
  const std::size_t prelude_defs = session.order().size();

  if (!file.empty()) {
    Reply r = session.load_file(file);
    if (r.status != Reply::Status::Ok) {
      emit(r);
      return exit_code(r);
    }
    if (!*eval_opt) emit(r);
  }
  if (do_fold || do_cse) session.apply_passes(do_fold, do_cse);
  if (dump) {
    for (std::size_t i = prelude_defs; i < session.order().size(); ++i) {
      const auto& name = session.order()[i];
      const auto& g = session.globals().at(name);
      std::cout << name << " = " << velo::dump_core(g.term, g.store) << '\n';
    }
  }

  if (!*eval_opt) return repl_loop(session, echo);

  const velo::repl::Source src{"<eval>", expr, 1};
  velo::syntax::SurfaceTerm surface;
  try {
    surface = velo::syntax::parse_term(expr);
  } catch (const velo::syntax::SyntaxError& e) {
    velo::repl::Diagnostic d = velo::repl::locate(velo::repl::from_syntax_error(e), src);
    std::cerr << (settings.json_errors ? velo::repl::render_json(d) : velo::repl::render_text(d, settings.color));
    return 1;
  }
  auto elaborated = session.elaborate_closed(surface, src);
  if (elaborated.is_no()) {
    const auto& d = elaborated.no();
    std::cerr << (settings.json_errors ? velo::repl::render_json(d) : velo::repl::render_text(d, settings.color));
    return 1;
  }
  velo::Term term = elaborated.yes().term;
  const velo::MetaStore& store = elaborated.yes().store;
  if (do_fold) term = velo::constant_fold(term);
  if (do_cse) term = velo::cse(term, store).term;
  if (dump) std::cout << velo::dump_core(term, store) << '\n';

  Reply r = session.evaluate_entry(term, store, false);
  emit(r);
  return exit_code(r);
}
