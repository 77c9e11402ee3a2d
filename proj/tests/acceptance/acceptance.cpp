// Acceptance checks. One PASS/FAIL line per criterion; nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "testkit/testkit.hpp"
#include "velo/check.hpp"
#include "velo/cse.hpp"
#include "velo/decide.hpp"
#include "velo/elab.hpp"
#include "velo/equality.hpp"
#include "velo/eval.hpp"
#include "velo/fold.hpp"
#include "velo/print.hpp"
#include "velo/rename.hpp"
#include "velo/repl.hpp"
#include "velo/syntax/parser.hpp"

using namespace velo;
namespace fs = std::filesystem;

namespace {

const Ty N = Ty::nat();
const Ty B = Ty::boolean();

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  std::string output;
  int status = -1;
};

Run shell(const std::string& cmd) {
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

void each_met(const Term& t, const std::function<void(const Term&)>& f) {
  switch (t.tag()) {
    case Term::Tag::Met: f(t); break;
    case Term::Tag::Lam: each_met(t.lam_body(), f); break;
    case Term::Tag::Call:
      for (const Term& a : t.call_args()) each_met(a, f);
      break;
    default: break;
  }
}

testkit::Generated generate(std::uint64_t seed, int depth, double holes, const Ty& ty, Context ctx = {}) {
  testkit::GenConfig cfg;
  cfg.seed = seed;
  cfg.max_depth = depth;
  cfg.hole_probability = holes;
  cfg.context = std::move(ctx);
  return testkit::gen_term(cfg, ty);
}

// ---------------------------------------------------------------------------

Outcome hole_reconciliation() {
  Outcome o;
  const auto t0 = Clock::now();

  auto e = elab::elaborate(syntax::parse_term("\\a : Nat => (\\x : Nat => ?h) a + (\\y : Nat => ?h) a"));
  o.require(e.is_yes(), "worked example does not elaborate");
  if (!o.ok) return o;
  const auto& el = e.yes();
  o.require(el.store.size() == 1, "expected exactly one meta");
  o.require(el.store[0].ctx == Context{N}, "meta context is not (ε, a)");
  o.require(el.store[0].binder_names == std::vector<std::string>{"a"}, "meta binder names are not [a]");
  int occurrences = 0;
  each_met(el.term, [&](const Term& m) {
    ++occurrences;
    o.require(m.met_embed().bits() == "10", "occurrence thinning is not the prefix embedding 10");
    o.require(el.store[0].ctx.is_prefix_of(m.met_embed().target()), "meta context is not a prefix of the occurrence");
  });
  o.require(occurrences == 2, "expected two occurrences of ?h");

  const elab::Scope scope{el.store[0].ctx, el.store[0].binder_names, {}};
  auto with_x = elab::elaborate(syntax::parse_term("x"), scope, {}, N);
  o.require(with_x.is_no() && with_x.no().kind == elab::TypeError::Kind::UnboundVariable,
            "a replacement mentioning x was not rejected");
  auto with_a = elab::elaborate(syntax::parse_term("a + 1"), scope, {}, N);
  o.require(with_a.is_yes(), "a replacement over (ε, a) did not elaborate");
  if (!o.ok) return o;
  auto filled = elab::fill_hole(el.term, el.store, "h", with_a.yes(), el.store[0].ctx);
  o.require(filled.is_yes(), "filling over (ε, a) failed");
  if (!o.ok) return o;
  o.require(!filled.yes().term.has_meta(), "holes remain after the fill");
  o.require(dump_core(filled.yes().term) ==
                "(lam Nat (call add (call app (lam Nat (call add (var 1) (nat 1))) (var 0)) "
                "(call app (lam Nat (call add (var 1) (nat 1))) (var 0))))",
            "fill did not land as var 1 in both positions");

  // The golden transcript, through the library.
  const fs::path dir(VELO_GOLDEN_DIR);
  repl::Session s;
  s.load_prelude();
  const std::string got = repl::run_script(s, slurp(dir / "hole_restriction.in"));
  o.require(got == slurp(dir / "hole_restriction.out"), "hole_restriction transcript differs");

  const double secs = seconds_since(t0);
  o.require(secs < 1.0, "took " + std::to_string(secs) + " s");
  return o;
}

Outcome pass_soundness() {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; checked < 10000; ++seed) {
    const Ty ty = seed % 2 ? N : B;
    auto g = generate(seed, 8, 0.0, ty);
    const testkit::Value expected = testkit::naive_eval(g.term);
    const EvalResult f = evaluate(constant_fold(g.term));
    const EvalResult c = evaluate(cse(g.term, g.store).term);
    o.require(f.kind == EvalResult::Kind::Final && c.kind == EvalResult::Kind::Final, "evaluation did not finish");
    if (!o.ok) return o;
    o.require(testkit::same_first_order(expected, testkit::literal_value(f.term)),
              "fold changed the value of " + dump_core(g.term));
    o.require(testkit::same_first_order(expected, testkit::literal_value(c.term)),
              "cse changed the value of " + dump_core(g.term));
    if (!o.ok) return o;
    ++checked;
  }
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "took " + std::to_string(secs) + " s");
  o.detail = o.ok ? std::to_string(checked) + " terms, " + std::to_string(secs).substr(0, 5) + " s" : o.detail;
  return o;
}

Outcome type_preservation() {
  Outcome o;
  std::size_t checked = 0, with_holes = 0, steps = 0;
  for (std::uint64_t seed = 1; checked < 10000; ++seed) {
    const Ty ty = seed % 3 == 0 ? Ty::arrow(N, B) : (seed % 3 == 1 ? N : B);
    auto g = generate(seed * 31 + 7, 6, seed % 2 ? 0.12 : 0.02, ty);
    if (!g.store.empty()) ++with_holes;
    auto invariant = [&](const Term& t, const char* what) {
      o.require(validate_term(t, {}, g.store).is_yes(), std::string(what) + " broke validate_term on " + dump_core(g.term, g.store));
      if (o.ok) o.require(infer_ty(t, {}, g.store) == ty, std::string(what) + " changed the type");
    };
    invariant(g.term, "generation");
    invariant(constant_fold(g.term), "constant_fold");
    invariant(cse(g.term, g.store).term, "cse");
    Term cur = g.term;
    for (std::size_t i = 0; i < 100000 && o.ok; ++i) {
      std::optional<StepResult> attempt;
      try {
        attempt = step(cur);
      } catch (const std::exception& ex) {
        o.require(false, std::string("step threw: ") + ex.what());
        break;
      }
      StepResult& r = *attempt;
      const bool trichotomy = r.kind == StepResult::Kind::IsValue || r.kind == StepResult::Kind::Blocked ||
                              r.kind == StepResult::Kind::Stepped;
      o.require(trichotomy, "step left the trichotomy");
      o.require((r.kind == StepResult::Kind::IsValue) == is_value(cur), "IsValue disagrees with is_value");
      if (r.kind != StepResult::Kind::Stepped) break;
      ++steps;
      invariant(r.term, "a step");
      cur = std::move(r.term);
    }
    if (!o.ok) return o;
    ++checked;
  }
  o.require(with_holes >= 1000, "too few terms with holes");
  if (o.ok) o.detail = std::to_string(checked) + " terms (" + std::to_string(with_holes) + " with holes), " + std::to_string(steps) + " steps";
  return o;
}

Outcome folding_laws() {
  Outcome o;
  // Direct cases, one or more per rule; context is (n : Nat, b : Bool).
  const Term n = Term::var(1, N), b = Term::var(0, B);
  const Term hn = Term::met(0, thin_id({N, B}), N), hb = Term::met(1, thin_id({N, B}), B);
  auto call = [](Prim p, std::vector<Term> a) { return Term::call(std::move(p), std::move(a)); };
  auto nat = [](int v) { return Term::nat(v); };
  auto boolean = [](bool v) { return Term::boolean(v); };
  struct Case {
    std::string rule;
    Term in, out;
  };
  const std::vector<Case> cases = {
      {"add-lit", call(Prim::add(), {nat(2), nat(3)}), nat(5)},
      {"add-zero-left", call(Prim::add(), {nat(0), n}), n},
      {"add-zero-right", call(Prim::add(), {n, nat(0)}), n},
      {"mul-lit", call(Prim::mul(), {nat(4), nat(6)}), nat(24)},
      {"mul-zero-left", call(Prim::mul(), {nat(0), n}), nat(0)},
      {"mul-zero-right", call(Prim::mul(), {n, nat(0)}), nat(0)},
      {"mul-one-left", call(Prim::mul(), {nat(1), n}), n},
      {"mul-one-right", call(Prim::mul(), {n, nat(1)}), n},
      {"and-true-left", call(Prim::and_(), {boolean(true), b}), b},
      {"and-true-right", call(Prim::and_(), {b, boolean(true)}), b},
      {"and-false-left", call(Prim::and_(), {boolean(false), b}), boolean(false)},
      {"and-false-right", call(Prim::and_(), {b, boolean(false)}), boolean(false)},
      {"or-false-left", call(Prim::or_(), {boolean(false), b}), b},
      {"or-false-right", call(Prim::or_(), {b, boolean(false)}), b},
      {"or-true-left", call(Prim::or_(), {boolean(true), b}), boolean(true)},
      {"or-true-right", call(Prim::or_(), {b, boolean(true)}), boolean(true)},
      {"not-lit", call(Prim::not_(), {boolean(true)}), boolean(false)},
      {"not-not", call(Prim::not_(), {call(Prim::not_(), {b})}), b},
  };
  std::set<std::string> covered;
  for (const Case& c : cases) {
    std::string fired;
    for (const FoldRule& r : fold_rules())
      if (r.op == c.in.call_prim().op() && r.apply(c.in.call_args())) {
        fired = r.name;
        break;
      }
    o.require(fired == c.rule, c.rule + ": rule " + fired + " fired instead");
    o.require(term_eq(constant_fold(c.in), c.out), c.rule + ": wrong result");
    covered.insert(c.rule);
  }
  std::set<std::string> table;
  for (const FoldRule& r : fold_rules()) table.insert(r.name);
  o.require(covered == table, "some rule in the fold table has no direct case");

  // Absorbing rules keep operands that contain holes.
  const std::vector<Term> guarded = {
      call(Prim::mul(), {nat(0), hn}),        call(Prim::mul(), {hn, nat(0)}),
      call(Prim::and_(), {boolean(false), hb}), call(Prim::and_(), {hb, boolean(false)}),
      call(Prim::or_(), {boolean(true), hb}),   call(Prim::or_(), {hb, boolean(true)}),
  };
  for (const Term& t : guarded) o.require(term_eq(constant_fold(t), t), "an absorbing rule discarded a hole");

  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 10000; ++seed) {
    auto g = generate(seed * 13 + 5, 6, seed % 2 ? 0.1 : 0.0, seed % 3 ? N : B);
    const Term once = constant_fold(g.term);
    o.require(term_eq(constant_fold(once), once), "not idempotent on " + dump_core(g.term, g.store));
    if (!o.ok) return o;
    ++checked;
  }
  if (o.ok) o.detail = std::to_string(cases.size()) + " rule cases, " + std::to_string(checked) + " terms";
  return o;
}

Outcome thinning_algebra() {
  Outcome o;
  const auto t0 = Clock::now();
  // Every thinning into each context of size <= 5, grouped by target.
  std::vector<Context> all;
  for (std::size_t k = 0; k <= 5; ++k)
    for (const Context& c : testkit::contexts_of_size(k)) all.push_back(c);
  auto into = [](const Context& tgt) {
    std::vector<Thinning> out;
    std::set<std::string> sources;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << tgt.size()); ++bits) {
      std::vector<Ty> sel;
      for (std::size_t p = 0; p < tgt.size(); ++p)
        if ((bits >> p) & 1u) sel.push_back(tgt[p]);
      const Context src(sel);
      std::string key;
      for (const Ty& t : sel) key += to_string(t) + ",";
      if (!sources.insert(key).second) continue;
      for (Thinning& t : testkit::enumerate_thinnings(src, tgt)) out.push_back(std::move(t));
    }
    return out;
  };

  std::size_t triples = 0;
  for (const Context& d : all) {
    for (const Thinning& h : into(d)) {
      for (const Thinning& g : into(h.source())) {
        const Thinning hg = thin_compose(g, h);
        for (const Thinning& f : into(g.source())) {
          ++triples;
          // identity
          o.require(thin_compose(thin_id(f.source()), f) == f && thin_compose(f, thin_id(f.target())) == f,
                    "identity law");
          // associativity: h . (g . f) = (h . g) . f
          o.require(thin_compose(thin_compose(f, g), h) == thin_compose(f, hg), "associativity");
          // functoriality of apply and agreement with the definition
          const Thinning all3 = thin_compose(f, hg);
          for (std::size_t i = 0; i < f.source().size(); ++i) {
            o.require(apply_thinning(all3, i) == apply_thinning(h, apply_thinning(g, apply_thinning(f, i))),
                      "functoriality");
            o.require(apply_thinning(f, i) == testkit::oracle_apply(f, i), "apply disagrees with the definition");
          }
          if (!o.ok) return o;
        }
      }
    }
  }

  std::mt19937_64 rng(5);
  std::size_t sections = 0;
  for (; sections < 10000; ++sections) {
    const Context& tgt = all[rng() % all.size()];
    const auto ths = into(tgt);
    const Thinning& th = ths[rng() % ths.size()];
    const Ty ty = rng() & 1 ? N : B;
    auto s = generate(rng(), 4, 0.1, ty, th.source());
    const Term up = rename(s.term, th);
    o.require(validate_term(up, th.target(), s.store).is_yes() && infer_ty(up, th.target(), s.store) == ty,
              "rename broke typing");
    auto down = strengthen(up, th);
    o.require(down.is_yes() && term_eq(down.yes(), s.term), "strengthen(rename(s)) != s");
    // The other direction: a term over the target strengthens back only to its preimage.
    auto t = generate(rng(), 4, 0.0, ty, th.target());
    auto st = strengthen(t.term, th);
    if (st.is_yes()) o.require(term_eq(rename(st.yes(), th), t.term), "rename(strengthen(t)) != t");
    if (!o.ok) return o;
  }
  const double secs = seconds_since(t0);
  o.require(secs < 30.0, "took " + std::to_string(secs) + " s");
  if (o.ok) o.detail = std::to_string(triples) + " triples, " + std::to_string(sections) + " rename cases, " + std::to_string(secs).substr(0, 5) + " s";
  return o;
}

// Rebuilds `t` with fresh nodes, optionally bumping the literal at pre-order
// position `bump`.
Term rebuild(const Term& t, long& bump) {
  const bool here = bump-- == 0;
  switch (t.tag()) {
    case Term::Tag::Var: return Term::var(t.var_index(), t.ty());
    case Term::Tag::Met: return Term::met(t.met_ref(), t.met_embed(), t.ty());
    case Term::Tag::Lam: return Term::lam(t.lam_param(), rebuild(t.lam_body(), bump));
    case Term::Tag::Call: {
      if (t.call_prim().op() == Prim::Op::Nat) return Term::nat(t.call_prim().nat_value() + (here ? 1 : 0));
      if (t.call_prim().op() == Prim::Op::Bool) return Term::boolean(t.call_prim().bool_value() != here);
      std::vector<Term> args;
      for (const Term& a : t.call_args()) args.push_back(rebuild(a, bump));
      return Term::call(t.call_prim(), std::move(args));
    }
  }
  return t;
}

struct RecordingProbe {
  std::string log;
  void tag_compare() { log += 'T'; }
  void recurse() { log += 'R'; }
};

Outcome equality_oracle() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::size_t equal_pairs = 0;
  for (std::size_t i = 0; i < 10000; ++i) {
    auto a = generate(rng(), 5, 0.1, N, {N});
    long at = -1;  // equal by construction, no shared nodes
    if (i % 3 == 1) at = static_cast<long>(rng() % a.term.size());  // one literal changed, if it lands on one
    const Term b = i % 3 == 2 ? generate(rng(), 5, 0.1, N, {N}).term : rebuild(a.term, at);
    const bool eq = term_eq(a.term, b);
    o.require(eq == testkit::naive_eq(a.term, b), "term_eq disagrees with naive_eq on " + dump_core(a.term));
    if (i % 3 == 0) o.require(eq, "a rebuilt copy compared unequal");
    if (eq) ++equal_pairs;

    RecordingProbe p;
    term_eq(a.term, b, p);
    // Each invocation starts with exactly one tag comparison, and every
    // recursion is immediately followed by the callee's tag comparison.
    std::size_t tags = 0, recs = 0;
    bool shape = !p.log.empty() && p.log[0] == 'T';
    for (std::size_t k = 0; k < p.log.size(); ++k) {
      if (p.log[k] == 'T') ++tags;
      if (p.log[k] == 'R') {
        ++recs;
        shape = shape && k + 1 < p.log.size() && p.log[k + 1] == 'T';
      }
    }
    o.require(shape && tags == recs + 1, "dispatch log " + p.log.substr(0, 40));
    if (!o.ok) return o;
  }
  // Different heads: a single tag comparison and no recursion.
  RecordingProbe p;
  term_eq(Term::var(0, N), Term::lam(N, Term::var(0, N)), p);
  o.require(p.log == "T", "mixed heads did more than one tag comparison");
  if (o.ok) o.detail = "10000 pairs, " + std::to_string(equal_pairs) + " equal";
  return o;
}

Outcome evidence_soundness() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> val(0, 60), len(0, 8);
  for (int i = 0; i < 10000; ++i) {
    const Nat x(val(rng)), y(val(rng));
    auto r = is_gt(x, y);
    o.require(r.is_yes() == (x > y), "is_gt decided wrongly");
    if (r.is_yes()) {
      o.require(r.yes().check() && r.yes().y + r.yes().diff == x && r.yes().x == x, "yes evidence");
    } else {
      o.require(r.no().check() && r.no().x + r.no().diff == y && r.no().y == y, "no evidence");
    }

    std::vector<int> xs(static_cast<std::size_t>(len(rng)));
    const int bound = val(rng) % 10;
    for (int& v : xs) v = val(rng) % 12;
    auto pred = [&](int v) { return is_gt(Nat(v), Nat(bound)); };
    const bool exists = std::any_of(xs.begin(), xs.end(), [&](int v) { return v > bound; });
    const bool forall = std::all_of(xs.begin(), xs.end(), [&](int v) { return v > bound; });
    auto any = decide_any(pred, xs);
    auto all = decide_all(pred, xs);
    o.require(any.is_yes() == exists && all.is_yes() == forall, "decide_any/all disagree with exists/forall");
    if (any.is_yes()) {
      o.require(xs[any.yes().index] > bound && any.yes().evidence.check(), "any witness");
      for (std::size_t k = 0; k < any.yes().index; ++k) o.require(xs[k] <= bound, "any witness is not leftmost");
    } else {
      o.require(any.no().size() == xs.size(), "any refutation has the wrong length");
      for (const auto& e : any.no()) o.require(e.check(), "any refutation evidence");
    }
    if (all.is_yes()) {
      o.require(all.yes().size() == xs.size(), "all evidence has the wrong length");
    } else {
      o.require(xs[all.no().index] <= bound && all.no().evidence.check(), "all counterexample");
    }
    if (!o.ok) return o;
  }
  // Empty lists: any is a No with an empty refutation list, all is a Yes with an empty proof list.
  auto gt0 = [](int v) { return is_gt(Nat(v), Nat(0)); };
  auto any = decide_any(gt0, std::vector<int>{});
  auto all = decide_all(gt0, std::vector<int>{});
  o.require(any.is_no() && any.no().empty(), "empty decide_any");
  o.require(all.is_yes() && all.yes().empty(), "empty decide_all");
  return o;
}

Outcome pipeline_smoke() {
  Outcome o;
  const std::string exe = VELO_EXE;
  struct Row {
    std::string expr;
    int code;
    std::string output;
  };
  const std::vector<Row> rows = {
      {"1 + 2 * 3", 0, "= 7\n"},
      {"twice square 3", 0, "= 81\n"},
      {"1 + ?h", 2, "blocked on ?h : Nat in ε\n"},
      {"?h + 1", 2, "blocked on ?h : Nat in ε\n"},
      {"(\\x : Nat => x) true", 1,
       "<eval>:1:17: error: mismatch\n  expected: Nat\n  actual:   Bool\n  path:     []\n"},
  };
  for (const Row& r : rows) {
    const std::string cmd = exe + " --eval " + quote(r.expr) + " 2>&1";
    const Run first = shell(cmd), second = shell(cmd);
    o.require(first.status == r.code, r.expr + ": exit " + std::to_string(first.status));
    o.require(first.output == r.output, r.expr + ": output " + first.output);
    o.require(first.output == second.output && first.status == second.status, r.expr + ": not byte-stable");
  }

  const fs::path dir(VELO_GOLDEN_DIR);
  const Run bad = shell(quote(exe) + " " + quote((dir / "files" / "bad.velo").string()) + " < /dev/null 2>&1");
  o.require(bad.status == 1, "loading a file with a type error: exit " + std::to_string(bad.status));
  o.require(bad.output.find("error: mismatch") != std::string::npos, "loading a file with a type error: " + bad.output);

  std::size_t goldens = 0;
  std::vector<fs::path> inputs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".in") inputs.push_back(e.path());
  std::sort(inputs.begin(), inputs.end());
  for (const fs::path& in : inputs) {
    fs::path out = in;
    out.replace_extension(".out");
    const Run r = shell("cd " + quote(dir.string()) + " && " + quote(exe) + " --echo < " + quote(in.filename().string()) + " 2>&1");
    o.require(r.status == 0, in.filename().string() + ": exit " + std::to_string(r.status));
    o.require(r.output == slurp(out), in.filename().string() + ": transcript differs");
    ++goldens;
  }
  o.require(goldens >= 5, "golden suite is missing");
  if (o.ok) o.detail = std::to_string(rows.size()) + " --eval cases, " + std::to_string(goldens) + " transcripts";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"hole reconciliation worked example", hole_reconciliation},
      {"fold and cse preserve evaluation", pass_soundness},
      {"passes and steps preserve typing; progress", type_preservation},
      {"folding laws and rule coverage", folding_laws},
      {"thinning algebra", thinning_algebra},
      {"term_eq against naive equality; linear dispatch", equality_oracle},
      {"evidence soundness of decisions", evidence_soundness},
      {"CLI exit codes and golden transcripts", pipeline_smoke},
  };
  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << (o.ok ? "PASS" : "FAIL") << ' ' << index << ' ' << c.name;
    if (!o.detail.empty()) std::cout << " (" << o.detail << ')';
    std::cout << '\n' << std::flush;
    if (!o.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
