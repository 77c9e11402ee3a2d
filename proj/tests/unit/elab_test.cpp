#include <gtest/gtest.h>

#include <functional>

#include "testkit/testkit.hpp"
#include "velo/check.hpp"
#include "velo/elab.hpp"
#include "velo/equality.hpp"
#include "velo/print.hpp"
#include "velo/syntax/parser.hpp"

using namespace velo;
using namespace velo::elab;

namespace {

const Ty N = Ty::nat();
const Ty B = Ty::boolean();

DecInfo<TypeError, Elaborated> elab_src(const std::string& src, const Scope& scope = {}, const Globals& g = {}) {
  return elaborate(syntax::parse_term(src), scope, g);
}

Elaborated ok(const std::string& src, const Scope& scope = {}) {
  auto r = elab_src(src, scope);
  if (r.is_no()) ADD_FAILURE() << src << ": " << kind_name(r.no().kind);
  return std::move(r).yes();
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

const char* kWorked = "\\a : Nat => (\\x : Nat => ?h) a + (\\y : Nat => ?h) a";

}  // namespace

TEST(Elaborate, Arithmetic) {
  auto e = ok("1 + 2");
  EXPECT_TRUE(term_eq(e.term, Term::call(Prim::add(), {Term::nat(1), Term::nat(2)})));
  EXPECT_TRUE(e.store.empty());
}

TEST(Elaborate, ApplicationMismatch) {
  auto r = elab_src("(\\x : Nat => x) true");
  ASSERT_TRUE(r.is_no());
  EXPECT_EQ(r.no().kind, TypeError::Kind::Mismatch);
  EXPECT_EQ(*r.no().expected, N);
  EXPECT_EQ(*r.no().actual, B);
  EXPECT_TRUE(r.no().path.empty());
  EXPECT_EQ(r.no().span, (syntax::Span{16, 20}));
}

TEST(Elaborate, MismatchPathInsideArrows) {
  auto r = elab_src("(\\f : Nat -> Nat => f 1) (\\n : Nat => true)");
  ASSERT_TRUE(r.is_no());
  EXPECT_EQ(r.no().kind, TypeError::Kind::Mismatch);
  EXPECT_EQ(r.no().path, (Path{}));  // reported at the body, where Nat meets Bool
  auto s = elab_src("\\g : (Nat -> Nat) -> Nat => g (\\n : Nat => true)");
  ASSERT_TRUE(s.is_no());
}

TEST(Elaborate, UnboundVariableListsScope) {
  auto r = elab_src("\\a : Nat => \\b : Bool => f a");
  ASSERT_TRUE(r.is_no());
  EXPECT_EQ(r.no().kind, TypeError::Kind::UnboundVariable);
  EXPECT_EQ(r.no().name, "f");
  EXPECT_EQ(r.no().in_scope, (std::vector<std::string>{"a", "b"}));
}

TEST(Elaborate, OtherErrors) {
  EXPECT_EQ(elab_src("true 1").no().kind, TypeError::Kind::NotAFunction);
  EXPECT_EQ(elab_src("?h").no().kind, TypeError::Kind::CannotInferHole);
  auto conflict = elab_src("\\a : Nat => (?h + 1) * (\\b : Bool => 0) (!?h)");
  ASSERT_TRUE(conflict.is_no());
  EXPECT_EQ(conflict.no().kind, TypeError::Kind::HoleTypeConflict);
  EXPECT_EQ(conflict.no().name, "h");
}

TEST(Elaborate, LetDesugarsToApplication) {
  auto e = ok("let x = 2 in x * x");
  ASSERT_EQ(e.term.tag(), Term::Tag::Call);
  EXPECT_EQ(e.term.call_prim(), Prim::app(N, N));
  EXPECT_EQ(e.term.call_args()[0].tag(), Term::Tag::Lam);
  EXPECT_EQ(dump_core(e.term), "(call app (lam Nat (call mul (var 0) (var 0))) (nat 2))");
}

TEST(Elaborate, Globals) {
  Globals g;
  g.emplace("two", GlobalDef{Term::nat(2), {}});
  auto r = elab_src("\\a : Nat => a + two", {}, g);
  ASSERT_TRUE(r.is_yes());
  EXPECT_EQ(dump_core(r.yes().term), "(lam Nat (call add (var 0) (nat 2)))");

  MetaStore holey;
  holey.add(Meta{"k", {}, N, {}});
  g.emplace("bad", GlobalDef{Term::met(0, thin_id({}), N), holey});
  auto h = elab_src("bad + 1", {}, g);
  ASSERT_TRUE(h.is_no());
  EXPECT_EQ(h.no().kind, TypeError::Kind::HoleyDefinition);

  // Locals shadow globals.
  auto s = elab_src("\\two : Bool => two", {}, g);
  EXPECT_EQ(s.yes().term.ty(), Ty::arrow(B, B));
}

TEST(Elaborate, ScopeFromOutside) {
  const Scope scope{{N, B}, {"n", "b"}, {}};
  auto e = ok("b && true", scope);
  EXPECT_EQ(dump_core(e.term), "(call and (var 0) (bool true))");
}

TEST(Holes, WorkedExampleReconcilesToCommonPrefix) {
  auto e = ok(kWorked);
  ASSERT_EQ(e.store.size(), 1u);
  const Meta& h = e.store[0];
  EXPECT_EQ(h.name, "h");
  EXPECT_EQ(h.ctx, (Context{N}));
  EXPECT_EQ(h.ty, N);
  EXPECT_EQ(h.binder_names, std::vector<std::string>{"a"});
  int seen = 0;
  each_met(e.term, [&](const Term& m) {
    ++seen;
    EXPECT_EQ(m.met_embed().bits(), "10");
    EXPECT_EQ(m.met_embed().target(), (Context{N, N}));
  });
  EXPECT_EQ(seen, 2);
  EXPECT_TRUE(validate_term(e.term, {}, e.store).is_yes());
}

TEST(Holes, SameBinderKeepsFullContext) {
  auto e = ok("\\a : Nat => \\b : Nat => ?h + ?h * b");
  ASSERT_EQ(e.store.size(), 1u);
  EXPECT_EQ(e.store[0].ctx, (Context{N, N}));
}

TEST(Holes, MetasInFirstOccurrenceOrder) {
  auto e = ok("\\a : Nat => ?z + ?y + ?z + ?x");
  ASSERT_EQ(e.store.size(), 3u);
  EXPECT_EQ(e.store[0].name, "z");
  EXPECT_EQ(e.store[1].name, "y");
  EXPECT_EQ(e.store[2].name, "x");
}

TEST(Holes, ReconciledToTheScopeBothOccurrencesShare) {
  auto e = ok("\\a : Nat => (\\b : Bool => \\c : Nat => ?h + c) true 1 + (\\b : Bool => ?h * 2) false");
  ASSERT_EQ(e.store.size(), 1u);
  EXPECT_EQ(e.store[0].ctx, (Context{N}));
}

TEST(Fill, ReplacementMentioningBranchVariableIsRejected) {
  auto e = ok(kWorked);
  const Meta& h = e.store[0];
  const Scope scope{h.ctx, h.binder_names, {}};
  auto with_x = elaborate(syntax::parse_term("x"), scope, {}, h.ty);
  ASSERT_TRUE(with_x.is_no());
  EXPECT_EQ(with_x.no().kind, TypeError::Kind::UnboundVariable);
  EXPECT_EQ(with_x.no().name, "x");
  EXPECT_EQ(with_x.no().in_scope, std::vector<std::string>{"a"});

  // Even a well-typed core term over the longer context does not fit.
  const Elaborated over_x{Term::var(0, N), {}};
  auto direct = fill_hole(e.term, e.store, "h", over_x, {N, N});
  ASSERT_TRUE(direct.is_no());
  EXPECT_EQ(direct.no().kind, TypeError::Kind::Mismatch);
}

TEST(Fill, VarZeroBecomesVarOneUnderBothBinders) {
  auto e = ok(kWorked);
  auto a = elaborate(syntax::parse_term("a"), Scope{{N}, {"a"}, {}}, {}, N);
  ASSERT_TRUE(a.is_yes());
  auto f = fill_hole(e.term, e.store, "h", a.yes(), {N});
  ASSERT_TRUE(f.is_yes());
  EXPECT_TRUE(f.yes().store.empty());
  EXPECT_EQ(dump_core(f.yes().term),
            "(lam Nat (call add (call app (lam Nat (var 1)) (var 0)) (call app (lam Nat (var 1)) (var 0))))");
  EXPECT_EQ(f.yes().term.ty(), e.term.ty());
  EXPECT_TRUE(validate_term(f.yes().term).is_yes());
}

TEST(Fill, FreshHoleTakesThePlaceOfTheOldOne) {
  auto e = ok("\\a : Nat => ?m * ?n + a");
  ASSERT_EQ(e.store.size(), 2u);
  auto r = elaborate(syntax::parse_term("?q + 1"), Scope{{N}, {"a"}, {}}, {}, N);
  ASSERT_TRUE(r.is_yes());
  auto f = fill_hole(e.term, e.store, "m", r.yes(), {N});
  ASSERT_TRUE(f.is_yes());
  ASSERT_EQ(f.yes().store.size(), 2u);
  EXPECT_EQ(f.yes().store[0].name, "q");
  EXPECT_EQ(f.yes().store[1].name, "n");
  EXPECT_TRUE(validate_term(f.yes().term, {}, f.yes().store).is_yes());
  EXPECT_EQ(dump_core(f.yes().term, f.yes().store),
            "(lam Nat (call add (call mul (call add (meta q (thin \"1\")) (nat 1)) (meta n (thin \"1\"))) (var 0)))");
}

TEST(Fill, IllTypedReplacementLeavesTermUnchanged) {
  auto e = ok(kWorked);
  const std::string before = dump_core(e.term, e.store);
  const Elaborated t{Term::boolean(true), {}};
  auto f = fill_hole(e.term, e.store, "h", t, {N});
  ASSERT_TRUE(f.is_no());
  EXPECT_EQ(f.no().kind, TypeError::Kind::Mismatch);
  EXPECT_EQ(dump_core(e.term, e.store), before);
  EXPECT_EQ(fill_hole(e.term, e.store, "nope", t, {N}).no().kind, TypeError::Kind::UnknownHole);
  // Replacement holes may not collide with existing ones.
  auto two = ok("\\a : Nat => ?m + ?n");
  MetaStore s;
  s.add(Meta{"n", {N}, N, {"a"}});
  const Elaborated clash{Term::met(0, thin_id({N}), N), s};
  EXPECT_EQ(fill_hole(two.term, two.store, "m", clash, {N}).no().kind, TypeError::Kind::DuplicateHole);
}

// Core terms printed as surface syntax elaborate back to well-formed terms
// whose holes live in a prefix of every occurrence context.
TEST(Property, ElaborationOfPrintedTerms) {
  int elaborated = 0;
  for (std::uint64_t seed = 1; seed <= 3000; ++seed) {
    testkit::GenConfig cfg;
    cfg.seed = seed;
    cfg.max_depth = 4;
    cfg.hole_probability = seed % 2 ? 0.15 : 0.0;
    const Ty ty = seed % 3 == 0 ? Ty::arrow(N, N) : (seed % 3 == 1 ? N : B);
    auto g = testkit::gen_term(cfg, ty);
    const std::string text = show_term(g.term, g.store);
    auto r = elaborate(syntax::parse_term(text), {}, {}, ty);
    if (g.store.empty()) {
      ASSERT_TRUE(r.is_yes()) << text;
      ASSERT_TRUE(term_eq(r.yes().term, g.term)) << text;
    }
    if (r.is_no()) {
      // Only hole typing can fail on printed well-typed terms.
      const auto k = r.no().kind;
      ASSERT_TRUE(k == TypeError::Kind::CannotInferHole || k == TypeError::Kind::HoleTypeConflict) << text;
      continue;
    }
    ++elaborated;
    const auto& e = r.yes();
    ASSERT_TRUE(validate_term(e.term, {}, e.store).is_yes()) << text;
    ASSERT_EQ(infer_ty(e.term, {}, e.store), ty);
    each_met(e.term, [&](const Term& m) {
      EXPECT_TRUE(e.store[m.met_ref()].ctx.is_prefix_of(m.met_embed().target()));
    });

    // Filling every hole with a closed literal removes all metas.
    Elaborated cur = e;
    while (!cur.store.empty()) {
      const Meta m = cur.store[0];
      if (m.ty.is_arrow()) break;
      const Elaborated lit{m.ty == N ? Term::nat(1) : Term::boolean(true), {}};
      auto f = fill_hole(cur.term, cur.store, m.name, lit, m.ctx);
      ASSERT_TRUE(f.is_yes());
      ASSERT_EQ(f.yes().store.size(), cur.store.size() - 1);
      ASSERT_EQ(f.yes().term.ty(), ty);
      cur = std::move(f).yes();
      ASSERT_TRUE(validate_term(cur.term, {}, cur.store).is_yes());
    }
    if (cur.store.empty()) {
      ASSERT_FALSE(cur.term.has_meta());
    }
  }
  EXPECT_GT(elaborated, 2000);
}
