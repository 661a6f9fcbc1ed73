#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "support.hpp"
#include "unwind/pattern.hpp"
#include "unwind/statics.hpp"

using namespace unwind;
using testsupport::raw_exp;
using testsupport::Rng;

namespace {

const FunctionSpec kId(unit1(), unit1(), var(0));
const FunctionSpec kSelf(unit1(), unit1(), app(var(1), var(0)));
const FunctionSpec kNested(unit1(), unit1(),
                           letin(fun(unit1(), unit1(), app(var(3), var(0))), var(1)));

// Brute-force oracle for the hole decision of of^n: enumerate unrollings up
// to a size-derived bound and compare. Independent of of_check's fixpoint
// and monotonicity reasoning.
bool oracle_hole_match(const FunctionSpec& spec, std::uint64_t n, const Exp& e) {
  if (equal(e, unroll(spec, UnrollDepth::omega()))) return true;
  std::uint64_t bound = n + e.size() + 4;
  for (std::uint64_t j = n; j <= bound; ++j)
    if (equal(e, unroll(spec, UnrollDepth::finite(j)))) return true;
  return false;
}

}  // namespace

TEST_CASE("unrolling shapes") {
  CHECK(unroll(kSelf, UnrollDepth::finite(0)) ==
        fun(unit1(), unit1(), app(var(1), var(0))));
  CHECK(unroll(kSelf, UnrollDepth::omega()) == kSelf.as_fun());
  // F_1 of the self-application body applies F_0 to the argument
  CHECK(unroll(kSelf, UnrollDepth::finite(1)) ==
        fun(unit1(), unit1(),
            app(fun(unit1(), unit1(), app(var(1), var(0))), var(0))));
}

TEST_CASE("unused self-reference reaches a fixpoint immediately") {
  CHECK(unroll(kId, UnrollDepth::finite(1)) == fun(unit1(), unit1(), var(0)));
  CHECK(unroll(kId, UnrollDepth::finite(1)) == unroll(kId, UnrollDepth::finite(2)));
  CHECK(unroll(kId, UnrollDepth::finite(0)) != unroll(kId, UnrollDepth::finite(1)));
}

TEST_CASE("unrollings typecheck at the function type") {
  for (const FunctionSpec& spec : {kId, kSelf, kNested}) {
    REQUIRE(validate_spec(spec));
    for (std::uint64_t i = 0; i < 6; ++i) {
      TypeResult r =
          type_of(spec, TypingContext{}, unroll(spec, UnrollDepth::finite(i)));
      REQUIRE(r.ok());
      CHECK(r.type() == arrow(spec.arg_ty, spec.ret_ty));
    }
  }
}

TEST_CASE("pattern values") {
  CHECK(is_pattern_value(pathole()));
  CHECK(is_pattern_value(pair_(pathole(), triv())));
  CHECK(is_pattern_value(pack(unit1(), pathole(), exists(var(0)))));
  CHECK_FALSE(is_pattern_value(app(pathole(), triv())));
  CHECK_FALSE(is_value(pair_(pathole(), triv())));  // term judgment differs
}

TEST_CASE("pattern stepping contracts the hole application") {
  StepOutcome out = pattern_step(kId, EvalContext::empty(), app(pathole(), triv()));
  REQUIRE(out.is_stepped());
  CHECK(*out.next == subst2(kId.body, pathole(), triv()));
  CHECK(*out.next == triv());
  CHECK(out.rule == "unroll-hole");

  // hole-free terms step exactly as in the term dynamics
  out = pattern_step(kId, EvalContext::empty(),
                     app(fun(unit1(), unit1(), var(0)), triv()));
  REQUIRE(out.is_stepped());
  CHECK(*out.next == triv());

  // self application re-applies the hole
  out = pattern_step(kSelf, EvalContext::empty(), app(pathole(), triv()));
  REQUIRE(out.is_stepped());
  CHECK(*out.next == app(pathole(), triv()));
}

TEST_CASE("pattern argument must be a pattern value before contracting") {
  Exp p = app(pathole(), app(fun(unit1(), unit1(), var(0)), triv()));
  StepOutcome out = pattern_step(kId, EvalContext::empty(), p);
  REQUIRE(out.is_stepped());
  CHECK(*out.next == app(pathole(), triv()));
}

TEST_CASE("fill replaces every hole with the chosen unrolling") {
  CHECK(fill(pathole(), kSelf, UnrollDepth::omega()) == kSelf.as_fun());
  CHECK(fill(triv(), kSelf, UnrollDepth::finite(3)) == triv());
  Exp f1 = unroll(kSelf, UnrollDepth::finite(1));
  CHECK(fill(app(pathole(), triv()), kSelf, UnrollDepth::finite(1)) ==
        app(f1, triv()));
  CHECK(fill(pair_(pathole(), pathole()), kId, UnrollDepth::finite(2)) ==
        pair_(unroll(kId, UnrollDepth::finite(2)), unroll(kId, UnrollDepth::finite(2))));
}

TEST_CASE("of_check hole decision examples") {
  for (const FunctionSpec& spec : {kId, kSelf, kNested}) {
    CHECK(of_check(spec, 5, unroll(spec, UnrollDepth::omega()), pathole()));
    CHECK(of_check(spec, 2, unroll(spec, UnrollDepth::finite(2)), pathole()));
    CHECK_FALSE(of_check(spec, 0, triv(), pathole()));
  }
  // distinct unrollings sit strictly below the required minimum
  for (const FunctionSpec& spec : {kSelf, kNested})
    CHECK_FALSE(of_check(spec, 3, unroll(spec, UnrollDepth::finite(2)), pathole()));
  // with an unused self-reference the chain is constant from depth 1 on, so
  // the depth-2 unrolling also is the depth-3 unrolling
  CHECK(of_check(kId, 3, unroll(kId, UnrollDepth::finite(2)), pathole()));
  CHECK_FALSE(of_check(kId, 3, unroll(kId, UnrollDepth::finite(0)), pathole()));
}

TEST_CASE("of_check congruence") {
  Exp fw = kSelf.as_fun();
  CHECK(of_check(kSelf, 0, app(fw, triv()), app(pathole(), triv())));
  CHECK_FALSE(of_check(kSelf, 0, app(fw, triv()), app(pathole(), pathole())));
  CHECK(of_check(kSelf, 0, pair_(fw, fw), pair_(pathole(), pathole())));
  // mixed depths: minimum must hold at every hole
  Exp f1 = unroll(kSelf, UnrollDepth::finite(1));
  Exp f3 = unroll(kSelf, UnrollDepth::finite(3));
  CHECK(of_check(kSelf, 1, pair_(f1, f3), pair_(pathole(), pathole())));
  CHECK_FALSE(of_check(kSelf, 2, pair_(f1, f3), pair_(pathole(), pathole())));
  // holes under binders need no index bookkeeping: the hole is global
  CHECK(of_check(kSelf, 0, fun(unit1(), unit1(), app(fw, var(0))),
                 fun(unit1(), unit1(), app(pathole(), var(0)))));
}

TEST_CASE("of_check recurses into captured continuations") {
  Exp e_shape = letin(ctxhole(), app(kSelf.as_fun(), var(0)));
  Exp p_shape = letin(ctxhole(), app(pathole(), var(0)));
  CHECK(of_check(kSelf, 0, contval(unit1(), e_shape), contval(unit1(), p_shape)));
  CHECK_FALSE(of_check(kSelf, 0, contval(unit1(), e_shape), contval(void0(), p_shape)));
}

TEST_CASE("of_check agrees with the brute-force oracle") {
  for (const FunctionSpec& spec : {kId, kSelf, kNested}) {
    for (std::uint64_t i = 0; i <= 8; ++i) {
      Exp fi = unroll(spec, UnrollDepth::finite(i));
      for (std::uint64_t n = 0; n <= 8; ++n) {
        CAPTURE(i, n);
        REQUIRE(of_check(spec, n, fi, pathole()) == oracle_hole_match(spec, n, fi));
      }
    }
    Exp fw = unroll(spec, UnrollDepth::omega());
    for (std::uint64_t n = 0; n <= 8; ++n)
      REQUIRE(of_check(spec, n, fw, pathole()) == oracle_hole_match(spec, n, fw));
  }
}

TEST_CASE("construction soundness: filled patterns match their pattern") {
  Rng rng(42);
  for (const FunctionSpec& spec : {kId, kSelf, kNested}) {
    for (int c = 0; c < 150; ++c) {
      Exp p = raw_exp(rng, 3);
      std::uint64_t n = rng.below(4);
      std::uint64_t i = n + rng.below(4);
      REQUIRE(of_check(spec, n, fill(p, spec, UnrollDepth::finite(i)), p));
      REQUIRE(of_check(spec, n, fill(p, spec, UnrollDepth::omega()), p));
    }
  }
}

TEST_CASE("decrement: of at n+1 implies of at n") {
  Rng rng(43);
  for (int c = 0; c < 400; ++c) {
    const FunctionSpec& spec = (c % 2 == 0) ? kSelf : kNested;
    Exp p = raw_exp(rng, 3);
    std::uint64_t n = rng.below(5);
    Exp e = fill(p, spec, rng.coin() ? UnrollDepth::omega()
                                     : UnrollDepth::finite(n + 1 + rng.below(3)));
    if (of_check(spec, n + 1, e, p)) REQUIRE(of_check(spec, n, e, p));
  }
}

TEST_CASE("reflexivity: hole-free expressions match themselves at any depth") {
  Rng rng(44);
  for (int c = 0; c < 400; ++c) {
    Exp e = raw_exp(rng, 3);
    if (e.has_pathole()) continue;
    REQUIRE(of_check(kSelf, rng.below(6), e, e));
  }
}

TEST_CASE("compose: of is preserved by plugging") {
  Rng rng(45);
  for (int c = 0; c < 300; ++c) {
    const FunctionSpec& spec = (c % 2 == 0) ? kSelf : kNested;
    std::uint64_t n = rng.below(3);
    std::uint64_t i = n + rng.below(3);
    // pattern-side context and term with holes; term side filled at depth i
    Exp p_shape = testsupport::raw_ctx_shape(rng, rng.below(3));
    Exp p = raw_exp(rng, 3);
    Exp e_shape = fill(p_shape, spec, UnrollDepth::finite(i));
    Exp e = fill(p, spec, UnrollDepth::finite(i));
    EvalContext P(p_shape), E(e_shape);
    REQUIRE(of_check(spec, n, e_shape, p_shape));
    REQUIRE(of_check(spec, n, e, p));
    REQUIRE(of_check(spec, n, plug(E, e), plug(P, p)));
  }
}

TEST_CASE("value transfer: related values agree on valueness") {
  Rng rng(46);
  for (int c = 0; c < 500; ++c) {
    const FunctionSpec& spec = (c % 2 == 0) ? kId : kSelf;
    Exp p = raw_exp(rng, 3);
    std::uint64_t n = rng.below(3);
    Exp v = fill(p, spec, rng.coin() ? UnrollDepth::omega() : UnrollDepth::finite(n));
    REQUIRE(of_check(spec, n, v, p));
    REQUIRE(is_value(v) == is_pattern_value(p));
  }
}

TEST_CASE("pattern_run reaches pattern values") {
  RunResult r = pattern_run(kId, app(pathole(), triv()), 10);
  REQUIRE(r.terminated());
  CHECK(*r.term == triv());
  CHECK(r.steps == 1);

  r = pattern_run(kSelf, app(pathole(), triv()), 10);
  CHECK(r.self_loop());

  r = pattern_run(kId, pathole(), 10);
  REQUIRE(r.terminated());
  CHECK(r.steps == 0);
}
