#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "unwind/statics.hpp"

using namespace unwind;
using testsupport::raw_exp;
using testsupport::Rng;

namespace {
FunctionSpec identity_spec() { return FunctionSpec(unit1(), unit1(), var(0)); }
FunctionSpec selfapp_spec() {
  return FunctionSpec(unit1(), unit1(), app(var(1), var(0)));
}
}  // namespace

TEST_CASE("wf_type examples") {
  TypingContext empty;
  CHECK(wf_type(empty, unit1()));
  CHECK(wf_type(empty, forall(arrow(var(0), var(0)))));
  CHECK_FALSE(wf_type(empty, var(0)));
  CHECK(wf_type(empty, contty(prod(unit1(), void0()))));
  CHECK(wf_type(empty, exists(arrow(var(0), unit1()))));
  CHECK_FALSE(wf_type(empty, forall(var(1))));
  CHECK_FALSE(wf_type(empty, triv()));  // term production
  TypingContext with_term;
  with_term.push_term(unit1());
  CHECK_FALSE(wf_type(with_term, var(0)));  // term entry, not a type var
}

TEST_CASE("typeof examples") {
  FunctionSpec spec(unit1(), prod(unit1(), unit1()), pair_(var(0), var(0)));
  TypingContext empty;

  TypeResult r = type_of(spec, empty, triv());
  REQUIRE(r.ok());
  CHECK(r.type() == unit1());

  r = type_of(spec, empty, pathole());
  REQUIRE(r.ok());
  CHECK(r.type() == arrow(spec.arg_ty, spec.ret_ty));

  TypingContext with_k;
  with_k.push_term(contty(unit1()));
  r = type_of(spec, with_k, throw_(triv(), var(0)));
  REQUIRE(r.ok());
  CHECK(r.type() == void0());

  r = type_of(spec, empty, fun(unit1(), unit1(), var(0)));
  REQUIRE(r.ok());
  CHECK(r.type() == arrow(unit1(), unit1()));
}

TEST_CASE("typeof is a function: repeated runs agree") {
  FunctionSpec spec = identity_spec();
  TypingContext empty;
  Exp e = letin(fun(unit1(), unit1(), var(0)), app(var(0), triv()));
  TypeResult a = type_of(spec, empty, e);
  TypeResult b = type_of(spec, empty, e);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(a.type() == b.type());
}

TEST_CASE("pattern hole type is independent of the context") {
  FunctionSpec spec(prod(unit1(), unit1()), unit1(), projl(var(0)));
  Rng rng(99);
  for (int i = 0; i < 50; ++i) {
    TypingContext ctx;
    for (std::uint64_t k = 0; k < rng.below(5); ++k) {
      if (rng.coin())
        ctx.push_type();
      else
        ctx.push_term(unit1());
    }
    TypeResult r = type_of(spec, ctx, pathole());
    REQUIRE(r.ok());
    CHECK(r.type() == arrow(spec.arg_ty, spec.ret_ty));
  }
}

TEST_CASE("let and scope stripping") {
  FunctionSpec spec = identity_spec();
  TypingContext empty;
  TypeResult r = type_of(spec, empty, letin(triv(), var(0)));
  REQUIRE(r.ok());
  CHECK(r.type() == unit1());
  // unbound variable
  r = type_of(spec, empty, letin(triv(), var(1)));
  CHECK_FALSE(r.ok());
}

TEST_CASE("polymorphism rules") {
  FunctionSpec spec = identity_spec();
  TypingContext empty;
  Exp poly_id = tlam(fun(var(0), var(0), var(0)));
  TypeResult r = type_of(spec, empty, poly_id);
  REQUIRE(r.ok());
  CHECK(r.type() == forall(arrow(var(0), var(0))));

  r = type_of(spec, empty, tapp(poly_id, unit1()));
  REQUIRE(r.ok());
  CHECK(r.type() == arrow(unit1(), unit1()));

  Exp packed = pack(unit1(), triv(), exists(var(0)));
  r = type_of(spec, empty, packed);
  REQUIRE(r.ok());
  CHECK(r.type() == exists(var(0)));

  r = type_of(spec, empty, open_(packed, triv()));
  REQUIRE(r.ok());
  CHECK(r.type() == unit1());

  // returning the opened value lets its abstract type escape
  r = type_of(spec, empty, open_(packed, var(0)));
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().rule == "open");
}

TEST_CASE("continuation rules") {
  FunctionSpec spec = identity_spec();
  TypingContext empty;

  TypeResult r = type_of(spec, empty, letcc(unit1(), triv()));
  REQUIRE(r.ok());
  CHECK(r.type() == unit1());

  // the bound continuation has type cont(annotation)
  r = type_of(spec, empty, letcc(unit1(), abort_(unit1(), throw_(triv(), var(0)))));
  REQUIRE(r.ok());
  CHECK(r.type() == unit1());

  Exp k = contval(unit1(), ctxhole());
  r = type_of(spec, empty, k);
  REQUIRE(r.ok());
  CHECK(r.type() == contty(unit1()));

  r = type_of(spec, empty, throw_(triv(), k));
  REQUIRE(r.ok());
  CHECK(r.type() == void0());

  // captured context must be closed and must type at the answer type
  CHECK_FALSE(type_of(spec, empty, contval(unit1(), app(ctxhole(), var(3)))).ok());
  CHECK_FALSE(type_of(spec, empty, contval(void0(), ctxhole())).ok());
}

TEST_CASE("type errors are values carrying the failing rule") {
  FunctionSpec spec = identity_spec();
  TypingContext empty;
  TypeResult r = type_of(spec, empty, app(triv(), triv()));
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().rule == "app");
  CHECK(r.error().subterm == app(triv(), triv()));

  r = type_of(spec, empty, throw_(triv(), triv()));
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().rule == "throw");

  r = type_of(spec, empty, unit1());
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().rule == "type-as-term");
}

TEST_CASE("typeof_ctx examples") {
  FunctionSpec spec = identity_spec();
  CHECK(type_of_ctx(spec, EvalContext::empty(), unit1()));
  CHECK_FALSE(type_of_ctx(spec, EvalContext::empty(), void0()));
  EvalContext E(abort_(unit1(), throw_(triv(), ctxhole())));
  CHECK(type_of_ctx(spec, E, contty(unit1())));
  CHECK_FALSE(type_of_ctx(spec, E, unit1()));
}

TEST_CASE("plug compatibility on hand-built contexts") {
  FunctionSpec spec = identity_spec();
  TypingContext empty;
  struct Case {
    Exp shape;
    Exp hole_ty;
    Exp filler;
  };
  Exp id = fun(unit1(), unit1(), var(0));
  Case cases[] = {
      {letin(ctxhole(), triv()), prod(unit1(), unit1()), pair_(triv(), triv())},
      {app(ctxhole(), triv()), arrow(unit1(), unit1()), id},
      {app(id, ctxhole()), unit1(), app(id, triv())},
      {projl(pair_(ctxhole(), triv())), unit1(), triv()},
      {abort_(unit1(), throw_(ctxhole(), contval(unit1(), ctxhole()))), unit1(), triv()},
  };
  for (const Case& c : cases) {
    EvalContext E(c.shape);
    REQUIRE(type_of_ctx(spec, E, c.hole_ty));
    TypeResult filler_ty = type_of(spec, empty, c.filler);
    REQUIRE(filler_ty.ok());
    REQUIRE(filler_ty.type() == c.hole_ty);
    TypeResult whole = type_of(spec, empty, plug(E, c.filler));
    REQUIRE(whole.ok());
    CHECK(whole.type() == unit1());
  }
}

TEST_CASE("hole-free terms type identically under any spec") {
  FunctionSpec a = identity_spec();
  FunctionSpec b(prod(unit1(), unit1()), unit1(), projl(var(0)));
  TypingContext empty;
  Rng rng(31);
  int typed = 0;
  for (int i = 0; i < 2000; ++i) {
    Exp e = testsupport::close_exp(raw_exp(rng, 3));
    if (e.has_pathole()) continue;
    TypeResult ra = type_of(a, empty, e);
    TypeResult rb = type_of(b, empty, e);
    REQUIRE(ra.ok() == rb.ok());
    if (ra.ok()) {
      ++typed;
      CHECK(ra.type() == rb.type());
    }
  }
  CHECK(typed > 0);  // raw corpus occasionally typechecks
}

TEST_CASE("validate_spec") {
  CHECK(validate_spec(identity_spec()));
  CHECK(validate_spec(selfapp_spec()));
  // x applied to f: ill-typed body
  FunctionSpec swapped(unit1(), unit1(), app(var(0), var(1)));
  CHECK_FALSE(validate_spec(swapped));
}
