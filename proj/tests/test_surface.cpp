#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "unwind/generator.hpp"
#include "unwind/surface.hpp"

using namespace unwind;

namespace {
Exp must_parse(const char* src) {
  ParseResult r = parse(src);
  INFO(src);
  if (!r.ok()) {
    INFO(r.error().message << " at " << r.error().line << ":" << r.error().col);
    REQUIRE(r.ok());
  }
  return r.exp();
}
}  // namespace

TEST_CASE("parse basics") {
  CHECK(must_parse("()") == triv());
  CHECK(must_parse("unit") == unit1());
  CHECK(must_parse("void") == void0());
  CHECK(must_parse("@") == pathole());
  CHECK(must_parse("_") == ctxhole());
  CHECK(must_parse("(-> unit void)") == arrow(unit1(), void0()));
  CHECK(must_parse("(* unit unit)") == prod(unit1(), unit1()));
  CHECK(must_parse("(cont unit)") == contty(unit1()));
  CHECK(must_parse("(forall a (-> a a))") == forall(arrow(var(0), var(0))));
  CHECK(must_parse("(exists a a)") == exists(var(0)));
}

TEST_CASE("binders compile to indices") {
  CHECK(must_parse("(fun f (x : unit) : unit x)") == fun(unit1(), unit1(), var(0)));
  CHECK(must_parse("(fun f (x : unit) : unit (f x))") ==
        fun(unit1(), unit1(), app(var(1), var(0))));
  CHECK(must_parse("(let (x ()) (let (y ()) x))") ==
        letin(triv(), letin(triv(), var(1))));
  // shadowing resolves to the nearest binder
  CHECK(must_parse("(let (x ()) (let (x ()) x))") ==
        letin(triv(), letin(triv(), var(0))));
  CHECK(must_parse("(letcc (k : unit) (abort unit (throw () k)))") ==
        letcc(unit1(), abort_(unit1(), throw_(triv(), var(0)))));
  CHECK(must_parse("(tlam a (fun f (x : a) : a x))") ==
        tlam(fun(var(0), var(0), var(0))));
  CHECK(must_parse("(open (pack unit () (a a)) (b y) ())") ==
        open_(pack(unit1(), triv(), exists(var(0))), triv()));
  CHECK(must_parse("(pack unit () (a unit))") ==
        pack(unit1(), triv(), exists(unit1())));
  CHECK(must_parse("(tapp (tlam a ()) unit)") == tapp(tlam(triv()), unit1()));
}

TEST_CASE("application is any two-element list") {
  CHECK(must_parse("((fun f (x : unit) : unit x) ())") ==
        app(fun(unit1(), unit1(), var(0)), triv()));
  CHECK(must_parse("(@ ())") == app(pathole(), triv()));
}

TEST_CASE("comments and whitespace") {
  CHECK(must_parse("; header\n(pair () ; inline\n ())") == pair_(triv(), triv()));
}

TEST_CASE("parse errors carry positions") {
  ParseResult r = parse("(fun f (x : unit) : unit\n  y)");
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().message == "unbound name 'y'");
  CHECK(r.error().line == 2);
  CHECK(r.error().col == 3);

  r = parse("(pair ()");
  REQUIRE_FALSE(r.ok());
  r = parse("(pair () ()) ()");
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().message == "trailing input after expression");
  r = parse("(contval unit _)");
  REQUIRE_FALSE(r.ok());
  r = parse("(let (let ()) ())");
  REQUIRE_FALSE(r.ok());  // keyword as binder
  r = parse("(fst () ())");
  REQUIRE_FALSE(r.ok());
  r = parse("");
  REQUIRE_FALSE(r.ok());
  r = parse("zzz");
  REQUIRE_FALSE(r.ok());
  CHECK(r.error().message == "unbound name 'zzz'");
}

TEST_CASE("printing golden forms") {
  CHECK(print(fun(unit1(), unit1(), var(0))) == "(fun f0 (x1 : unit) : unit x1)");
  CHECK(print(letcc(unit1(), abort_(unit1(), throw_(triv(), var(0))))) ==
        "(letcc (x0 : unit) (abort unit (throw () x0)))");
  CHECK(print(app(pathole(), triv())) == "(@ ())");
  CHECK(print(contval(unit1(), letin(ctxhole(), triv()))) ==
        "(contval unit (let (x0 _) ()))");
  CHECK(print(forall(arrow(var(0), var(0)))) == "(forall a0 (-> a0 a0))");
  CHECK(print(pack(unit1(), triv(), exists(var(0)))) == "(pack unit () (a0 a0))");
  CHECK(print(var(2)) == "#2");  // free index, flagged
}

TEST_CASE("round trip on hand-written sources") {
  const char* sources[] = {
      "()",
      "(fun f (x : unit) : unit (f x))",
      "(let (x ()) (pair x x))",
      "(letcc (k : unit) (abort unit (throw () k)))",
      "(open (pack unit () (a a)) (b y) ())",
      "(tapp (tlam a (fun f (x : a) : a x)) (* unit unit))",
      "(@ (fst (pair () ())))",
      "(abort (cont void) (throw () (letcc (k : unit) ())))",
  };
  for (const char* s : sources) {
    Exp e = must_parse(s);
    Exp again = must_parse(print(e).c_str());
    CHECK(again == e);
  }
}

TEST_CASE("round trip on the generated corpus") {
  const FunctionSpec spec(unit1(), unit1(), app(var(1), var(0)));
  TypingContext empty;
  std::uint64_t checked = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    GenConfig cfg;
    cfg.seed = seed * 7919 + 13;
    cfg.max_size = 24;
    cfg.letcc_weight = 0.15;
    cfg.throw_weight = 0.15;
    cfg.hole_weight = seed % 2 ? 0.2 : 0.0;
    Generator g(cfg, spec);
    Exp ty = g.gen_type(empty);
    REQUIRE(parse(print(ty)).ok());
    REQUIRE(parse(print(ty)).exp() == ty);
    auto t = g.gen_term(empty, unit1());
    if (t) {
      ParseResult r = parse(print(*t));
      REQUIRE(r.ok());
      REQUIRE(r.exp() == *t);
      ++checked;
    }
    auto E = g.gen_ctx(unit1());
    if (E) {
      ParseResult r = parse(print(E->shape()));
      REQUIRE(r.ok());
      REQUIRE(r.exp() == E->shape());
    }
  }
  CHECK(checked > 150);
}

TEST_CASE("golden generator outputs, frozen for replayability") {
  TypingContext empty;
  const FunctionSpec spec(unit1(), unit1(), app(var(1), var(0)));
  GenConfig c42;
  c42.seed = 42;
  c42.max_size = 5;
  CHECK(print(gen_type(c42, empty)) == "unit");

  GenConfig c7;
  c7.seed = 7;
  c7.max_size = 12;
  auto t7 = gen_term(c7, spec, empty, arrow(unit1(), unit1()));
  REQUIRE(t7.has_value());
  CHECK(print(*t7) == "(fun f0 (x1 : unit) : unit (let (x2 (pair () ())) x1))");

  GenConfig c99;
  c99.seed = 99;
  c99.max_size = 20;
  c99.letcc_weight = 0.15;
  c99.throw_weight = 0.15;
  c99.hole_weight = 0.3;
  Generator g99(c99, spec);
  auto p99 = g99.gen_pattern_with_holes(1);
  REQUIRE(p99.has_value());
  CHECK(print(p99->first) ==
        "(fst (letcc (x0 : (* unit (-> unit unit))) (abort (* unit (-> unit "
        "unit)) (throw (pair () @) x0))))");
  CHECK(p99->second == 1);
}
