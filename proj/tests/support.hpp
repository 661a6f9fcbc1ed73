#pragma once

// Test-side helpers: a small seeded RNG, a raw (untyped) expression
// generator covering every constructor, and naive reference implementations
// of the index operations. The references deliberately avoid the shortcuts
// and metadata of the production code so they can serve as oracles.

#include <cstdint>
#include <vector>

#include "unwind/syntax.hpp"

namespace testsupport {

using unwind::Exp;
using unwind::Kind;

struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) { return next() % n; }
  bool coin() { return (next() & 1) != 0; }
};

// Arbitrary syntax tree, depth-bounded. Context holes are only emitted when
// allowed so context-shape invariants can be controlled by the caller.
inline Exp raw_exp(Rng& rng, unsigned depth, bool allow_ctxhole = false) {
  using namespace unwind;
  if (depth == 0) {
    switch (rng.below(allow_ctxhole ? 6 : 5)) {
      case 0: return var(rng.below(6));
      case 1: return triv();
      case 2: return unit1();
      case 3: return void0();
      case 4: return pathole();
      default: return ctxhole();
    }
  }
  auto sub = [&] { return raw_exp(rng, depth - 1, allow_ctxhole); };
  switch (rng.below(21)) {
    case 0: return arrow(sub(), sub());
    case 1: return prod(sub(), sub());
    case 2: return forall(sub());
    case 3: return exists(sub());
    case 4: return contty(sub());
    case 5: return letin(sub(), sub());
    case 6: return abort_(sub(), sub());
    case 7: return fun(sub(), sub(), sub());
    case 8: return app(sub(), sub());
    case 9: return pair_(sub(), sub());
    case 10: return projl(sub());
    case 11: return projr(sub());
    case 12: return tlam(sub());
    case 13: return tapp(sub(), sub());
    case 14: return pack(sub(), sub(), sub());
    case 15: return open_(sub(), sub());
    case 16: return letcc(sub(), sub());
    case 17: return throw_(sub(), sub());
    case 18: return contval(sub(), sub());
    case 19: return var(rng.below(6));
    default: return raw_exp(rng, 0, allow_ctxhole);
  }
}

// Close a raw term by wrapping let binders around it.
inline Exp close_exp(Exp e) {
  using namespace unwind;
  while (e.free_bound() > 0) e = letin(triv(), e);
  return e;
}

// A well-formed context shape: random frames stacked around the hole.
inline Exp raw_ctx_shape(Rng& rng, unsigned frames, unsigned component_depth = 2) {
  using namespace unwind;
  Exp shape = ctxhole();
  for (unsigned i = 0; i < frames; ++i) {
    Exp c = raw_exp(rng, component_depth, false);
    switch (rng.below(8)) {
      case 0: shape = app(shape, c); break;
      case 1: shape = app(c, shape); break;
      case 2: shape = letin(shape, c); break;
      case 3: shape = pair_(shape, c); break;
      case 4: shape = projl(shape); break;
      case 5: shape = throw_(shape, c); break;
      case 6: shape = abort_(c, shape); break;
      default: shape = tapp(shape, c); break;
    }
  }
  return shape;
}

// ---- naive reference operations (oracles) ----------------------------------

inline Exp ref_rebuild(const Exp& e, const std::vector<Exp>& kids) {
  switch (kids.size()) {
    case 0: return e;
    case 1: return Exp::make(e.kind(), 0, {kids[0]});
    case 2: return Exp::make(e.kind(), 0, {kids[0], kids[1]});
    default: return Exp::make(e.kind(), 0, {kids[0], kids[1], kids[2]});
  }
}

inline Exp ref_shift(const Exp& e, std::uint64_t cutoff, std::int64_t amount) {
  using namespace unwind;
  if (e.kind() == Kind::Var) {
    std::uint64_t i = e.var_index();
    if (i < cutoff) return e;
    if (amount < 0) {
      std::uint64_t drop = static_cast<std::uint64_t>(-amount);
      if (i - cutoff < drop) throw MalformedError("ref underflow");
      return var(i - drop);
    }
    return var(i + static_cast<std::uint64_t>(amount));
  }
  std::vector<Exp> kids;
  for (std::size_t i = 0; i < e.arity(); ++i)
    kids.push_back(ref_shift(e.child(i), cutoff + binder_count(e.kind(), i), amount));
  return ref_rebuild(e, kids);
}

// Textbook single substitution: the replacement is lifted one binder at a
// time while descending (a different composition path from production code).
inline Exp ref_subst(const Exp& e, std::uint64_t index, const Exp& repl) {
  using namespace unwind;
  if (e.kind() == Kind::Var) {
    std::uint64_t i = e.var_index();
    if (i == index) return repl;
    if (i > index) return var(i - 1);
    return e;
  }
  std::vector<Exp> kids;
  for (std::size_t i = 0; i < e.arity(); ++i) {
    unsigned b = binder_count(e.kind(), i);
    Exp r = repl;
    for (unsigned k = 0; k < b; ++k) r = ref_shift(r, 0, 1);
    kids.push_back(ref_subst(e.child(i), index + b, r));
  }
  return ref_rebuild(e, kids);
}

}  // namespace testsupport
