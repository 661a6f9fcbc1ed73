#pragma once

// The pattern language: function unrollings F_0 / F_n / F_omega, pattern
// values and pattern stepping, hole filling, and a decision procedure for
// the indexed matching relation of^n between terms and patterns.
//
// A pattern is a term that may contain the pattern hole, a globally scoped
// stand-in for the function under study. of^n tracks one number: the
// minimum unrolling depth allowed at every hole position.

#include <cstdint>
#include <vector>

#include "unwind/dynamics.hpp"
#include "unwind/syntax.hpp"

namespace unwind {

/// F_0 = fun g(y). g y (diverges when called);
/// F_{n+1} = the spec body with F_n substituted for the self reference;
/// F_omega = the recursive function itself.
inline Exp unroll(const FunctionSpec& spec, const UnrollDepth& depth) {
  if (depth.is_omega()) return spec.as_fun();
  Exp cur = fun(spec.arg_ty, spec.ret_ty, app(var(1), var(0)));
  for (std::uint64_t i = 0; i < depth.depth(); ++i)
    cur = fun(spec.arg_ty, spec.ret_ty, subst(spec.body, 1, cur));
  return cur;
}

/// Memoizing unrolling supply for the of^n hole decision.
class Unroller {
 public:
  explicit Unroller(const FunctionSpec& spec) : spec_(spec), omega_(spec.as_fun()) {}

  const Exp& omega() const { return omega_; }
  const Exp& finite(std::uint64_t i) {
    while (memo_.size() <= i) {
      if (memo_.empty())
        memo_.push_back(fun(spec_.arg_ty, spec_.ret_ty, app(var(1), var(0))));
      else
        memo_.push_back(fun(spec_.arg_ty, spec_.ret_ty, subst(spec_.body, 1, memo_.back())));
    }
    return memo_[i];
  }

 private:
  FunctionSpec spec_;
  Exp omega_;
  std::vector<Exp> memo_;
};

/// Pattern values: the term values extended with the pattern hole, closed
/// compatibly through pairs and packs.
inline bool is_pattern_value(const Exp& p) { return detail::value_like(p, true); }

/// Pattern stepping: identical to the term dynamics except that the pattern
/// hole is a value and applying it to a pattern value contracts to the spec
/// body with the hole itself substituted for the self reference.
inline StepOutcome pattern_step(const FunctionSpec& spec, const EvalContext& P,
                                const Exp& p) {
  return detail::step_mode(spec, P, p, true);
}

/// Bounded pattern execution; Terminated means a pattern value was reached.
inline RunResult pattern_run(const FunctionSpec& spec, const Exp& p, std::uint64_t fuel) {
  return detail::run_mode(spec, p, fuel, true);
}

/// Replace every pattern hole in p by the chosen unrolling. Unrollings are
/// closed, so no index adjustment happens.
inline Exp fill(const Exp& p, const FunctionSpec& spec, const UnrollDepth& depth) {
  if (!p.has_pathole()) return p;
  struct Filler {
    const Exp& unrolling;
    Exp go(const Exp& e) const {
      if (!e.has_pathole()) return e;
      if (e.kind() == Kind::PatHole) return unrolling;
      return detail::map_children(e, [&](const Exp& kid, std::size_t) { return go(kid); });
    }
  };
  Exp unrolling = unroll(spec, depth);
  return Filler{unrolling}.go(p);
}

namespace detail {

// Decide whether e is F_omega or some F_i with i >= n. Enumerates finite
// unrollings upward from n; unrolling sizes are strictly increasing from
// depth 1 on unless the chain hits a fixpoint, and a fixpoint decides every
// larger depth, so the search terminates.
inline bool of_hole_match(Unroller& u, std::uint64_t n, const Exp& e) {
  if (e.kind() != Kind::Fun) return false;
  if (equal(e, u.omega())) return true;
  for (std::uint64_t i = n;; ++i) {
    Exp fi = u.finite(i);  // copy: the memo may reallocate below
    if (equal(e, fi)) return true;
    if (i >= 1 && fi.size() > e.size()) return false;
    if (equal(u.finite(i + 1), fi)) return false;  // fixpoint, no larger match
    if (i > n + (1u << 20))
      throw MalformedError("of_check: hole search failed to converge");
  }
}

inline bool of_rec(Unroller& u, std::uint64_t n, const Exp& e, const Exp& p) {
  if (p.kind() == Kind::PatHole) return of_hole_match(u, n, e);
  // away from holes the congruence degenerates to structural equality
  if (!p.has_pathole()) return equal(e, p);
  if (e.kind() != p.kind() || e.arity() != p.arity()) return false;
  for (std::size_t i = 0; i < p.arity(); ++i)
    if (!of_rec(u, n, e.child(i), p.child(i))) return false;
  return true;
}

}  // namespace detail

/// of^n: e matches p everywhere, and each subterm of e standing at a pattern
/// hole of p is F_omega or an unrolling of depth at least n.
inline bool of_check(const FunctionSpec& spec, std::uint64_t n, const Exp& e,
                     const Exp& p) {
  Unroller u(spec);
  return detail::of_rec(u, n, e, p);
}

/// of_check against a shared unrolling cache (same results, fewer rebuilds).
inline bool of_check(Unroller& u, std::uint64_t n, const Exp& e, const Exp& p) {
  return detail::of_rec(u, n, e, p);
}

}  // namespace unwind
