#pragma once

// Values and the three-part small-step relation E; e |-> e'. The stepping
// rules search for the redex by transferring frames from the term onto the
// evaluation context inside a single derivation, then contract and plug:
// one call is one contraction is one step. Evaluation is call-by-value,
// left to right in every two-evaluand form.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "unwind/syntax.hpp"

namespace unwind {

struct StepOutcome {
  enum class Tag { Stepped, IsValue, Stuck };
  Tag tag;
  std::optional<Exp> next;  // full program, Stepped only
  std::string rule;         // contraction name, or stuck reason

  static StepOutcome stepped(Exp program, std::string rule_name) {
    return StepOutcome{Tag::Stepped, std::move(program), std::move(rule_name)};
  }
  static StepOutcome value() { return StepOutcome{Tag::IsValue, std::nullopt, ""}; }
  static StepOutcome stuck(std::string reason) {
    return StepOutcome{Tag::Stuck, std::nullopt, std::move(reason)};
  }
  bool is_stepped() const { return tag == Tag::Stepped; }
  bool is_value() const { return tag == Tag::IsValue; }
  bool is_stuck() const { return tag == Tag::Stuck; }
};

/// Outcome of bounded execution.
struct RunResult {
  enum class Tag { Terminated, SelfLoop, FuelExhausted, Stuck };
  Tag tag;
  std::optional<Exp> term;  // value / looping state / last state / stuck state
  std::uint64_t steps;      // contractions done (SelfLoop: loop detected here)
  std::string reason;

  bool terminated() const { return tag == Tag::Terminated; }
  bool self_loop() const { return tag == Tag::SelfLoop; }
  bool fuel_exhausted() const { return tag == Tag::FuelExhausted; }
  bool stuck() const { return tag == Tag::Stuck; }
};

namespace detail {

inline bool value_like(const Exp& e, bool pattern_mode) {
  switch (e.kind()) {
    case Kind::Triv:
    case Kind::Fun:
    case Kind::TLam:
    case Kind::ContVal: return true;
    case Kind::Pair:
      return value_like(e.child(0), pattern_mode) && value_like(e.child(1), pattern_mode);
    case Kind::Pack: return value_like(e.child(1), pattern_mode);
    case Kind::PatHole: return pattern_mode;
    default: return false;
  }
}

inline StepOutcome step_mode(const FunctionSpec& spec, const EvalContext& E,
                             const Exp& e, bool pattern_mode) {
  if (value_like(e, pattern_mode)) return StepOutcome::value();

  auto descend = [&](Exp frame_shape, const Exp& focus) {
    return step_mode(spec, compose_ctx(E, EvalContext(std::move(frame_shape))), focus,
                     pattern_mode);
  };

  switch (e.kind()) {
    case Kind::App: {
      Exp fn = e.child(0), arg = e.child(1);
      if (!value_like(fn, pattern_mode)) return descend(app(ctxhole(), arg), fn);
      if (!value_like(arg, pattern_mode)) return descend(app(fn, ctxhole()), arg);
      if (fn.kind() == Kind::Fun)
        return StepOutcome::stepped(plug(E, subst2(fn.child(2), fn, arg)), "beta");
      if (pattern_mode && fn.kind() == Kind::PatHole)
        return StepOutcome::stepped(plug(E, subst2(spec.body, pathole(), arg)),
                                    "unroll-hole");
      return StepOutcome::stuck("application of a non-function value");
    }
    case Kind::LetIn: {
      Exp bound = e.child(0);
      if (!value_like(bound, pattern_mode))
        return descend(letin(ctxhole(), e.child(1)), bound);
      return StepOutcome::stepped(plug(E, subst(e.child(1), 0, bound)), "let");
    }
    case Kind::Abort: {
      Exp arg = e.child(1);
      if (!value_like(arg, pattern_mode))
        return descend(abort_(e.child(0), ctxhole()), arg);
      return StepOutcome::stuck("abort reached a value of the empty type");
    }
    case Kind::Pair: {
      // one component is a non-value or the whole pair would be a value
      Exp l = e.child(0);
      if (!value_like(l, pattern_mode)) return descend(pair_(ctxhole(), e.child(1)), l);
      return descend(pair_(l, ctxhole()), e.child(1));
    }
    case Kind::ProjL:
    case Kind::ProjR: {
      Exp arg = e.child(0);
      bool left = e.kind() == Kind::ProjL;
      if (!value_like(arg, pattern_mode))
        return descend(left ? projl(ctxhole()) : projr(ctxhole()), arg);
      if (arg.kind() != Kind::Pair)
        return StepOutcome::stuck("projection from a non-pair value");
      return StepOutcome::stepped(plug(E, arg.child(left ? 0 : 1)),
                                  left ? "projl" : "projr");
    }
    case Kind::TApp: {
      Exp fn = e.child(0);
      if (!value_like(fn, pattern_mode)) return descend(tapp(ctxhole(), e.child(1)), fn);
      if (fn.kind() != Kind::TLam)
        return StepOutcome::stuck("type application of a non-tlam value");
      return StepOutcome::stepped(plug(E, subst(fn.child(0), 0, e.child(1))), "tapp");
    }
    case Kind::Pack: {
      // payload is a non-value here, else the pack is a value
      return descend(pack(e.child(0), ctxhole(), e.child(2)), e.child(1));
    }
    case Kind::Open: {
      Exp scrut = e.child(0);
      if (!value_like(scrut, pattern_mode))
        return descend(open_(ctxhole(), e.child(1)), scrut);
      if (scrut.kind() != Kind::Pack)
        return StepOutcome::stuck("open of a non-pack value");
      return StepOutcome::stepped(
          plug(E, subst2(e.child(1), scrut.child(0), scrut.child(1))), "open");
    }
    case Kind::Letcc: {
      Exp captured = contval(e.child(0), E.shape());
      return StepOutcome::stepped(plug(E, subst(e.child(1), 0, captured)), "letcc");
    }
    case Kind::Throw: {
      Exp val = e.child(0), cont = e.child(1);
      if (!value_like(val, pattern_mode)) return descend(throw_(ctxhole(), cont), val);
      if (!value_like(cont, pattern_mode)) return descend(throw_(val, ctxhole()), cont);
      if (cont.kind() != Kind::ContVal)
        return StepOutcome::stuck("throw to a non-continuation value");
      return StepOutcome::stepped(plug(EvalContext(cont.child(1)), val), "throw-cont");
    }
    default:
      return StepOutcome::stuck(std::string("no rule for ") + kind_name(e.kind()));
  }
}

inline RunResult run_mode(const FunctionSpec& spec, const Exp& program,
                          std::uint64_t fuel, bool pattern_mode) {
  Exp cur = program;
  std::uint64_t steps = 0;
  for (;;) {
    if (value_like(cur, pattern_mode))
      return RunResult{RunResult::Tag::Terminated, cur, steps, ""};
    if (steps == fuel) return RunResult{RunResult::Tag::FuelExhausted, cur, fuel, ""};
    StepOutcome out = step_mode(spec, EvalContext::empty(), cur, pattern_mode);
    if (out.is_stuck()) return RunResult{RunResult::Tag::Stuck, cur, steps, out.rule};
    // a syntactic self-loop certifies divergence under determinism
    if (equal(*out.next, cur)) return RunResult{RunResult::Tag::SelfLoop, cur, steps, ""};
    cur = *out.next;
    ++steps;
  }
}

}  // namespace detail

/// Term values: fun, (), pairs of values, tlam, pack of a value, captured
/// continuations. The pattern hole is not a term value.
inline bool is_value(const Exp& e) { return detail::value_like(e, false); }

/// One step of E; e: contracts the redex found under E and returns the full
/// resulting program, or reports a value / a stuck state (the latter only on
/// ill-typed input).
inline StepOutcome step(const FunctionSpec& spec, const EvalContext& E, const Exp& e) {
  return detail::step_mode(spec, E, e, false);
}

/// Iterate step from the empty context, counting contractions. Reports the
/// first value, a detected syntactic self-loop, or fuel exhaustion; a stuck
/// state is propagated as a distinct failure.
inline RunResult run(const FunctionSpec& spec, const Exp& program, std::uint64_t fuel) {
  return detail::run_mode(spec, program, fuel, false);
}

}  // namespace unwind
