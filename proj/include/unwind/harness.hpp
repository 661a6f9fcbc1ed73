#pragma once

// Executable checks for the metatheory: the bottom lemma, value transfer,
// the two step-transfer squares between term and pattern execution,
// generalized compactness with exact step counts, the compactness
// biconditional itself, and a determinism/safety audit driven by an
// exhaustive rule scan. Each check reports violations as replayable records
// rendered in the surface syntax.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "unwind/dynamics.hpp"
#include "unwind/generator.hpp"
#include "unwind/pattern.hpp"
#include "unwind/statics.hpp"
#include "unwind/surface.hpp"
#include "unwind/syntax.hpp"

namespace unwind {

struct Violation {
  std::string inputs;    // surface syntax, sufficient to replay
  std::string expected;
  std::string got;
};

struct LemmaReport {
  std::string lemma_id;
  std::uint64_t cases_run = 0;
  std::uint64_t inconclusive = 0;           // hypotheses unverifiable under fuel
  std::uint64_t inconclusive_selfloop = 0;  // of those, certified self-loops
  std::vector<Violation> violations;

  bool pass() const { return violations.empty(); }
  void merge(const LemmaReport& o) {
    cases_run += o.cases_run;
    inconclusive += o.inconclusive;
    inconclusive_selfloop += o.inconclusive_selfloop;
    violations.insert(violations.end(), o.violations.begin(), o.violations.end());
  }
};

// ---- exhaustive rule scan (the determinism/progress oracle) -----------------

namespace detail {

inline void scan_rec(const FunctionSpec& spec, bool pattern_mode, const EvalContext& E,
                     const Exp& e, std::vector<std::pair<std::string, Exp>>& out) {
  auto val = [&](const Exp& x) { return value_like(x, pattern_mode); };
  auto desc = [&](Exp frame_shape, const Exp& focus) {
    scan_rec(spec, pattern_mode, compose_ctx(E, EvalContext(std::move(frame_shape))),
             focus, out);
  };
  switch (e.kind()) {
    case Kind::App: {
      Exp fn = e.child(0), arg = e.child(1);
      if (!val(fn)) desc(app(ctxhole(), arg), fn);
      if (val(fn) && !val(arg)) desc(app(fn, ctxhole()), arg);
      if (val(fn) && val(arg)) {
        if (fn.kind() == Kind::Fun)
          out.push_back({"beta", plug(E, subst2(fn.child(2), fn, arg))});
        if (pattern_mode && fn.kind() == Kind::PatHole)
          out.push_back({"unroll-hole", plug(E, subst2(spec.body, pathole(), arg))});
      }
      return;
    }
    case Kind::LetIn: {
      Exp bound = e.child(0);
      if (!val(bound)) desc(letin(ctxhole(), e.child(1)), bound);
      if (val(bound)) out.push_back({"let", plug(E, subst(e.child(1), 0, bound))});
      return;
    }
    case Kind::Abort: {
      if (!val(e.child(1))) desc(abort_(e.child(0), ctxhole()), e.child(1));
      return;  // no contraction at a value of the empty type
    }
    case Kind::Pair: {
      Exp l = e.child(0), r = e.child(1);
      if (!val(l)) desc(pair_(ctxhole(), r), l);
      if (val(l) && !val(r)) desc(pair_(l, ctxhole()), r);
      return;
    }
    case Kind::ProjL:
    case Kind::ProjR: {
      Exp arg = e.child(0);
      bool left = e.kind() == Kind::ProjL;
      if (!val(arg)) desc(left ? projl(ctxhole()) : projr(ctxhole()), arg);
      if (val(arg) && arg.kind() == Kind::Pair)
        out.push_back(
            {left ? "projl" : "projr", plug(E, arg.child(left ? 0 : 1))});
      return;
    }
    case Kind::TApp: {
      Exp fn = e.child(0);
      if (!val(fn)) desc(tapp(ctxhole(), e.child(1)), fn);
      if (val(fn) && fn.kind() == Kind::TLam)
        out.push_back({"tapp", plug(E, subst(fn.child(0), 0, e.child(1)))});
      return;
    }
    case Kind::Pack: {
      if (!val(e.child(1))) desc(pack(e.child(0), ctxhole(), e.child(2)), e.child(1));
      return;
    }
    case Kind::Open: {
      Exp scrut = e.child(0);
      if (!val(scrut)) desc(open_(ctxhole(), e.child(1)), scrut);
      if (val(scrut) && scrut.kind() == Kind::Pack)
        out.push_back(
            {"open", plug(E, subst2(e.child(1), scrut.child(0), scrut.child(1)))});
      return;
    }
    case Kind::Letcc: {
      Exp captured = contval(e.child(0), E.shape());
      out.push_back({"letcc", plug(E, subst(e.child(1), 0, captured))});
      return;
    }
    case Kind::Throw: {
      Exp v = e.child(0), k = e.child(1);
      if (!val(v)) desc(throw_(ctxhole(), k), v);
      if (val(v) && !val(k)) desc(throw_(v, ctxhole()), k);
      if (val(v) && val(k) && k.kind() == Kind::ContVal)
        out.push_back({"throw-cont", plug(EvalContext(k.child(1)), v)});
      return;
    }
    default: return;  // values, variables, holes, type productions
  }
}

}  // namespace detail

/// All (rule, successor) derivations of the step relation for a whole
/// program: the scan enumerates every frame path whose premises hold and
/// every matching contraction, unlike step which commits to the first.
inline std::vector<std::pair<std::string, Exp>> applicable_rules(
    const FunctionSpec& spec, const Exp& program, bool pattern_mode = false) {
  std::vector<std::pair<std::string, Exp>> out;
  detail::scan_rec(spec, pattern_mode, EvalContext::empty(), program, out);
  return out;
}

// ---- individual lemma checks -------------------------------------------------

/// The zero unrolling applied to any value steps to itself: a syntactic
/// self-loop, which certifies divergence under determinism.
inline bool check_bottom(const FunctionSpec& spec, const Exp& v) {
  if (!is_value(v) || !is_closed(v))
    throw std::invalid_argument("check_bottom: argument must be a closed value");
  TypeResult t = type_of(spec, TypingContext{}, v);
  if (!t.ok() || t.type() != spec.arg_ty)
    throw std::invalid_argument("check_bottom: value must have the argument type");
  Exp e = app(unroll(spec, UnrollDepth::finite(0)), v);
  StepOutcome out = step(spec, EvalContext::empty(), e);
  return out.is_stepped() && equal(*out.next, e);
}

/// Related values are values together.
inline bool check_value_transfer(const FunctionSpec& spec, std::uint64_t n,
                                 const Exp& v, const Exp& vp) {
  if (!of_check(spec, n, v, vp))
    throw std::invalid_argument("check_value_transfer: of precondition fails");
  return is_value(v) == is_pattern_value(vp);
}

/// Upper square: a terminating term step is matched by a pattern step that
/// keeps of^0.
inline LemmaReport check_step_to_pattern(const FunctionSpec& spec, const EvalContext& E,
                                         const Exp& e, const EvalContext& P,
                                         const Exp& p, std::uint64_t fuel) {
  LemmaReport rep;
  rep.lemma_id = "step-to-pattern";
  if (!of_check(spec, 0, E.shape(), P.shape()) || !of_check(spec, 0, e, p))
    throw std::invalid_argument("check_step_to_pattern: of^0 preconditions fail");
  RunResult rw = run(spec, plug(E, e), fuel);
  if (!rw.terminated()) {
    rep.inconclusive = 1;
    if (rw.self_loop()) rep.inconclusive_selfloop = 1;
    return rep;
  }
  rep.cases_run = 1;
  StepOutcome se = step(spec, E, e);
  if (se.is_value()) return rep;  // no step to match
  std::string inputs = "spec: " + print(spec.as_fun()) + "\ncontext: " +
                       print(E.shape()) + "\nterm: " + print(e) +
                       "\npattern-context: " + print(P.shape()) +
                       "\npattern: " + print(p);
  if (se.is_stuck()) {
    rep.violations.push_back({inputs, "a term step", "stuck: " + se.rule});
    return rep;
  }
  StepOutcome sp = pattern_step(spec, P, p);
  if (!sp.is_stepped()) {
    rep.violations.push_back({inputs, "a matching pattern step",
                              sp.is_value() ? "pattern is a value" : sp.rule});
    return rep;
  }
  if (!of_check(spec, 0, *se.next, *sp.next))
    rep.violations.push_back(
        {inputs, "of^0 between successors", print(*se.next) + " vs " + print(*sp.next)});
  return rep;
}

/// Lower square: a pattern step is matched by a term step, dropping the
/// minimum unrolling depth from n+1 to n.
inline LemmaReport check_pattern_to_term(const FunctionSpec& spec, std::uint64_t n,
                                         const EvalContext& D, const Exp& d,
                                         const EvalContext& P, const Exp& p) {
  LemmaReport rep;
  rep.lemma_id = "pattern-to-term";
  if (!of_check(spec, n + 1, D.shape(), P.shape()) || !of_check(spec, n + 1, d, p))
    throw std::invalid_argument("check_pattern_to_term: of^{n+1} preconditions fail");
  StepOutcome sp = pattern_step(spec, P, p);
  if (!sp.is_stepped())
    throw std::invalid_argument("check_pattern_to_term: pattern must step");
  rep.cases_run = 1;
  std::string inputs = "spec: " + print(spec.as_fun()) + "\nn+1: " +
                       std::to_string(n + 1) + "\ncontext: " + print(D.shape()) +
                       "\nterm: " + print(d) + "\npattern-context: " +
                       print(P.shape()) + "\npattern: " + print(p);
  StepOutcome sd = step(spec, D, d);
  if (!sd.is_stepped()) {
    rep.violations.push_back(
        {inputs, "a matching term step", sd.is_value() ? "term is a value" : sd.rule});
    return rep;
  }
  if (!of_check(spec, n, *sd.next, *sp.next))
    rep.violations.push_back({inputs, "of^" + std::to_string(n) + " between successors",
                              print(*sd.next) + " vs " + print(*sp.next)});
  return rep;
}

/// Replay of the full diagram: e terminates in n steps, the pattern follows
/// for n steps to a pattern value, and any d matching at depth n terminates
/// in exactly n steps to a related value.
inline LemmaReport check_generalized_compactness(const FunctionSpec& spec, const Exp& e,
                                                 const Exp& p, const Exp& d,
                                                 std::uint64_t fuel) {
  LemmaReport rep;
  rep.lemma_id = "generalized-compactness";
  if (!of_check(spec, 0, e, p))
    throw std::invalid_argument("generalized compactness: of^0(e, p) fails");
  RunResult re = run(spec, e, fuel);
  if (!re.terminated()) {
    rep.inconclusive = 1;
    if (re.self_loop()) rep.inconclusive_selfloop = 1;
    return rep;
  }
  std::uint64_t n = re.steps;
  if (!of_check(spec, n, d, p))
    throw std::invalid_argument("generalized compactness: of^n(d, p) fails");
  rep.cases_run = 1;
  std::string inputs = "spec: " + print(spec.as_fun()) + "\nterm: " + print(e) +
                       "\npattern: " + print(p) + "\nwitness: " + print(d) +
                       "\nsteps: " + std::to_string(n);

  std::vector<Exp> ptrace{p};
  Exp ecur = e, pcur = p;
  for (std::uint64_t i = 0; i < n; ++i) {
    StepOutcome se = step(spec, EvalContext::empty(), ecur);
    StepOutcome sp = pattern_step(spec, EvalContext::empty(), pcur);
    if (!se.is_stepped() || !sp.is_stepped()) {
      rep.violations.push_back({inputs, "lockstep execution for n steps",
                                "one side failed to step at " + std::to_string(i)});
      return rep;
    }
    ecur = *se.next;
    pcur = *sp.next;
    ptrace.push_back(pcur);
    if (!of_check(spec, 0, ecur, pcur)) {
      rep.violations.push_back({inputs, "of^0 along the upper trace",
                                "diverged at step " + std::to_string(i + 1)});
      return rep;
    }
  }
  if (!is_pattern_value(pcur)) {
    rep.violations.push_back({inputs, "pattern reaches a pattern value", print(pcur)});
    return rep;
  }
  Exp dcur = d;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (is_value(dcur)) {
      rep.violations.push_back({inputs, "witness runs for exactly n steps",
                                "value after " + std::to_string(i) + " steps"});
      return rep;
    }
    StepOutcome sd = step(spec, EvalContext::empty(), dcur);
    if (!sd.is_stepped()) {
      rep.violations.push_back({inputs, "witness steps n times",
                                "failed at " + std::to_string(i)});
      return rep;
    }
    dcur = *sd.next;
    if (!of_check(spec, n - (i + 1), dcur, ptrace[i + 1])) {
      rep.violations.push_back({inputs,
                                "of^" + std::to_string(n - (i + 1)) +
                                    " along the lower trace",
                                "diverged at step " + std::to_string(i + 1)});
      return rep;
    }
  }
  if (!is_value(dcur))
    rep.violations.push_back({inputs, "witness value after exactly n steps", print(dcur)});
  return rep;
}

/// The compactness biconditional with exact step counts, fuel-approximated:
/// if the recursive filling terminates in n steps, the depth-n filling
/// terminates in exactly n steps; and whenever a sampled finite filling
/// terminates in m steps, the recursive filling terminates in exactly m.
inline LemmaReport check_compactness(const FunctionSpec& spec, const EvalContext& E,
                                     const Exp& p, std::uint64_t fuel) {
  LemmaReport rep;
  rep.lemma_id = "compactness";
  Exp whole = plug(E, p);
  Exp e_omega = fill(whole, spec, UnrollDepth::omega());
  {
    TypeResult t = type_of(spec, TypingContext{}, e_omega);
    if (!t.ok() || t.type() != unit1())
      throw std::invalid_argument("check_compactness: filled program must be a whole program");
  }
  std::string inputs = "spec: " + print(spec.as_fun()) + "\ncontext: " +
                       print(E.shape()) + "\npattern: " + print(p);
  RunResult rw = run(spec, e_omega, fuel);
  std::vector<std::uint64_t> ks{0, 1};
  if (rw.terminated()) {
    std::uint64_t n = rw.steps;
    rep.cases_run += 1;
    RunResult rf = run(spec, fill(whole, spec, UnrollDepth::finite(n)), fuel);
    if (!rf.terminated() || rf.steps != n)
      rep.violations.push_back(
          {inputs, "depth-" + std::to_string(n) + " filling terminates in exactly " +
                       std::to_string(n) + " steps",
           rf.terminated() ? std::to_string(rf.steps) + " steps"
                           : (rf.self_loop() ? "self-loop" : "fuel exhausted")});
    if (n > 0) ks.push_back(n);
    ks.push_back(n + 3);
  } else {
    rep.inconclusive += 1;
    if (rw.self_loop()) rep.inconclusive_selfloop += 1;
  }
  for (std::uint64_t k : ks) {
    RunResult rk = run(spec, fill(whole, spec, UnrollDepth::finite(k)), fuel);
    if (!rk.terminated()) {
      rep.inconclusive += 1;
      if (rk.self_loop()) rep.inconclusive_selfloop += 1;
      continue;
    }
    rep.cases_run += 1;
    if (!rw.terminated() || rw.steps != rk.steps)
      rep.violations.push_back(
          {inputs + "\nk: " + std::to_string(k),
           "recursive filling terminates in exactly " + std::to_string(rk.steps) +
               " steps",
           rw.terminated() ? std::to_string(rw.steps) + " steps"
                           : (rw.self_loop() ? "self-loop" : "fuel exhausted")});
  }
  return rep;
}

/// Walk a whole program's trace: at every state exactly one dynamic rule
/// applies (and it agrees with step), a value never also steps, and every
/// successor re-typechecks at the answer type.
inline LemmaReport audit_safety_determinism(const FunctionSpec& spec, const Exp& e,
                                            std::uint64_t fuel) {
  LemmaReport rep;
  rep.lemma_id = "safety-determinism";
  if (e.has_pathole())
    throw std::invalid_argument("audit: program must be hole-free");
  {
    TypeResult t = type_of(spec, TypingContext{}, e);
    if (!t.ok() || t.type() != unit1())
      throw std::invalid_argument("audit: program must be closed at the answer type");
  }
  std::string inputs = "spec: " + print(spec.as_fun()) + "\nprogram: " + print(e);
  Exp cur = e;
  for (std::uint64_t i = 0; i <= fuel; ++i) {
    auto rules = applicable_rules(spec, cur, false);
    bool v = is_value(cur);
    ++rep.cases_run;
    std::string at = "\nstate " + std::to_string(i) + ": " + print(cur);
    if (v && !rules.empty()) {
      rep.violations.push_back(
          {inputs + at, "value and step mutually exclusive",
           "value with " + std::to_string(rules.size()) + " applicable rules"});
      return rep;
    }
    if (v) return rep;  // terminated cleanly
    if (rules.empty()) {
      rep.violations.push_back({inputs + at, "progress: some rule applies", "none"});
      return rep;
    }
    if (rules.size() > 1) {
      rep.violations.push_back({inputs + at, "determinism: exactly one rule",
                                std::to_string(rules.size()) + " rules (" +
                                    rules[0].first + ", " + rules[1].first + ")"});
      return rep;
    }
    StepOutcome so = step(spec, EvalContext::empty(), cur);
    if (!so.is_stepped()) {
      rep.violations.push_back(
          {inputs + at, "step agrees with the rule scan", "step reports " + so.rule});
      return rep;
    }
    if (!equal(*so.next, rules[0].second)) {
      rep.violations.push_back({inputs + at, "step agrees with the rule scan",
                                print(*so.next) + " vs " + print(rules[0].second)});
      return rep;
    }
    TypeResult t = type_of(spec, TypingContext{}, *so.next);
    if (!t.ok() || t.type() != unit1()) {
      rep.violations.push_back(
          {inputs + at, "preservation at the answer type",
           t.ok() ? print(t.type()) : t.error().rule + ": " + t.error().message});
      return rep;
    }
    if (equal(*so.next, cur)) return rep;  // certified self-loop, trace repeats
    cur = *so.next;
  }
  return rep;  // fuel exhausted without violations
}

// ---- built-in spec corpus ----------------------------------------------------

/// Five closed functions used as the default fuzzing corpus: trivial
/// recursion, guaranteed divergence, a self-reference frozen under a value
/// binder, a product argument, and a control-flow escape.
inline const std::vector<FunctionSpec>& standard_specs() {
  static const std::vector<FunctionSpec> specs = [] {
    std::vector<FunctionSpec> v;
    v.emplace_back(unit1(), unit1(), var(0));
    v.emplace_back(unit1(), unit1(), app(var(1), var(0)));
    v.emplace_back(unit1(), unit1(),
                   letin(fun(unit1(), unit1(), app(var(3), var(0))), var(1)));
    v.emplace_back(prod(unit1(), unit1()), unit1(), projl(var(0)));
    v.emplace_back(arrow(unit1(), unit1()), unit1(),
                   letcc(unit1(), abort_(unit1(), throw_(app(var(1), triv()), var(0)))));
    return v;
  }();
  return specs;
}

// ---- fuzz campaigns ----------------------------------------------------------

struct CampaignConfig {
  std::string mode;  // determinism | safety | bottom | bisim | compactness
  std::uint64_t seed = 0;
  std::uint64_t count = 100;
  std::uint64_t fuel = 200;
  std::uint64_t size = 24;
  double letcc_weight = 0.15;
  double throw_weight = 0.15;
  double hole_weight = 0.25;
  bool with_context = false;               // plug patterns into generated contexts
  std::optional<FunctionSpec> fixed_spec;  // default: cycle the built-in corpus
};

struct CaseRecord {
  std::uint64_t index;
  std::uint64_t seed;
  std::string inputs;
  std::string verdict;  // pass | fail | inconclusive
  std::string detail;
};

struct CampaignResult {
  LemmaReport total;
  std::vector<CaseRecord> cases;
  bool pass() const { return total.pass(); }
};

namespace detail {

inline std::uint64_t case_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + 0x51ed2701));
}

// chain the two squares along the whole terminating trace
inline LemmaReport bisim_chain(const FunctionSpec& spec, const EvalContext& E0,
                               const Exp& e0, const EvalContext& P0, const Exp& p0,
                               std::uint64_t fuel) {
  LemmaReport rep;
  rep.lemma_id = "bisim";
  RunResult rw = run(spec, plug(E0, e0), fuel);
  if (!rw.terminated()) {
    rep.inconclusive = 1;
    if (rw.self_loop()) rep.inconclusive_selfloop = 1;
    return rep;
  }
  std::uint64_t n = rw.steps;
  EvalContext D0(fill(P0.shape(), spec, UnrollDepth::finite(n)));
  Exp d0 = fill(p0, spec, UnrollDepth::finite(n));

  EvalContext E = E0, P = P0, D = D0;
  Exp e = e0, p = p0, d = d0;
  for (std::uint64_t i = 0; i < n; ++i) {
    rep.merge(check_step_to_pattern(spec, E, e, P, p, fuel));
    if (!rep.pass()) return rep;
    std::uint64_t remaining = n - i;  // of^{remaining} holds for (D, d) vs (P, p)
    rep.merge(check_pattern_to_term(spec, remaining - 1, D, d, P, p));
    if (!rep.pass()) return rep;
    StepOutcome se = step(spec, E, e);
    StepOutcome sp = pattern_step(spec, P, p);
    StepOutcome sd = step(spec, D, d);
    if (!se.is_stepped() || !sp.is_stepped() || !sd.is_stepped()) {
      rep.violations.push_back({"spec: " + print(spec.as_fun()),
                                "all three sides step in lockstep",
                                "failure at step " + std::to_string(i)});
      return rep;
    }
    e = *se.next;
    p = *sp.next;
    d = *sd.next;
    E = EvalContext::empty();
    P = EvalContext::empty();
    D = EvalContext::empty();
  }
  // after n steps every side must sit at a related value
  if (!is_value(e) || !is_pattern_value(p) || !is_value(d))
    rep.violations.push_back({"spec: " + print(spec.as_fun()),
                              "values on all sides after the trace",
                              "e: " + print(e) + " p: " + print(p) + " d: " + print(d)});
  return rep;
}

}  // namespace detail

inline CampaignResult run_campaign(const CampaignConfig& cc) {
  CampaignResult result;
  result.total.lemma_id = cc.mode;
  const auto& specs = standard_specs();
  for (std::uint64_t i = 0; i < cc.count; ++i) {
    const FunctionSpec& spec = cc.fixed_spec ? *cc.fixed_spec : specs[i % specs.size()];
    std::uint64_t cseed = detail::case_seed(cc.seed, i);
    GenConfig gcfg;
    gcfg.seed = cseed;
    gcfg.max_size = cc.size;
    gcfg.letcc_weight = cc.letcc_weight;
    gcfg.throw_weight = cc.throw_weight;
    gcfg.hole_weight = cc.hole_weight;
    CaseRecord rec{i, cseed, "", "pass", ""};
    LemmaReport rep;

    if (cc.mode == "determinism" || cc.mode == "safety") {
      gcfg.hole_weight = 0.0;  // the audit takes hole-free programs
      Generator g(gcfg, spec);
      std::optional<Exp> t;
      for (int attempt = 0; attempt < 16 && !t; ++attempt)
        t = g.gen_term(TypingContext{}, unit1());
      if (!t) {
        rec.verdict = "inconclusive";
        rec.detail = "generator gave up";
        result.total.inconclusive += 1;
        result.cases.push_back(std::move(rec));
        continue;
      }
      rec.inputs = "program: " + print(*t);
      rep = audit_safety_determinism(spec, *t, cc.fuel);
    } else if (cc.mode == "bottom") {
      Generator g(gcfg, spec);
      std::optional<Exp> v;
      for (int attempt = 0; attempt < 16 && !v; ++attempt) v = g.gen_value(spec.arg_ty);
      if (!v) {
        rec.verdict = "inconclusive";
        rec.detail = "generator gave up";
        result.total.inconclusive += 1;
        result.cases.push_back(std::move(rec));
        continue;
      }
      rec.inputs = "spec: " + print(spec.as_fun()) + "\nvalue: " + print(*v);
      rep.lemma_id = "bottom";
      rep.cases_run = 1;
      if (!check_bottom(spec, *v))
        rep.violations.push_back({rec.inputs, "syntactic self-loop at step 0",
                                  "the zero unrolling stepped elsewhere"});
    } else if (cc.mode == "bisim") {
      Generator g(gcfg, spec);
      auto p = g.gen_pattern_with_holes(1, 48);
      if (!p) {
        rec.verdict = "inconclusive";
        rec.detail = "generator gave up";
        result.total.inconclusive += 1;
        result.cases.push_back(std::move(rec));
        continue;
      }
      EvalContext P = EvalContext::empty();
      if (cc.with_context) {
        auto ctx = g.gen_ctx(unit1());
        if (ctx) P = *ctx;
      }
      EvalContext E(fill(P.shape(), spec, UnrollDepth::omega()));
      Exp e = fill(p->first, spec, UnrollDepth::omega());
      rec.inputs = "spec: " + print(spec.as_fun()) + "\npattern-context: " +
                   print(P.shape()) + "\npattern: " + print(p->first);
      rep = detail::bisim_chain(spec, E, e, P, p->first, cc.fuel);
    } else if (cc.mode == "compactness") {
      Generator g(gcfg, spec);
      auto p = g.gen_pattern_with_holes(1, 48);
      if (!p) {
        rec.verdict = "inconclusive";
        rec.detail = "generator gave up";
        result.total.inconclusive += 1;
        result.cases.push_back(std::move(rec));
        continue;
      }
      EvalContext E = EvalContext::empty();
      if (cc.with_context) {
        auto ctx = g.gen_ctx(unit1());
        if (ctx) E = *ctx;
      }
      rec.inputs = "spec: " + print(spec.as_fun()) + "\ncontext: " + print(E.shape()) +
                   "\npattern: " + print(p->first);
      rep = check_compactness(spec, E, p->first, cc.fuel);
    } else {
      throw std::invalid_argument("unknown fuzz mode: " + cc.mode);
    }

    if (!rep.pass()) {
      rec.verdict = "fail";
      rec.detail = rep.violations.front().expected + " / got " +
                   rep.violations.front().got;
    } else if (rep.cases_run == 0 && rep.inconclusive > 0) {
      rec.verdict = "inconclusive";
    }
    result.total.merge(rep);
    result.cases.push_back(std::move(rec));
  }
  return result;
}

inline std::string render_report(const CampaignConfig& cc, const CampaignResult& r) {
  std::string out;
  out += "# unwind fuzz report v1\n";
  out += "mode: " + cc.mode + "\n";
  out += "seed: " + std::to_string(cc.seed) + "\n";
  out += "count: " + std::to_string(cc.count) + "\n";
  out += "fuel: " + std::to_string(cc.fuel) + "\n";
  out += "size: " + std::to_string(cc.size) + "\n";
  out += "spec: " +
         (cc.fixed_spec ? print(cc.fixed_spec->as_fun()) : std::string("builtin-cycle")) +
         "\n\n";
  for (const CaseRecord& c : r.cases) {
    out += "case " + std::to_string(c.index) + "\n";
    out += "  seed: " + std::to_string(c.seed) + "\n";
    if (!c.inputs.empty()) {
      out += "  ";
      for (char ch : c.inputs) {
        out += ch;
        if (ch == '\n') out += "  ";
      }
      out += "\n";
    }
    out += "  verdict: " + c.verdict + "\n";
    if (!c.detail.empty()) out += "  detail: " + c.detail + "\n";
  }
  out += "\nsummary: cases=" + std::to_string(r.cases.size()) +
         " checked=" + std::to_string(r.total.cases_run) +
         " violations=" + std::to_string(r.total.violations.size()) +
         " inconclusive=" + std::to_string(r.total.inconclusive) + "\n";
  return out;
}

}  // namespace unwind
