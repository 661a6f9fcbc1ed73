#pragma once

// Deterministic, seedable, type-directed generation of well-formed types,
// well-typed closed terms at a goal type, function specs, patterns with
// holes, and evaluation contexts. Generation works backward from the goal:
// pick a rule whose conclusion matches, then generate the premises, so that
// every produced term typechecks by construction.
//
// The random source is splitmix64 (Steele, Lea and Flood's 64-bit
// permutation generator), chosen for its portable, fully specified integer
// semantics: identical configs produce identical corpora on any platform.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "unwind/pattern.hpp"
#include "unwind/statics.hpp"
#include "unwind/syntax.hpp"

namespace unwind {

class SplitMix64 {
  std::uint64_t s_;

 public:
  explicit SplitMix64(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    s_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) { return n <= 1 ? 0 : next() % n; }
  bool coin() { return (next() & 1) != 0; }
  /// uniform in [0,1), 53-bit
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
};

struct GenConfig {
  std::uint64_t seed = 0;
  std::uint64_t max_size = 24;
  double letcc_weight = 0.10;
  double throw_weight = 0.10;
  double hole_weight = 0.0;
  Exp goal = unit1();

  void validate() const {
    if (max_size < 1) throw MalformedError("max_size must be at least 1");
    auto in01 = [](double w) { return w >= 0.0 && w <= 1.0; };
    if (!in01(letcc_weight) || !in01(throw_weight) || !in01(hole_weight) ||
        letcc_weight + throw_weight + hole_weight > 1.0)
      throw MalformedError("construct weights must lie in [0,1] and sum to at most 1");
  }
};

class Generator {
 public:
  Generator(GenConfig cfg, FunctionSpec spec)
      : cfg_(std::move(cfg)), spec_(std::move(spec)), rng_(cfg_.seed) {
    cfg_.validate();
  }

  /// A well-formed type under ctx, of size at most cfg.max_size.
  Exp gen_type(const TypingContext& ctx) { return type_rec(ctx, cfg_.max_size); }

  /// A term with type_of(spec, ctx, result) == goal and size <= max_size,
  /// or GiveUp when the goal is uninhabited within the budget.
  std::optional<Exp> gen_term(const TypingContext& ctx, const Exp& goal) {
    if (!wf_type(ctx, goal)) throw MalformedError("gen_term goal is ill-formed");
    work_ = kWorkBudget;
    auto r = term_rec(ctx, goal, cfg_.max_size, 0, cfg_.hole_weight > 0.0);
    if (r && (r->size() > cfg_.max_size || !type_checks(ctx, *r, goal)))
      throw MalformedError("generator produced an out-of-contract term");
    return r;
  }

  /// A pattern typed at unit together with its hole count.
  std::optional<std::pair<Exp, std::uint64_t>> gen_pattern() {
    work_ = kWorkBudget;
    auto r = term_rec(TypingContext{}, unit1(), cfg_.max_size, 0,
                      cfg_.hole_weight > 0.0);
    if (!r) return std::nullopt;
    if (!type_checks(TypingContext{}, *r, unit1()))
      throw MalformedError("generator produced an ill-typed pattern");
    return std::make_pair(*r, pathole_count(*r));
  }

  /// Redraw patterns until one carries at least min_holes pattern holes.
  /// Deterministic: the draws consume the seeded stream in order.
  std::optional<std::pair<Exp, std::uint64_t>> gen_pattern_with_holes(
      std::uint64_t min_holes, int attempts = 64) {
    for (int i = 0; i < attempts; ++i) {
      auto p = gen_pattern();
      if (p && p->second >= min_holes) return p;
    }
    return std::nullopt;
  }

  /// An evaluation context accepting hole_ty, built from random frames and
  /// capped at the answer type.
  std::optional<EvalContext> gen_ctx(const Exp& hole_ty) {
    if (!is_closed(hole_ty) || !wf_type(TypingContext{}, hole_ty))
      throw MalformedError("gen_ctx hole type must be closed and well-formed");
    bool allow_hole = cfg_.hole_weight > 0.0;
    work_ = kWorkBudget;
    Exp shape = ctxhole();
    Exp cur = hole_ty;
    std::uint64_t frames = cfg_.max_size <= 1 ? 0 : rng_.below(4);
    for (std::uint64_t i = 0; i < frames; ++i) {
      if (!wrap_frame(shape, cur, allow_hole)) break;
    }
    // cap at the answer type
    if (cur.kind() == Kind::Void0) {
      shape = abort_(unit1(), shape);
    } else if (cur != unit1()) {
      shape = letin(shape, triv());
    }
    EvalContext E{shape};
    if (!type_of_ctx(spec_, E, hole_ty))
      throw MalformedError("generator produced an ill-typed context");
    return E;
  }

  /// A closed value of the given closed type, or GiveUp (void, type
  /// variables and continuation types have no writable closed values).
  std::optional<Exp> gen_value(const Exp& ty) {
    work_ = kWorkBudget;
    return value_rec(ty, cfg_.max_size, 0);
  }

  /// A random function spec: closed argument/result types and a body typed
  /// under the self reference and the argument.
  FunctionSpec gen_spec() {
    for (int attempt = 0; attempt < 32; ++attempt) {
      TypingContext empty;
      Exp a = type_rec(empty, 1 + rng_.below(3));
      Exp b = type_rec(empty, 1 + rng_.below(3));
      TypingContext ctx;
      ctx.push_term(arrow(a, b));
      ctx.push_term(shift(a, 0, 1));
      work_ = kWorkBudget;
      auto body = term_rec(ctx, shift(b, 0, 2), cfg_.max_size, 0, false);
      if (body) return FunctionSpec(a, b, *body);
    }
    return FunctionSpec(unit1(), unit1(), var(0));
  }

  SplitMix64& rng() { return rng_; }

 private:
  // Bounds the backtracking search: failed candidates explore their own
  // candidate trees, which is exponential on uninhabited goals without a cap.
  static constexpr std::uint64_t kWorkBudget = 4000;

  GenConfig cfg_;
  FunctionSpec spec_;
  SplitMix64 rng_;
  std::uint64_t work_ = kWorkBudget;

  bool type_checks(const TypingContext& ctx, const Exp& e, const Exp& goal) {
    TypeResult r = type_of(spec_, ctx, e);
    return r.ok() && r.type() == goal;
  }

  // split total into two positive parts
  std::pair<std::uint64_t, std::uint64_t> split2(std::uint64_t total) {
    if (total < 2) return {1, 1};
    std::uint64_t a = 1 + rng_.below(total - 1);
    return {a, total - a};
  }

  std::uint64_t small_type_budget(std::uint64_t budget) {
    std::uint64_t cap = budget / 3;
    if (cap < 1) cap = 1;
    if (cap > 4) cap = 4;
    return 1 + rng_.below(cap);
  }

  Exp type_rec(const TypingContext& ctx, std::uint64_t budget) {
    std::vector<std::uint64_t> tyvars;
    for (std::uint64_t i = 0; i < ctx.depth(); ++i)
      if (ctx.is_type(i)) tyvars.push_back(i);
    if (budget <= 1) {
      if (!tyvars.empty() && rng_.chance(0.5)) return var(tyvars[rng_.below(tyvars.size())]);
      return unit1();
    }
    double r = rng_.unit();
    if (r < 0.20) {
      auto [b1, b2] = split2(budget - 1);
      return arrow(type_rec(ctx, b1), type_rec(ctx, b2));
    }
    if (r < 0.36) {
      auto [b1, b2] = split2(budget - 1);
      return prod(type_rec(ctx, b1), type_rec(ctx, b2));
    }
    if (r < 0.46) return contty(type_rec(ctx, budget - 1));
    if (r < 0.53) {
      TypingContext inner = ctx;
      inner.push_type();
      return forall(type_rec(inner, budget - 1));
    }
    if (r < 0.60) {
      TypingContext inner = ctx;
      inner.push_type();
      return exists(type_rec(inner, budget - 1));
    }
    if (r < 0.66) return void0();
    if (r < 0.76 && !tyvars.empty()) return var(tyvars[rng_.below(tyvars.size())]);
    return unit1();
  }

  // Replace some occurrences of the closed type w in t by the variable bound
  // just outside t (so that substituting w back recovers t).
  Exp abstract_type(const Exp& t, const Exp& w, std::uint64_t depth) {
    if (equal(t, w) && rng_.chance(0.5)) return var(depth);
    return detail::map_children(t, [&](const Exp& kid, std::size_t pos) {
      return abstract_type(kid, w, depth + binder_count(t.kind(), pos));
    });
  }

  std::optional<Exp> value_rec(const Exp& ty, std::uint64_t budget, unsigned depth) {
    if (depth > 64 || budget == 0) return std::nullopt;
    switch (ty.kind()) {
      case Kind::Unit1: return triv();
      case Kind::Prod: {
        auto [b1, b2] = split2(budget > 1 ? budget - 1 : 1);
        auto l = value_rec(ty.child(0), b1, depth + 1);
        if (!l) return std::nullopt;
        auto r = value_rec(ty.child(1), b2, depth + 1);
        if (!r) return std::nullopt;
        return pair_(*l, *r);
      }
      case Kind::Arrow: {
        Exp a = ty.child(0), b = ty.child(1);
        std::uint64_t base = 1 + a.size() + b.size();
        if (budget <= base) return std::nullopt;
        TypingContext ctx;
        ctx.push_term(ty);
        ctx.push_term(shift(a, 0, 1));
        auto body = term_rec(ctx, shift(b, 0, 2), budget - base, depth + 1, false);
        if (!body) return std::nullopt;
        return fun(a, b, *body);
      }
      case Kind::Forall: {
        TypingContext ctx;
        ctx.push_type();
        auto body = term_rec(ctx, ty.child(0), budget > 1 ? budget - 1 : 1, depth + 1, false);
        if (!body) return std::nullopt;
        return tlam(*body);
      }
      case Kind::Exists: {
        Exp w = type_rec(TypingContext{}, small_type_budget(budget));
        std::uint64_t base = 1 + w.size() + ty.size();
        if (budget <= base) return std::nullopt;
        auto payload = value_rec(subst(ty.child(0), 0, w), budget - base, depth + 1);
        if (!payload) return std::nullopt;
        return pack(w, *payload, ty);
      }
      default: return std::nullopt;  // void, cont, type variables
    }
  }

  bool wrap_frame(Exp& shape, Exp& cur, bool allow_hole) {
    TypingContext empty;
    switch (rng_.below(8)) {
      case 0: {  // let frame
        Exp next = type_rec(empty, small_type_budget(cfg_.max_size));
        TypingContext ctx;
        ctx.push_term(cur);
        auto e2 = term_rec(ctx, shift(next, 0, 1), cfg_.max_size / 2 + 1, 0, allow_hole);
        if (!e2) return false;
        shape = letin(shape, *e2);
        cur = next;
        return true;
      }
      case 1: {  // argument position under a function value
        Exp next = type_rec(empty, small_type_budget(cfg_.max_size));
        auto v = value_rec(arrow(cur, next), cfg_.max_size / 2 + 2, 0);
        if (!v) return false;
        shape = app(*v, shape);
        cur = next;
        return true;
      }
      case 2: {  // function position
        if (cur.kind() != Kind::Arrow) return false;
        auto arg = term_rec(empty, cur.child(0), cfg_.max_size / 2 + 1, 0, allow_hole);
        if (!arg) return false;
        shape = app(shape, *arg);
        cur = cur.child(1);
        return true;
      }
      case 3: {  // pair left, then available for projection
        auto r = term_rec(empty, unit1(), cfg_.max_size / 3 + 1, 0, allow_hole);
        if (!r) return false;
        shape = pair_(shape, *r);
        cur = prod(cur, unit1());
        return true;
      }
      case 4: {  // projection
        if (cur.kind() != Kind::Prod) return false;
        bool left = rng_.coin();
        shape = left ? projl(shape) : projr(shape);
        cur = cur.child(left ? 0 : 1);
        return true;
      }
      case 5: {  // type application
        if (cur.kind() != Kind::Forall) return false;
        Exp w = type_rec(empty, small_type_budget(cfg_.max_size));
        shape = tapp(shape, w);
        cur = subst(cur.child(0), 0, w);
        return true;
      }
      case 6: {  // abort
        if (cur.kind() != Kind::Void0) return false;
        Exp next = type_rec(empty, small_type_budget(cfg_.max_size));
        shape = abort_(next, shape);
        cur = next;
        return true;
      }
      default: {  // pack around the hole
        Exp w = type_rec(empty, small_type_budget(cfg_.max_size));
        Exp as_ty = exists(abstract_type(shift(cur, 0, 1), w, 0));
        shape = pack(w, shape, as_ty);
        cur = as_ty;
        return true;
      }
    }
  }

  std::optional<Exp> term_rec(const TypingContext& ctx, const Exp& goal,
                              std::uint64_t budget, unsigned depth, bool allow_hole);
};

// candidate production tags for backward generation
namespace gendetail {
enum class Prod : std::uint8_t {
  Var,
  Triv,
  Fun,
  Hole,
  HoleApp,
  Pair,
  TLamIntro,
  PackIntro,
  LetIn,
  App,
  ProjL,
  ProjR,
  TApp,
  Open,
  Letcc,
  ThrowDirect,
  AbortThrow,
};
}

inline std::optional<Exp> Generator::term_rec(const TypingContext& ctx, const Exp& goal,
                                              std::uint64_t budget, unsigned depth,
                                              bool allow_hole) {
  using gendetail::Prod;
  if (depth > 48 || budget == 0) return std::nullopt;
  if (work_ == 0) return std::nullopt;
  --work_;

  std::vector<std::uint64_t> goal_vars;
  std::vector<std::uint64_t> cont_vars;  // variables of continuation type
  for (std::uint64_t i = 0; i < ctx.depth(); ++i) {
    if (!ctx.is_term(i)) continue;
    Exp ty = ctx.term_type(i);
    if (ty == goal) goal_vars.push_back(i);
    if (ty.kind() == Kind::ContTy) cont_vars.push_back(i);
  }

  bool hole_fits = allow_hole && goal == arrow(spec_.arg_ty, spec_.ret_ty);

  // absolute-weight coins for the highlighted constructs; the remaining
  // probability mass goes to the core productions below
  double r = rng_.unit();
  double cum = cfg_.letcc_weight;
  if (r < cum && budget >= 2 + goal.size()) {
    TypingContext inner = ctx;
    inner.push_term(contty(goal));
    auto body = term_rec(inner, shift(goal, 0, 1), budget - 1 - goal.size(),
                         depth + 1, allow_hole);
    if (body) return letcc(goal, *body);
  }
  cum += cfg_.throw_weight;
  if (r >= cfg_.letcc_weight && r < cum && !cont_vars.empty()) {
    std::uint64_t k = cont_vars[rng_.below(cont_vars.size())];
    Exp vty = ctx.term_type(k).child(0);
    if (goal.kind() == Kind::Void0 && budget >= 3) {
      auto v = term_rec(ctx, vty, budget - 2, depth + 1, allow_hole);
      if (v) return throw_(*v, var(k));
    } else if (budget >= 4 + goal.size()) {
      auto v = term_rec(ctx, vty, budget - 3 - goal.size(), depth + 1, allow_hole);
      if (v) return abort_(goal, throw_(*v, var(k)));
    }
  }
  cum += cfg_.hole_weight;
  if (r >= cfg_.letcc_weight + cfg_.throw_weight && r < cum && hole_fits)
    return pathole();

  // core candidates, weighted. A void goal is served only through throws
  // and existing variables: terms of the empty type otherwise come out as
  // never-returning recursion, which is useless to execute.
  bool void_goal = goal.kind() == Kind::Void0;
  struct Candidate {
    Prod prod;
    double w;
    std::uint64_t payload;
  };
  std::vector<Candidate> cands;
  for (std::uint64_t v : goal_vars) cands.push_back({Prod::Var, 2.0, v});
  switch (goal.kind()) {
    case Kind::Unit1: cands.push_back({Prod::Triv, 3.0, 0}); break;
    case Kind::Arrow:
      if (budget >= 2 + goal.child(0).size() + goal.child(1).size())
        cands.push_back({Prod::Fun, 3.0, 0});
      if (hole_fits) cands.push_back({Prod::Hole, 0.8, 0});
      break;
    case Kind::Prod:
      if (budget >= 3) cands.push_back({Prod::Pair, 3.0, 0});
      break;
    case Kind::Forall:
      if (budget >= 2) cands.push_back({Prod::TLamIntro, 3.0, 0});
      break;
    case Kind::Exists:
      if (budget >= 3 + goal.size()) cands.push_back({Prod::PackIntro, 3.0, 0});
      break;
    case Kind::Void0:
      if (!cont_vars.empty() && budget >= 3)
        cands.push_back({Prod::ThrowDirect, 3.0, 0});
      break;
    default: break;
  }
  if (allow_hole && goal == spec_.ret_ty && budget >= 3 + spec_.arg_ty.size())
    cands.push_back({Prod::HoleApp, 6.0 * cfg_.hole_weight, 0});
  if (budget >= 3 && !void_goal) {
    cands.push_back({Prod::LetIn, 1.0, 0});
    cands.push_back({Prod::App, 1.0, 0});
    cands.push_back({Prod::ProjL, 0.4, 0});
    cands.push_back({Prod::ProjR, 0.4, 0});
    cands.push_back({Prod::Open, 0.35, 0});
  }
  if (budget >= 2 + goal.size()) {
    if (!void_goal) cands.push_back({Prod::TApp, 0.35, 0});
    cands.push_back({Prod::Letcc, 0.3, 0});
    if (!cont_vars.empty() && !void_goal && budget >= 4 + goal.size())
      cands.push_back({Prod::AbortThrow, 0.4, 0});
  }

  while (!cands.empty()) {
    double total = 0;
    for (const Candidate& c : cands) total += c.w;
    double pick = rng_.unit() * total;
    std::size_t idx = 0;
    for (; idx + 1 < cands.size(); ++idx) {
      if (pick < cands[idx].w) break;
      pick -= cands[idx].w;
    }
    Candidate cand = cands[idx];
    cands[idx] = cands.back();
    cands.pop_back();

    switch (cand.prod) {
      case Prod::Var: return var(cand.payload);
      case Prod::Triv: return triv();
      case Prod::Hole: return pathole();
      case Prod::HoleApp: {
        auto arg = term_rec(ctx, spec_.arg_ty, budget - 2, depth + 1, allow_hole);
        if (arg) return app(pathole(), *arg);
        break;
      }
      case Prod::Fun: {
        Exp a = goal.child(0), b = goal.child(1);
        TypingContext inner = ctx;
        inner.push_term(goal);
        inner.push_term(shift(a, 0, 1));
        auto body = term_rec(inner, shift(b, 0, 2), budget - 1 - a.size() - b.size(),
                             depth + 1, allow_hole);
        if (body) return fun(a, b, *body);
        break;
      }
      case Prod::Pair: {
        auto [b1, b2] = split2(budget - 1);
        auto l = term_rec(ctx, goal.child(0), b1, depth + 1, allow_hole);
        if (!l) break;
        auto rr = term_rec(ctx, goal.child(1), b2, depth + 1, allow_hole);
        if (!rr) break;
        return pair_(*l, *rr);
      }
      case Prod::TLamIntro: {
        TypingContext inner = ctx;
        inner.push_type();
        auto body = term_rec(inner, goal.child(0), budget - 1, depth + 1, allow_hole);
        if (body) return tlam(*body);
        break;
      }
      case Prod::PackIntro: {
        Exp w = type_rec(ctx, small_type_budget(budget));
        if (budget < 2 + w.size() + goal.size()) break;
        auto payload = term_rec(ctx, subst(goal.child(0), 0, w),
                                budget - 1 - w.size() - goal.size(), depth + 1,
                                allow_hole);
        if (payload) return pack(w, *payload, goal);
        break;
      }
      case Prod::LetIn: {
        Exp bound_ty = type_rec(ctx, small_type_budget(budget));
        auto [b1, b2] = split2(budget - 1);
        auto bound = term_rec(ctx, bound_ty, b1, depth + 1, allow_hole);
        if (!bound) break;
        TypingContext inner = ctx;
        inner.push_term(bound_ty);
        auto body = term_rec(inner, shift(goal, 0, 1), b2, depth + 1, allow_hole);
        if (!body) break;
        return letin(*bound, *body);
      }
      case Prod::App: {
        // steer toward the function under study when it applies
        Exp arg_ty = (allow_hole && goal == spec_.ret_ty && rng_.chance(0.5))
                         ? spec_.arg_ty
                         : type_rec(ctx, small_type_budget(budget));
        auto [b1, b2] = split2(budget - 1);
        auto fn = term_rec(ctx, arrow(arg_ty, goal), b1, depth + 1, allow_hole);
        if (!fn) break;
        auto arg = term_rec(ctx, arg_ty, b2, depth + 1, allow_hole);
        if (!arg) break;
        return app(*fn, *arg);
      }
      case Prod::ProjL:
      case Prod::ProjR: {
        Exp other = type_rec(ctx, small_type_budget(budget));
        bool left = cand.prod == Prod::ProjL;
        auto e = term_rec(ctx, left ? prod(goal, other) : prod(other, goal),
                          budget - 1, depth + 1, allow_hole);
        if (e) return left ? projl(*e) : projr(*e);
        break;
      }
      case Prod::TApp: {
        Exp w = type_rec(TypingContext{}, small_type_budget(budget));
        if (budget < 2 + w.size()) break;
        Exp body = abstract_type(shift(goal, 0, 1), w, 0);
        auto fn = term_rec(ctx, forall(body), budget - 1 - w.size(), depth + 1,
                           allow_hole);
        if (fn) return tapp(*fn, w);
        break;
      }
      case Prod::Open: {
        TypingContext with_a = ctx;
        with_a.push_type();
        Exp inner_ty = type_rec(with_a, small_type_budget(budget));
        auto [b1, b2] = split2(budget - 1);
        auto scrut = term_rec(ctx, exists(inner_ty), b1, depth + 1, allow_hole);
        if (!scrut) break;
        TypingContext inner = ctx;
        inner.push_type();
        inner.push_term(inner_ty);
        auto body = term_rec(inner, shift(goal, 0, 2), b2, depth + 1, allow_hole);
        if (!body) break;
        return open_(*scrut, *body);
      }
      case Prod::Letcc: {
        TypingContext inner = ctx;
        inner.push_term(contty(goal));
        auto body = term_rec(inner, shift(goal, 0, 1), budget - 1 - goal.size(),
                             depth + 1, allow_hole);
        if (body) return letcc(goal, *body);
        break;
      }
      case Prod::ThrowDirect: {
        std::uint64_t k = cont_vars[rng_.below(cont_vars.size())];
        Exp vty = ctx.term_type(k).child(0);
        auto v = term_rec(ctx, vty, budget - 2, depth + 1, allow_hole);
        if (v) return throw_(*v, var(k));
        break;
      }
      case Prod::AbortThrow: {
        std::uint64_t k = cont_vars[rng_.below(cont_vars.size())];
        Exp vty = ctx.term_type(k).child(0);
        auto v = term_rec(ctx, vty, budget - 3 - goal.size(), depth + 1, allow_hole);
        if (v) return abort_(goal, throw_(*v, var(k)));
        break;
      }
    }
  }
  return std::nullopt;
}

// ---- spec-shaped free functions ---------------------------------------------

inline Exp gen_type(const GenConfig& cfg, const TypingContext& ctx) {
  Generator g(cfg, FunctionSpec(unit1(), unit1(), var(0)));
  return g.gen_type(ctx);
}

inline std::optional<Exp> gen_term(const GenConfig& cfg, const FunctionSpec& spec,
                                   const TypingContext& ctx, const Exp& goal) {
  Generator g(cfg, spec);
  return g.gen_term(ctx, goal);
}

inline std::optional<std::pair<Exp, std::uint64_t>> gen_pattern(
    const GenConfig& cfg, const FunctionSpec& spec) {
  Generator g(cfg, spec);
  return g.gen_pattern();
}

inline std::optional<EvalContext> gen_ctx(const GenConfig& cfg,
                                          const FunctionSpec& spec,
                                          const Exp& hole_ty) {
  Generator g(cfg, spec);
  return g.gen_ctx(hole_ty);
}

}  // namespace unwind
