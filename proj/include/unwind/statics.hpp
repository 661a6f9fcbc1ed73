#pragma once

// Type well-formedness, the typing judgment for terms (including the
// pattern-hole and continuation rules), and evaluation-context typing.
// Whole programs and continuations live at the answer type unit.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "unwind/syntax.hpp"

namespace unwind {

/// Ordered typing context; entry i classifies De Bruijn index i. Stored
/// term-variable types are relative to the context below their entry and are
/// shifted into the full context on lookup.
class TypingContext {
 public:
  enum class Sort : std::uint8_t { Term, Type };

  TypingContext() = default;

  void push_term(Exp ty) { entries_.push_back(Entry{Sort::Term, std::move(ty)}); }
  void push_type() { entries_.push_back(Entry{Sort::Type, std::nullopt}); }
  void pop() { entries_.pop_back(); }

  std::size_t depth() const { return entries_.size(); }
  bool in_range(std::uint64_t index) const { return index < entries_.size(); }
  bool is_term(std::uint64_t index) const {
    return in_range(index) && at(index).sort == Sort::Term;
  }
  bool is_type(std::uint64_t index) const {
    return in_range(index) && at(index).sort == Sort::Type;
  }
  /// Type of term variable `index`, expressed in the full current context.
  Exp term_type(std::uint64_t index) const {
    return shift(*at(index).ty, 0, static_cast<std::int64_t>(index + 1));
  }

 private:
  struct Entry {
    Sort sort;
    std::optional<Exp> ty;
  };
  const Entry& at(std::uint64_t index) const {
    return entries_[entries_.size() - 1 - index];
  }
  std::vector<Entry> entries_;
};

/// A rejected typing, carrying the failing subterm and rule name. Rejection
/// is a value, not a halt: fuzz drivers observe and count these.
struct TypeError {
  std::string rule;
  Exp subterm;
  std::string message;
};

class TypeResult {
  std::variant<Exp, TypeError> v_;

 public:
  TypeResult(Exp t) : v_(std::move(t)) {}
  TypeResult(TypeError e) : v_(std::move(e)) {}
  bool ok() const { return std::holds_alternative<Exp>(v_); }
  const Exp& type() const { return std::get<Exp>(v_); }
  const TypeError& error() const { return std::get<TypeError>(v_); }
};

/// True iff ty is built only from type productions with all type variables
/// bound in ctx.
inline bool wf_type(const TypingContext& ctx, const Exp& ty) {
  switch (ty.kind()) {
    case Kind::Void0:
    case Kind::Unit1: return true;
    case Kind::Arrow:
    case Kind::Prod: return wf_type(ctx, ty.child(0)) && wf_type(ctx, ty.child(1));
    case Kind::ContTy: return wf_type(ctx, ty.child(0));
    case Kind::Forall:
    case Kind::Exists: {
      TypingContext inner = ctx;
      inner.push_type();
      return wf_type(inner, ty.child(0));
    }
    case Kind::Var: return ctx.is_type(ty.var_index());
    default: return false;
  }
}

bool type_of_ctx(const FunctionSpec& spec, const EvalContext& E, const Exp& hole_ty);

namespace detail {

class Checker {
 public:
  Checker(const FunctionSpec& spec, TypingContext ctx, std::optional<Exp> hole_ty)
      : spec_(spec), ctx_(std::move(ctx)), hole_ty_(std::move(hole_ty)) {}

  TypeResult synth(const Exp& e) {
    switch (e.kind()) {
      case Kind::Var: {
        std::uint64_t i = e.var_index();
        if (!ctx_.is_term(i)) return err("var", e, "unbound or non-term index");
        return ctx_.term_type(i);
      }
      case Kind::Triv: return unit1();
      case Kind::LetIn: {
        TypeResult bound = synth(e.child(0));
        if (!bound.ok()) return bound;
        ctx_.push_term(bound.type());
        TypeResult body = synth(e.child(1));
        ctx_.pop();
        if (!body.ok()) return body;
        return strip(body.type(), 1, "let", e);
      }
      case Kind::Abort: {
        if (!wf_type(ctx_, e.child(0))) return err("abort", e, "target type ill-formed");
        TypeResult arg = synth(e.child(1));
        if (!arg.ok()) return arg;
        if (arg.type() != void0()) return err("abort", e, "argument not of type void");
        return e.child(0);
      }
      case Kind::Fun: {
        Exp a = e.child(0), r = e.child(1);
        if (!wf_type(ctx_, a)) return err("fun", e, "argument type ill-formed");
        if (!wf_type(ctx_, r)) return err("fun", e, "result type ill-formed");
        ctx_.push_term(arrow(a, r));
        ctx_.push_term(shift(a, 0, 1));
        TypeResult body = synth(e.child(2));
        ctx_.pop();
        ctx_.pop();
        if (!body.ok()) return body;
        if (body.type() != shift(r, 0, 2))
          return err("fun", e, "body does not have the declared result type");
        return arrow(a, r);
      }
      case Kind::App: {
        TypeResult fn = synth(e.child(0));
        if (!fn.ok()) return fn;
        if (fn.type().kind() != Kind::Arrow)
          return err("app", e, "applying a non-function");
        TypeResult arg = synth(e.child(1));
        if (!arg.ok()) return arg;
        if (arg.type() != fn.type().child(0))
          return err("app", e, "argument type mismatch");
        return fn.type().child(1);
      }
      case Kind::Pair: {
        TypeResult l = synth(e.child(0));
        if (!l.ok()) return l;
        TypeResult r = synth(e.child(1));
        if (!r.ok()) return r;
        return prod(l.type(), r.type());
      }
      case Kind::ProjL:
      case Kind::ProjR: {
        TypeResult p = synth(e.child(0));
        if (!p.ok()) return p;
        if (p.type().kind() != Kind::Prod)
          return err("proj", e, "projection from a non-product");
        return p.type().child(e.kind() == Kind::ProjL ? 0 : 1);
      }
      case Kind::TLam: {
        ctx_.push_type();
        TypeResult body = synth(e.child(0));
        ctx_.pop();
        if (!body.ok()) return body;
        return forall(body.type());
      }
      case Kind::TApp: {
        TypeResult fn = synth(e.child(0));
        if (!fn.ok()) return fn;
        if (fn.type().kind() != Kind::Forall)
          return err("tapp", e, "type application of a non-forall");
        if (!wf_type(ctx_, e.child(1))) return err("tapp", e, "type argument ill-formed");
        return subst(fn.type().child(0), 0, e.child(1));
      }
      case Kind::Pack: {
        Exp witness = e.child(0), as_ty = e.child(2);
        if (!wf_type(ctx_, witness)) return err("pack", e, "witness type ill-formed");
        if (as_ty.kind() != Kind::Exists || !wf_type(ctx_, as_ty))
          return err("pack", e, "annotation is not a well-formed existential");
        TypeResult payload = synth(e.child(1));
        if (!payload.ok()) return payload;
        if (payload.type() != subst(as_ty.child(0), 0, witness))
          return err("pack", e, "payload does not match the existential body");
        return as_ty;
      }
      case Kind::Open: {
        TypeResult scrut = synth(e.child(0));
        if (!scrut.ok()) return scrut;
        if (scrut.type().kind() != Kind::Exists)
          return err("open", e, "opening a non-existential");
        ctx_.push_type();
        ctx_.push_term(scrut.type().child(0));
        TypeResult body = synth(e.child(1));
        ctx_.pop();
        ctx_.pop();
        if (!body.ok()) return body;
        return strip(body.type(), 2, "open", e);
      }
      case Kind::Letcc: {
        Exp ty = e.child(0);
        if (!wf_type(ctx_, ty)) return err("letcc", e, "annotation ill-formed");
        ctx_.push_term(contty(ty));
        TypeResult body = synth(e.child(1));
        ctx_.pop();
        if (!body.ok()) return body;
        if (body.type() != shift(ty, 0, 1))
          return err("letcc", e, "body does not have the annotated type");
        return ty;
      }
      case Kind::Throw: {
        TypeResult val = synth(e.child(0));
        if (!val.ok()) return val;
        TypeResult cont = synth(e.child(1));
        if (!cont.ok()) return cont;
        if (cont.type() != contty(val.type()))
          return err("throw", e, "target is not a continuation of the value's type");
        return void0();
      }
      case Kind::ContVal: {
        Exp hole_ty = e.child(0), shape = e.child(1);
        if (!is_closed(hole_ty) || !wf_type(TypingContext{}, hole_ty))
          return err("contval", e, "hole type must be a closed well-formed type");
        if (!is_closed(shape)) return err("contval", e, "captured context must be closed");
        if (shape.ctxhole_count() != 1)
          return err("contval", e, "captured context must have exactly one hole");
        if (!type_of_ctx(spec_, EvalContext(shape), hole_ty))
          return err("contval", e, "captured context does not type at the answer type");
        return contty(hole_ty);
      }
      case Kind::PatHole: return arrow(spec_.arg_ty, spec_.ret_ty);
      case Kind::CtxHole:
        if (hole_ty_) return *hole_ty_;
        return err("hole", e, "context hole outside of context typing");
      default: return err("type-as-term", e, "type production in term position");
    }
  }

 private:
  TypeResult err(const char* rule, const Exp& at, const char* message) {
    return TypeError{rule, at, message};
  }

  // Drop `k` binder levels from a result type; a type mentioning the bound
  // variables would escape its scope.
  TypeResult strip(const Exp& ty, unsigned k, const char* rule, const Exp& at) {
    try {
      return shift(ty, 0, -static_cast<std::int64_t>(k));
    } catch (const MalformedError&) {
      return err(rule, at, "result type escapes its scope");
    }
  }

  const FunctionSpec& spec_;
  TypingContext ctx_;
  std::optional<Exp> hole_ty_;
};

}  // namespace detail

/// The unique type of e under ctx, or a TypeError. The spec parameter gives
/// the pattern hole its global type arrow(argTy, retTy); terms without
/// pattern holes or continuation values type identically under any spec.
inline TypeResult type_of(const FunctionSpec& spec, const TypingContext& ctx,
                          const Exp& e) {
  return detail::Checker(spec, ctx, std::nullopt).synth(e);
}

/// E |- holeTy => unit: plugging any closed term of type holeTy yields a
/// closed program of the answer type. Implemented by typing E's shape with
/// the hole assigned holeTy.
inline bool type_of_ctx(const FunctionSpec& spec, const EvalContext& E,
                        const Exp& hole_ty) {
  if (!is_closed(E.shape())) return false;
  if (!is_closed(hole_ty) || !wf_type(TypingContext{}, hole_ty)) return false;
  TypeResult r = detail::Checker(spec, TypingContext{}, hole_ty).synth(E.shape());
  return r.ok() && r.type() == unit1();
}

/// Full validity of a function spec: closed well-formed types and a body
/// typing at the result type under f and x.
inline bool validate_spec(const FunctionSpec& spec) {
  TypingContext ctx;
  if (!wf_type(ctx, spec.arg_ty) || !wf_type(ctx, spec.ret_ty)) return false;
  TypeResult r = type_of(spec, ctx, spec.as_fun());
  return r.ok() && r.type() == arrow(spec.arg_ty, spec.ret_ty);
}

}  // namespace unwind
