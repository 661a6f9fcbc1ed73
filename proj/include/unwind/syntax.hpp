#pragma once

// Unified abstract syntax for a polymorphic call-by-value language with
// first-class continuations. One node sort covers types, terms, evaluation
// contexts and patterns, so substitution is implemented exactly once.
// Variables are De Bruijn indices; binders carry no names.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>

namespace unwind {

/// Raised on structurally invalid inputs: bad context hole counts,
/// underflowing negative shifts, ill-formed function specs.
struct MalformedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Kind : std::uint8_t {
  // type productions
  Void0,
  Unit1,
  Arrow,
  Prod,
  Forall,
  Exists,
  ContTy,
  // term productions
  Var,
  LetIn,
  Abort,
  Triv,
  Fun,
  App,
  Pair,
  ProjL,
  ProjR,
  TLam,
  TApp,
  Pack,
  Open,
  Letcc,
  Throw,
  ContVal,
  // special constants
  CtxHole,  // evaluation-context hole [.]
  PatHole,  // pattern variable for the function under study
};

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Void0: return "void";
    case Kind::Unit1: return "unit";
    case Kind::Arrow: return "arrow";
    case Kind::Prod: return "prod";
    case Kind::Forall: return "forall";
    case Kind::Exists: return "exists";
    case Kind::ContTy: return "cont";
    case Kind::Var: return "var";
    case Kind::LetIn: return "let";
    case Kind::Abort: return "abort";
    case Kind::Triv: return "triv";
    case Kind::Fun: return "fun";
    case Kind::App: return "app";
    case Kind::Pair: return "pair";
    case Kind::ProjL: return "fst";
    case Kind::ProjR: return "snd";
    case Kind::TLam: return "tlam";
    case Kind::TApp: return "tapp";
    case Kind::Pack: return "pack";
    case Kind::Open: return "open";
    case Kind::Letcc: return "letcc";
    case Kind::Throw: return "throw";
    case Kind::ContVal: return "contval";
    case Kind::CtxHole: return "hole";
    case Kind::PatHole: return "pat";
  }
  return "?";
}

/// Number of extra binders child `child` of a node of kind `k` lives under.
/// fun binds the function itself (index 1) and its argument (index 0);
/// open binds a type (index 1) and a term (index 0).
inline unsigned binder_count(Kind k, std::size_t child) {
  switch (k) {
    case Kind::LetIn: return child == 1 ? 1 : 0;
    case Kind::Fun: return child == 2 ? 2 : 0;
    case Kind::Forall:
    case Kind::Exists:
    case Kind::TLam: return child == 0 ? 1 : 0;
    case Kind::Open: return child == 1 ? 2 : 0;
    case Kind::Letcc: return child == 1 ? 1 : 0;
    default: return 0;
  }
}

namespace detail {

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = a + b;
  return r < a ? ~std::uint64_t{0} : r;
}

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Immutable expression. Copies share structure; every operation on Exp is
/// pure, so values may be used freely from concurrent executions.
///
/// Each node caches its tree size (saturating: shared substructure can make
/// tree sizes astronomically large), a structural hash, the least `d` such
/// that the expression is closed at depth `d`, the number of context holes
/// not owned by an enclosed contval, and whether a pattern hole occurs.
class Exp {
  struct Node;
  using Ptr = std::shared_ptr<const Node>;

  struct Node {
    Kind kind;
    std::uint8_t arity;
    std::uint8_t holes;  // ctx holes outside contval, saturated at 2
    bool has_pat;
    std::uint64_t index;  // Var only
    std::uint64_t size;
    std::uint64_t depth;  // longest path to a leaf; exact where size saturates
    std::uint64_t hash;
    std::uint64_t free_bound;
    std::array<Ptr, 3> kid;
  };

  Ptr n_;

  explicit Exp(Ptr p) : n_(std::move(p)) {}

 public:
  static Exp make(Kind k, std::uint64_t index, std::initializer_list<Exp> kids) {
    auto node = std::make_shared<Node>();
    node->kind = k;
    node->arity = static_cast<std::uint8_t>(kids.size());
    node->index = index;
    node->size = 1;
    node->free_bound = k == Kind::Var ? index + 1 : 0;
    node->has_pat = k == Kind::PatHole;
    node->holes = k == Kind::CtxHole ? 1 : 0;
    std::uint64_t h = detail::mix64(static_cast<std::uint64_t>(k) * 0x100000001b3ull + index);
    std::size_t i = 0;
    for (const Exp& kid : kids) {
      node->kid[i] = kid.n_;
      node->size = detail::sat_add(node->size, kid.n_->size);
      h = detail::mix64(h ^ detail::mix64(kid.n_->hash + i + 1));
      unsigned b = binder_count(k, i);
      std::uint64_t fb = kid.n_->free_bound;
      fb = fb > b ? fb - b : 0;
      if (fb > node->free_bound) node->free_bound = fb;
      if (k != Kind::ContVal) {
        std::uint64_t hs = node->holes + kid.n_->holes;
        node->holes = static_cast<std::uint8_t>(hs > 2 ? 2 : hs);
      }
      node->has_pat = node->has_pat || kid.n_->has_pat;
      ++i;
    }
    node->hash = h;
    return Exp(std::move(node));
  }

  Kind kind() const { return n_->kind; }
  std::size_t arity() const { return n_->arity; }
  Exp child(std::size_t i) const {
    if (i >= n_->arity) throw MalformedError("child index out of range");
    return Exp(n_->kid[i]);
  }
  std::uint64_t var_index() const {
    if (n_->kind != Kind::Var) throw MalformedError("var_index on non-variable");
    return n_->index;
  }

  /// Node count of the syntax tree (saturating at 2^64-1).
  std::uint64_t size() const { return n_->size; }
  std::uint64_t hash() const { return n_->hash; }
  /// Least depth d such that the expression has no free index >= d.
  std::uint64_t free_bound() const { return n_->free_bound; }
  bool has_pathole() const { return n_->has_pat; }
  /// Context holes owned by this expression (holes under contval belong to
  /// the captured continuation and are not counted). Saturates at 2.
  unsigned ctxhole_count() const { return n_->holes; }

  bool same_node(const Exp& o) const { return n_ == o.n_; }
  /// Stable identity of the underlying node, for memo tables.
  const void* node_id() const { return n_.get(); }

  friend bool equal(const Exp& a, const Exp& b);
};

// ---- constructors ----------------------------------------------------------

inline Exp void0() {
  static const Exp e = Exp::make(Kind::Void0, 0, {});
  return e;
}
inline Exp unit1() {
  static const Exp e = Exp::make(Kind::Unit1, 0, {});
  return e;
}
inline Exp arrow(Exp dom, Exp cod) { return Exp::make(Kind::Arrow, 0, {dom, cod}); }
inline Exp prod(Exp l, Exp r) { return Exp::make(Kind::Prod, 0, {l, r}); }
inline Exp forall(Exp body) { return Exp::make(Kind::Forall, 0, {body}); }
inline Exp exists(Exp body) { return Exp::make(Kind::Exists, 0, {body}); }
inline Exp contty(Exp arg) { return Exp::make(Kind::ContTy, 0, {arg}); }

inline Exp var(std::uint64_t index) { return Exp::make(Kind::Var, index, {}); }
inline Exp letin(Exp bound, Exp body) { return Exp::make(Kind::LetIn, 0, {bound, body}); }
inline Exp abort_(Exp ty, Exp arg) { return Exp::make(Kind::Abort, 0, {ty, arg}); }
inline Exp triv() {
  static const Exp e = Exp::make(Kind::Triv, 0, {});
  return e;
}
inline Exp fun(Exp arg_ty, Exp ret_ty, Exp body) {
  return Exp::make(Kind::Fun, 0, {arg_ty, ret_ty, body});
}
inline Exp app(Exp fn, Exp arg) { return Exp::make(Kind::App, 0, {fn, arg}); }
inline Exp pair_(Exp l, Exp r) { return Exp::make(Kind::Pair, 0, {l, r}); }
inline Exp projl(Exp arg) { return Exp::make(Kind::ProjL, 0, {arg}); }
inline Exp projr(Exp arg) { return Exp::make(Kind::ProjR, 0, {arg}); }
inline Exp tlam(Exp body) { return Exp::make(Kind::TLam, 0, {body}); }
inline Exp tapp(Exp fn, Exp ty) { return Exp::make(Kind::TApp, 0, {fn, ty}); }
inline Exp pack(Exp witness, Exp payload, Exp as_ty) {
  return Exp::make(Kind::Pack, 0, {witness, payload, as_ty});
}
inline Exp open_(Exp scrut, Exp body) { return Exp::make(Kind::Open, 0, {scrut, body}); }
inline Exp letcc(Exp ty, Exp body) { return Exp::make(Kind::Letcc, 0, {ty, body}); }
inline Exp throw_(Exp val, Exp cont) { return Exp::make(Kind::Throw, 0, {val, cont}); }

/// A captured continuation. Carries the type of its hole so that typing is
/// syntax-directed: the hole type of a bare context shape is not unique
/// (e.g. fst [.] accepts any product completing its second component).
inline Exp contval(Exp hole_ty, Exp ctx_shape) {
  return Exp::make(Kind::ContVal, 0, {hole_ty, ctx_shape});
}
inline Exp ctxhole() {
  static const Exp e = Exp::make(Kind::CtxHole, 0, {});
  return e;
}
inline Exp pathole() {
  static const Exp e = Exp::make(Kind::PatHole, 0, {});
  return e;
}

// ---- structural operations -------------------------------------------------

inline bool equal(const Exp& a, const Exp& b) {
  if (a.n_ == b.n_) return true;
  const auto& x = *a.n_;
  const auto& y = *b.n_;
  if (x.hash != y.hash || x.kind != y.kind || x.index != y.index ||
      x.arity != y.arity || x.size != y.size)
    return false;
  for (std::size_t i = 0; i < x.arity; ++i)
    if (!equal(Exp(x.kid[i]), Exp(y.kid[i]))) return false;
  return true;
}

inline bool operator==(const Exp& a, const Exp& b) { return equal(a, b); }
inline bool operator!=(const Exp& a, const Exp& b) { return !equal(a, b); }

inline std::uint64_t size(const Exp& e) { return e.size(); }

/// True iff e has no free index >= depth.
inline bool is_closed(const Exp& e, std::uint64_t depth = 0) {
  return e.free_bound() <= depth;
}

namespace detail {

template <typename F>
Exp map_children(const Exp& e, F&& f) {
  switch (e.arity()) {
    case 0: return e;
    case 1: {
      Exp c0 = f(e.child(0), 0);
      if (c0.same_node(e.child(0))) return e;
      return Exp::make(e.kind(), 0, {c0});
    }
    case 2: {
      Exp c0 = f(e.child(0), 0);
      Exp c1 = f(e.child(1), 1);
      if (c0.same_node(e.child(0)) && c1.same_node(e.child(1))) return e;
      return Exp::make(e.kind(), 0, {c0, c1});
    }
    default: {
      Exp c0 = f(e.child(0), 0);
      Exp c1 = f(e.child(1), 1);
      Exp c2 = f(e.child(2), 2);
      if (c0.same_node(e.child(0)) && c1.same_node(e.child(1)) &&
          c2.same_node(e.child(2)))
        return e;
      return Exp::make(e.kind(), 0, {c0, c1, c2});
    }
  }
}

}  // namespace detail

/// Adjust free indices: every free index i >= cutoff becomes i + amount.
/// A negative shift that would move a present index below the cutoff is a
/// malformed input and throws.
inline Exp shift(const Exp& e, std::uint64_t cutoff, std::int64_t amount) {
  if (amount == 0 || e.free_bound() <= cutoff) return e;
  if (e.kind() == Kind::Var) {
    std::uint64_t i = e.var_index();
    if (i < cutoff) return e;
    if (amount < 0) {
      std::uint64_t drop = static_cast<std::uint64_t>(-amount);
      if (i - cutoff < drop)
        throw MalformedError("negative shift underflow at index " + std::to_string(i));
      return var(i - drop);
    }
    return var(i + static_cast<std::uint64_t>(amount));
  }
  return detail::map_children(e, [&](const Exp& kid, std::size_t pos) {
    return shift(kid, cutoff + binder_count(e.kind(), pos), amount);
  });
}

namespace detail {

inline Exp subst_rec(const Exp& e, std::uint64_t target, const Exp& repl,
                     std::uint64_t depth) {
  if (e.free_bound() <= target + depth) return e;  // target absent above here
  if (e.kind() == Kind::Var) {
    std::uint64_t i = e.var_index();
    if (i == target + depth) return shift(repl, 0, static_cast<std::int64_t>(depth));
    if (i > target + depth) return var(i - 1);
    return e;
  }
  return map_children(e, [&](const Exp& kid, std::size_t pos) {
    return subst_rec(kid, target, repl, depth + binder_count(e.kind(), pos));
  });
}

inline Exp subst2_rec(const Exp& e, const Exp& r1, const Exp& r0, std::uint64_t depth) {
  if (e.free_bound() <= depth) return e;
  if (e.kind() == Kind::Var) {
    std::uint64_t i = e.var_index();
    if (i == depth + 1) return shift(r1, 0, static_cast<std::int64_t>(depth));
    if (i == depth) return shift(r0, 0, static_cast<std::int64_t>(depth));
    if (i > depth + 1) return var(i - 2);
    return e;
  }
  return map_children(e, [&](const Exp& kid, std::size_t pos) {
    return subst2_rec(kid, r1, r0, depth + binder_count(e.kind(), pos));
  });
}

}  // namespace detail

/// Single-variable substitution: replace free index `index` by `replacement`
/// (lifted under binders); free indices above `index` decrement by one.
inline Exp subst(const Exp& e, std::uint64_t index, const Exp& replacement) {
  return detail::subst_rec(e, index, replacement, 0);
}

/// Simultaneous substitution of index 1 and index 0, as in the beta rule
/// [fun.../f, v/x] body. Free indices above 1 decrement by two.
inline Exp subst2(const Exp& e, const Exp& repl_for_1, const Exp& repl_for_0) {
  return detail::subst2_rec(e, repl_for_1, repl_for_0, 0);
}

// ---- evaluation contexts ---------------------------------------------------

namespace detail {

// Child slots the step relation's frame rules descend into. The hole of a
// context must sit on a chain of these, so it is never under a binder and
// never in a type slot.
inline bool evaluand_slot(Kind k, std::size_t child) {
  switch (k) {
    case Kind::App:
    case Kind::Pair:
    case Kind::Throw: return child == 0 || child == 1;
    case Kind::LetIn:
    case Kind::ProjL:
    case Kind::ProjR:
    case Kind::TApp:
    case Kind::Open: return child == 0;
    case Kind::Abort:
    case Kind::Pack: return child == 1;
    default: return false;
  }
}

inline bool hole_on_frame_chain(const Exp& shape) {
  if (shape.kind() == Kind::CtxHole) return true;
  for (std::size_t i = 0; i < shape.arity(); ++i) {
    Exp kid = shape.child(i);
    if (shape.kind() != Kind::ContVal && kid.ctxhole_count() > 0)
      return evaluand_slot(shape.kind(), i) && hole_on_frame_chain(kid);
  }
  return false;
}

}  // namespace detail

/// An expression with exactly one context hole, sitting on a chain of frame
/// positions. Contexts never bind over their hole, so plugging needs no
/// index shifting; both facts are checked here, not assumed.
class EvalContext {
  Exp shape_;

 public:
  explicit EvalContext(Exp shape) : shape_(std::move(shape)) {
    if (shape_.ctxhole_count() != 1)
      throw MalformedError("evaluation context must contain exactly one hole");
    if (!detail::hole_on_frame_chain(shape_))
      throw MalformedError("context hole must sit in an evaluand position");
  }
  static EvalContext empty() { return EvalContext(ctxhole()); }

  const Exp& shape() const { return shape_; }
  bool is_empty() const { return shape_.kind() == Kind::CtxHole; }
};

namespace detail {

inline Exp plug_shape(const Exp& shape, const Exp& e) {
  if (shape.kind() == Kind::CtxHole) return e;
  return map_children(shape, [&](const Exp& kid, std::size_t) {
    return kid.ctxhole_count() > 0 ? plug_shape(kid, e) : kid;
  });
}

}  // namespace detail

/// E[e]: the shape of E with its hole replaced by e. Holes inside contval
/// nodes belong to the captured continuation and are left alone.
inline Exp plug(const EvalContext& E, const Exp& e) {
  return detail::plug_shape(E.shape(), e);
}

/// Extend E by a frame: the result's shape is E with the frame in its hole.
inline EvalContext compose_ctx(const EvalContext& E, const EvalContext& frame) {
  return EvalContext(detail::plug_shape(E.shape(), frame.shape()));
}

// ---- the function under study ----------------------------------------------

/// Unrolling depth: a finite natural (F_n) or omega (the recursive function).
class UnrollDepth {
  bool omega_;
  std::uint64_t n_;
  UnrollDepth(bool o, std::uint64_t n) : omega_(o), n_(n) {}

 public:
  static UnrollDepth finite(std::uint64_t n) { return UnrollDepth(false, n); }
  static UnrollDepth omega() { return UnrollDepth(true, 0); }
  bool is_omega() const { return omega_; }
  std::uint64_t depth() const {
    if (omega_) throw MalformedError("depth() of omega");
    return n_;
  }
  friend bool operator==(const UnrollDepth& a, const UnrollDepth& b) {
    return a.omega_ == b.omega_ && (a.omega_ || a.n_ == b.n_);
  }
};

/// The fixed recursive function under study: closed argument and result
/// types, and a body typed under the function itself (index 1) and its
/// argument (index 0).
struct FunctionSpec {
  Exp arg_ty;
  Exp ret_ty;
  Exp body;

  FunctionSpec(Exp a, Exp r, Exp b)
      : arg_ty(std::move(a)), ret_ty(std::move(r)), body(std::move(b)) {
    if (!is_closed(arg_ty) || !is_closed(ret_ty))
      throw MalformedError("function spec types must be closed");
    if (body.free_bound() > 2)
      throw MalformedError("function spec body has free indices above 1");
  }

  /// The recursive function itself, fun f(x : A) : B. body.
  Exp as_fun() const { return fun(arg_ty, ret_ty, body); }

  /// Decompose a closed fun node into a spec.
  static FunctionSpec from_fun(const Exp& f) {
    if (f.kind() != Kind::Fun || !is_closed(f))
      throw MalformedError("function spec must be a closed fun");
    return FunctionSpec(f.child(0), f.child(1), f.child(2));
  }
};

/// Number of pattern-hole leaves in p.
inline std::uint64_t pathole_count(const Exp& p) {
  if (!p.has_pathole()) return 0;
  if (p.kind() == Kind::PatHole) return 1;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < p.arity(); ++i) total += pathole_count(p.child(i));
  return total;
}

}  // namespace unwind
