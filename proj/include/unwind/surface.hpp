#pragma once

// Textual surface syntax: s-expressions with named binders, compiled to the
// De Bruijn core. One form per production; printing invents depth-indexed
// binder names so that parse(print(e)) reproduces e exactly.
//
//   types:  unit  void  (-> T U)  (* T U)  (forall a T)  (exists a T)  (cont T)
//   terms:  ()  (fun f (x : T) : U e)  (e1 e2)  (pair e1 e2)  (fst e)  (snd e)
//           (tlam a e)  (tapp e T)  (pack T e (a T2))  (open e (a x) e2)
//           (let (x e1) e2)  (letcc (x : T) e)  (throw e1 e2)  (abort T e)
//           @ for the pattern hole, _ for the context hole
//
// Captured continuations print as (contval T E) but are rejected by the
// parser: they are runtime-internal forms. Lines starting with ; are comments.

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "unwind/syntax.hpp"

namespace unwind {

struct ParseError {
  std::size_t line = 0;
  std::size_t col = 0;
  std::string message;
};

class ParseResult {
  std::variant<Exp, ParseError> v_;

 public:
  ParseResult(Exp e) : v_(std::move(e)) {}
  ParseResult(ParseError e) : v_(std::move(e)) {}
  bool ok() const { return std::holds_alternative<Exp>(v_); }
  const Exp& exp() const { return std::get<Exp>(v_); }
  const ParseError& error() const { return std::get<ParseError>(v_); }
};

namespace surface_detail {

struct Sexp {
  bool is_atom;
  std::string atom;
  std::vector<Sexp> items;
  std::size_t line, col;
};

struct Fail {
  ParseError err;
};

[[noreturn]] inline void fail(std::size_t line, std::size_t col, std::string msg) {
  throw Fail{ParseError{line, col, std::move(msg)}};
}

struct Token {
  enum class Kind { LParen, RParen, Atom };
  Kind kind;
  std::string text;
  std::size_t line, col;
};

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == ';') {  // comment to end of line
      while (i < text.size() && text[i] != '\n') advance(text[i++]);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(c);
      ++i;
      continue;
    }
    if (c == '(' || c == ')') {
      out.push_back({c == '(' ? Token::Kind::LParen : Token::Kind::RParen,
                     std::string(1, c), line, col});
      advance(c);
      ++i;
      continue;
    }
    std::size_t start = i, scol = col, sline = line;
    while (i < text.size()) {
      char d = text[i];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' ||
          d == ';')
        break;
      advance(d);
      ++i;
    }
    out.push_back({Token::Kind::Atom, std::string(text.substr(start, i - start)),
                   sline, scol});
  }
  return out;
}

inline Sexp read_sexp(const std::vector<Token>& toks, std::size_t& pos) {
  if (pos >= toks.size()) fail(0, 0, "unexpected end of input");
  const Token& t = toks[pos];
  if (t.kind == Token::Kind::Atom) {
    ++pos;
    return Sexp{true, t.text, {}, t.line, t.col};
  }
  if (t.kind == Token::Kind::RParen) fail(t.line, t.col, "unexpected )");
  ++pos;  // consume (
  Sexp s{false, "", {}, t.line, t.col};
  while (true) {
    if (pos >= toks.size()) fail(t.line, t.col, "unterminated (");
    if (toks[pos].kind == Token::Kind::RParen) {
      ++pos;
      return s;
    }
    s.items.push_back(read_sexp(toks, pos));
  }
}

inline bool is_keyword(const std::string& a) {
  static const char* kws[] = {"unit", "void",  "->",    "*",     "forall", "exists",
                              "cont", "fun",   "pair",  "fst",   "snd",    "tlam",
                              "tapp", "pack",  "open",  "let",   "letcc",  "throw",
                              "abort", "contval", ":",   "@",     "_"};
  for (const char* k : kws)
    if (a == k) return true;
  return false;
}

class Elaborator {
 public:
  Exp exp(const Sexp& s) {
    if (s.is_atom) return atom(s);
    if (s.items.empty()) return triv();
    const Sexp& head = s.items[0];
    if (head.is_atom) {
      const std::string& h = head.atom;
      if (h == "->") return binary(s, [](Exp a, Exp b) { return arrow(a, b); });
      if (h == "*") return binary(s, [](Exp a, Exp b) { return prod(a, b); });
      if (h == "cont") return unary(s, [](Exp a) { return contty(a); });
      if (h == "forall") return quantifier(s, true);
      if (h == "exists") return quantifier(s, false);
      if (h == "fun") return fun_form(s);
      if (h == "pair") return binary(s, [](Exp a, Exp b) { return pair_(a, b); });
      if (h == "fst") return unary(s, [](Exp a) { return projl(a); });
      if (h == "snd") return unary(s, [](Exp a) { return projr(a); });
      if (h == "tlam") return tlam_form(s);
      if (h == "tapp") return binary(s, [](Exp a, Exp b) { return tapp(a, b); });
      if (h == "pack") return pack_form(s);
      if (h == "open") return open_form(s);
      if (h == "let") return let_form(s);
      if (h == "letcc") return letcc_form(s);
      if (h == "throw") return binary(s, [](Exp a, Exp b) { return throw_(a, b); });
      if (h == "abort") return binary(s, [](Exp a, Exp b) { return abort_(a, b); });
      if (h == "contval")
        fail(s.line, s.col, "contval is a runtime-internal form, not source syntax");
    }
    if (s.items.size() == 2) return app(exp(s.items[0]), exp(s.items[1]));
    fail(s.line, s.col, "malformed form");
  }

 private:
  std::vector<std::string> env_;

  Exp atom(const Sexp& s) {
    const std::string& a = s.atom;
    if (a == "unit") return unit1();
    if (a == "void") return void0();
    if (a == "@") return pathole();
    if (a == "_") return ctxhole();
    if (is_keyword(a)) fail(s.line, s.col, "keyword '" + a + "' used as expression");
    for (std::size_t i = 0; i < env_.size(); ++i) {
      if (env_[env_.size() - 1 - i] == a) return var(i);
    }
    fail(s.line, s.col, "unbound name '" + a + "'");
  }

  std::string binder(const Sexp& s) {
    if (!s.is_atom || is_keyword(s.atom))
      fail(s.line, s.col, "expected a binder name");
    return s.atom;
  }

  void expect_colon(const Sexp& s) {
    if (!s.is_atom || s.atom != ":") fail(s.line, s.col, "expected ':'");
  }

  void expect_items(const Sexp& s, std::size_t n, const char* what) {
    if (s.items.size() != n) fail(s.line, s.col, std::string("malformed ") + what);
  }

  template <typename F>
  Exp unary(const Sexp& s, F mk) {
    expect_items(s, 2, "form");
    return mk(exp(s.items[1]));
  }
  template <typename F>
  Exp binary(const Sexp& s, F mk) {
    expect_items(s, 3, "form");
    Exp a = exp(s.items[1]);
    return mk(a, exp(s.items[2]));
  }

  Exp quantifier(const Sexp& s, bool is_forall) {
    expect_items(s, 3, "quantifier");
    env_.push_back(binder(s.items[1]));
    Exp body = exp(s.items[2]);
    env_.pop_back();
    return is_forall ? forall(body) : exists(body);
  }

  // (fun f (x : T) : U e)
  Exp fun_form(const Sexp& s) {
    expect_items(s, 6, "fun");
    std::string f = binder(s.items[1]);
    const Sexp& b = s.items[2];
    if (b.is_atom) fail(b.line, b.col, "expected (x : T)");
    expect_items(b, 3, "fun binder");
    std::string x = binder(b.items[0]);
    expect_colon(b.items[1]);
    Exp arg_ty = exp(b.items[2]);
    expect_colon(s.items[3]);
    Exp ret_ty = exp(s.items[4]);
    env_.push_back(f);
    env_.push_back(x);
    Exp body = exp(s.items[5]);
    env_.pop_back();
    env_.pop_back();
    return fun(arg_ty, ret_ty, body);
  }

  Exp tlam_form(const Sexp& s) {
    expect_items(s, 3, "tlam");
    env_.push_back(binder(s.items[1]));
    Exp body = exp(s.items[2]);
    env_.pop_back();
    return tlam(body);
  }

  // (pack T e (a T2)), the annotation reads as exists a. T2
  Exp pack_form(const Sexp& s) {
    expect_items(s, 4, "pack");
    Exp witness = exp(s.items[1]);
    Exp payload = exp(s.items[2]);
    const Sexp& ann = s.items[3];
    if (ann.is_atom) fail(ann.line, ann.col, "expected (a T)");
    expect_items(ann, 2, "pack annotation");
    env_.push_back(binder(ann.items[0]));
    Exp body = exp(ann.items[1]);
    env_.pop_back();
    return pack(witness, payload, exists(body));
  }

  // (open e (a x) e2)
  Exp open_form(const Sexp& s) {
    expect_items(s, 4, "open");
    Exp scrut = exp(s.items[1]);
    const Sexp& b = s.items[2];
    if (b.is_atom) fail(b.line, b.col, "expected (a x)");
    expect_items(b, 2, "open binder");
    std::string a = binder(b.items[0]);
    std::string x = binder(b.items[1]);
    env_.push_back(a);
    env_.push_back(x);
    Exp body = exp(s.items[3]);
    env_.pop_back();
    env_.pop_back();
    return open_(scrut, body);
  }

  // (let (x e1) e2)
  Exp let_form(const Sexp& s) {
    expect_items(s, 3, "let");
    const Sexp& b = s.items[1];
    if (b.is_atom) fail(b.line, b.col, "expected (x e1)");
    expect_items(b, 2, "let binder");
    std::string x = binder(b.items[0]);
    Exp bound = exp(b.items[1]);
    env_.push_back(x);
    Exp body = exp(s.items[2]);
    env_.pop_back();
    return letin(bound, body);
  }

  // (letcc (x : T) e)
  Exp letcc_form(const Sexp& s) {
    expect_items(s, 3, "letcc");
    const Sexp& b = s.items[1];
    if (b.is_atom) fail(b.line, b.col, "expected (x : T)");
    expect_items(b, 3, "letcc binder");
    std::string x = binder(b.items[0]);
    expect_colon(b.items[1]);
    Exp ty = exp(b.items[2]);
    env_.push_back(x);
    Exp body = exp(s.items[2]);
    env_.pop_back();
    return letcc(ty, body);
  }
};

inline void print_rec(const Exp& e, std::vector<std::string>& env, std::string& out) {
  auto name_at = [&](std::uint64_t idx) -> std::string {
    if (idx < env.size()) return env[env.size() - 1 - idx];
    return "#" + std::to_string(idx);  // free index; not reparsable
  };
  auto fresh = [&](const char* stem) {
    return std::string(stem) + std::to_string(env.size());
  };
  auto sub = [&](const Exp& k) { print_rec(k, env, out); };
  switch (e.kind()) {
    case Kind::Void0: out += "void"; return;
    case Kind::Unit1: out += "unit"; return;
    case Kind::Arrow:
    case Kind::Prod:
      out += e.kind() == Kind::Arrow ? "(-> " : "(* ";
      sub(e.child(0));
      out += ' ';
      sub(e.child(1));
      out += ')';
      return;
    case Kind::Forall:
    case Kind::Exists: {
      std::string a = fresh("a");
      out += e.kind() == Kind::Forall ? "(forall " : "(exists ";
      out += a + " ";
      env.push_back(a);
      sub(e.child(0));
      env.pop_back();
      out += ')';
      return;
    }
    case Kind::ContTy:
      out += "(cont ";
      sub(e.child(0));
      out += ')';
      return;
    case Kind::Var: out += name_at(e.var_index()); return;
    case Kind::LetIn: {
      std::string x = fresh("x");
      out += "(let (" + x + " ";
      sub(e.child(0));
      out += ") ";
      env.push_back(x);
      sub(e.child(1));
      env.pop_back();
      out += ')';
      return;
    }
    case Kind::Abort:
      out += "(abort ";
      sub(e.child(0));
      out += ' ';
      sub(e.child(1));
      out += ')';
      return;
    case Kind::Triv: out += "()"; return;
    case Kind::Fun: {
      std::string f = fresh("f");
      std::string x = "x" + std::to_string(env.size() + 1);
      out += "(fun " + f + " (" + x + " : ";
      sub(e.child(0));
      out += ") : ";
      sub(e.child(1));
      out += ' ';
      env.push_back(f);
      env.push_back(x);
      sub(e.child(2));
      env.pop_back();
      env.pop_back();
      out += ')';
      return;
    }
    case Kind::App:
      out += '(';
      sub(e.child(0));
      out += ' ';
      sub(e.child(1));
      out += ')';
      return;
    case Kind::Pair:
      out += "(pair ";
      sub(e.child(0));
      out += ' ';
      sub(e.child(1));
      out += ')';
      return;
    case Kind::ProjL:
    case Kind::ProjR:
      out += e.kind() == Kind::ProjL ? "(fst " : "(snd ";
      sub(e.child(0));
      out += ')';
      return;
    case Kind::TLam: {
      std::string a = fresh("a");
      out += "(tlam " + a + " ";
      env.push_back(a);
      sub(e.child(0));
      env.pop_back();
      out += ')';
      return;
    }
    case Kind::TApp:
      out += "(tapp ";
      sub(e.child(0));
      out += ' ';
      sub(e.child(1));
      out += ')';
      return;
    case Kind::Pack: {
      out += "(pack ";
      sub(e.child(0));
      out += ' ';
      sub(e.child(1));
      out += ' ';
      Exp ann = e.child(2);
      if (ann.kind() == Kind::Exists) {
        std::string a = fresh("a");
        out += "(" + a + " ";
        env.push_back(a);
        sub(ann.child(0));
        env.pop_back();
        out += ')';
      } else {
        sub(ann);  // malformed annotation, printed raw
      }
      out += ')';
      return;
    }
    case Kind::Open: {
      out += "(open ";
      sub(e.child(0));
      std::string a = fresh("a");
      std::string x = "x" + std::to_string(env.size() + 1);
      out += " (" + a + " " + x + ") ";
      env.push_back(a);
      env.push_back(x);
      sub(e.child(1));
      env.pop_back();
      env.pop_back();
      out += ')';
      return;
    }
    case Kind::Letcc: {
      std::string x = fresh("x");
      out += "(letcc (" + x + " : ";
      sub(e.child(0));
      out += ") ";
      env.push_back(x);
      sub(e.child(1));
      env.pop_back();
      out += ')';
      return;
    }
    case Kind::Throw:
      out += "(throw ";
      sub(e.child(0));
      out += ' ';
      sub(e.child(1));
      out += ')';
      return;
    case Kind::ContVal:
      out += "(contval ";
      sub(e.child(0));
      out += ' ';
      sub(e.child(1));
      out += ')';
      return;
    case Kind::CtxHole: out += '_'; return;
    case Kind::PatHole: out += '@'; return;
  }
}

}  // namespace surface_detail

inline ParseResult parse(std::string_view text) {
  using namespace surface_detail;
  try {
    std::vector<Token> toks = tokenize(text);
    if (toks.empty()) fail(1, 1, "empty input");
    std::size_t pos = 0;
    Sexp s = read_sexp(toks, pos);
    if (pos != toks.size())
      fail(toks[pos].line, toks[pos].col, "trailing input after expression");
    Elaborator el;
    return el.exp(s);
  } catch (const Fail& f) {
    return f.err;
  }
}

inline std::string print(const Exp& e) {
  std::string out;
  std::vector<std::string> env;
  surface_detail::print_rec(e, env, out);
  return out;
}

}  // namespace unwind
