#include "locrpc/source.hpp"

#include <cctype>
#include <sstream>
#include <utility>
#include <vector>

namespace locrpc {

const char* to_string(Loc a) { return a == Loc::Client ? "client" : "server"; }

const char* to_string(BaseKind b) {
  switch (b) {
    case BaseKind::Int: return "Int";
    case BaseKind::Str: return "Str";
    case BaseKind::Unit: return "Unit";
  }
  return "?";
}

BaseKind Literal::base() const {
  if (std::holds_alternative<std::int64_t>(v_)) return BaseKind::Int;
  if (std::holds_alternative<std::string>(v_)) return BaseKind::Str;
  return BaseKind::Unit;
}

std::string Literal::show() const {
  switch (base()) {
    case BaseKind::Int: return std::to_string(as_int());
    case BaseKind::Str: {
      std::string out = "\"";
      for (char c : as_text()) {
        switch (c) {
          case '"': out += "\\\""; break;
          case '\\': out += "\\\\"; break;
          case '\n': out += "\\n"; break;
          default: out += c;
        }
      }
      out += '"';
      return out;
    }
    case BaseKind::Unit: return "()";
  }
  return "?";
}

namespace src {

TermPtr var(std::string name, SourceSpan span) {
  return std::make_shared<Term>(Term{Term::Var{std::move(name)}, span});
}
TermPtr lam(Loc loc, std::string param, TermPtr body, SourceSpan span) {
  return std::make_shared<Term>(Term{Term::Lam{loc, std::move(param), std::move(body)}, span});
}
TermPtr app(TermPtr fun, TermPtr arg, SourceSpan span) {
  return std::make_shared<Term>(Term{Term::App{std::move(fun), std::move(arg)}, span});
}
TermPtr lit(Literal value, SourceSpan span) {
  return std::make_shared<Term>(Term{Term::Const{std::move(value)}, span});
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok { LamC, LamS, Dot, LParen, RParen, Unit, Ident, Int, Str, End };

struct Token {
  Tok kind;
  std::string text;
  std::int64_t number = 0;
  SourceSpan span;
};

bool ident_start(char c) { return c >= 'a' && c <= 'z'; }
bool ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      SourceSpan sp = here();
      if (pos_ >= s_.size()) {
        out.push_back({Tok::End, "", 0, sp});
        return out;
      }
      char c = s_[pos_];
      if (c == '\\') {
        advance();
        if (pos_ >= s_.size() || (s_[pos_] != 'c' && s_[pos_] != 's'))
          fail("expected 'c' or 's' after '\\'", sp);
        char which = s_[pos_];
        advance();
        if (pos_ < s_.size() && ident_cont(s_[pos_]))
          fail("location marker must be a bare 'c' or 's'", sp);
        sp.end = pos_;
        out.push_back({which == 'c' ? Tok::LamC : Tok::LamS, "", 0, sp});
      } else if (c == '.') {
        advance();
        sp.end = pos_;
        out.push_back({Tok::Dot, "", 0, sp});
      } else if (c == '(') {
        advance();
        if (pos_ < s_.size() && s_[pos_] == ')') {
          advance();
          sp.end = pos_;
          out.push_back({Tok::Unit, "", 0, sp});
        } else {
          sp.end = pos_;
          out.push_back({Tok::LParen, "", 0, sp});
        }
      } else if (c == ')') {
        advance();
        sp.end = pos_;
        out.push_back({Tok::RParen, "", 0, sp});
      } else if (c == '"') {
        out.push_back(lex_string(sp));
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && pos_ + 1 < s_.size() &&
                  std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
        out.push_back(lex_int(sp));
      } else if (ident_start(c)) {
        std::string name;
        while (pos_ < s_.size() && ident_cont(s_[pos_])) {
          name += s_[pos_];
          advance();
        }
        sp.end = pos_;
        out.push_back({Tok::Ident, std::move(name), 0, sp});
      } else {
        fail(std::string("unexpected character '") + c + "'", sp);
      }
    }
  }

 private:
  void skip_trivia() {
    for (;;) {
      while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance();
      // '--' comments run to end of line
      if (pos_ + 1 < s_.size() && s_[pos_] == '-' && s_[pos_ + 1] == '-') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
        continue;
      }
      return;
    }
  }

  Token lex_int(SourceSpan sp) {
    bool neg = s_[pos_] == '-';
    if (neg) advance();
    std::int64_t v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      int d = s_[pos_] - '0';
      if (v > (INT64_MAX - d) / 10) fail("integer literal out of range", sp);
      v = v * 10 + d;
      advance();
    }
    sp.end = pos_;
    return {Tok::Int, "", neg ? -v : v, sp};
  }

  Token lex_string(SourceSpan sp) {
    advance();  // opening quote
    std::string text;
    for (;;) {
      if (pos_ >= s_.size()) fail("unterminated string literal", sp);
      char c = s_[pos_];
      advance();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated escape", sp);
        char e = s_[pos_];
        advance();
        switch (e) {
          case '"': text += '"'; break;
          case '\\': text += '\\'; break;
          case 'n': text += '\n'; break;
          default: fail("unknown escape in string literal", sp);
        }
      } else {
        text += c;
      }
    }
    sp.end = pos_;
    return {Tok::Str, std::move(text), 0, sp};
  }

  SourceSpan here() const { return {pos_, pos_, line_, col_}; }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg, SourceSpan sp) {
    throw Error(ErrorKind::Syntax, msg, sp);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

constexpr int kMaxNesting = 2000;

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  TermPtr run() {
    TermPtr t = term();
    expect(Tok::End, "unexpected trailing input");
    return t;
  }

 private:
  TermPtr term() {
    Nesting guard(*this);
    const Token& tk = peek();
    if (tk.kind == Tok::LamC || tk.kind == Tok::LamS) {
      Loc loc = tk.kind == Tok::LamC ? Loc::Client : Loc::Server;
      SourceSpan start = tk.span;
      next();
      Token p = expect(Tok::Ident, "expected parameter name");
      expect(Tok::Dot, "expected '.' after parameter");
      TermPtr body = term();
      SourceSpan sp = start;
      sp.end = body->span.end;
      return lam(loc, p.text, std::move(body), sp);
    }
    TermPtr head = atom();
    for (;;) {
      Tok k = peek().kind;
      if (k != Tok::Ident && k != Tok::Int && k != Tok::Str && k != Tok::Unit && k != Tok::LParen)
        break;
      TermPtr arg = atom();
      SourceSpan sp = head->span;
      sp.end = arg->span.end;
      head = app(std::move(head), std::move(arg), sp);
    }
    return head;
  }

  TermPtr atom() {
    Nesting guard(*this);
    Token tk = peek();
    switch (tk.kind) {
      case Tok::Ident:
        next();
        return var(tk.text, tk.span);
      case Tok::Int:
        next();
        return lit(Literal::integer(tk.number), tk.span);
      case Tok::Str:
        next();
        return lit(Literal::text(tk.text), tk.span);
      case Tok::Unit:
        next();
        return lit(Literal::unit(), tk.span);
      case Tok::LParen: {
        next();
        TermPtr inner = term();
        expect(Tok::RParen, "expected ')'");
        return inner;
      }
      default:
        throw Error(ErrorKind::Syntax, "expected a term", tk.span);
    }
  }

  const Token& peek() const { return toks_[pos_]; }
  void next() { ++pos_; }

  Token expect(Tok k, const std::string& msg) {
    if (peek().kind != k) throw Error(ErrorKind::Syntax, msg, peek().span);
    Token t = peek();
    next();
    return t;
  }

  struct Nesting {
    explicit Nesting(Parser& p) : p(p) {
      if (++p.depth_ > kMaxNesting)
        throw Error(ErrorKind::Syntax, "nesting too deep", p.peek().span);
    }
    ~Nesting() { --p.depth_; }
    Parser& p;
  };

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

TermPtr parse(std::string_view source) {
  Lexer lex(source);
  Parser p(lex.run());
  return p.run();
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace {

enum class Ctx { Top, FunPos, ArgPos };

void render(const TermPtr& t, Ctx ctx, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          out += n.name;
        } else if constexpr (std::is_same_v<T, Term::Const>) {
          out += n.lit.show();
        } else if constexpr (std::is_same_v<T, Term::Lam>) {
          bool parens = ctx != Ctx::Top;
          if (parens) out += '(';
          out += '\\';
          out += loc_char(n.loc);
          out += ' ';
          out += n.param;
          out += ". ";
          render(n.body, Ctx::Top, out);
          if (parens) out += ')';
        } else if constexpr (std::is_same_v<T, Term::App>) {
          bool parens = ctx == Ctx::ArgPos;
          if (parens) out += '(';
          render(n.fun, Ctx::FunPos, out);
          out += ' ';
          render(n.arg, Ctx::ArgPos, out);
          if (parens) out += ')';
        }
      },
      t->node);
}

}  // namespace

std::string pretty(const TermPtr& t) {
  std::string out;
  render(t, Ctx::Top, out);
  return out;
}

// ---------------------------------------------------------------------------
// Alpha equality, free variables, substitution
// ---------------------------------------------------------------------------

namespace {

bool alpha_eq_rec(const TermPtr& a, const TermPtr& b,
                  std::vector<std::pair<std::string, std::string>>& binders) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* va = std::get_if<Term::Var>(&a->node)) {
    const auto& vb = std::get<Term::Var>(b->node);
    // Find the innermost binder for each side; both must refer to the same slot.
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
      bool ba = it->first == va->name;
      bool bb = it->second == vb.name;
      if (ba || bb) return ba && bb;
    }
    return va->name == vb.name;  // both free
  }
  if (const auto* la = std::get_if<Term::Lam>(&a->node)) {
    const auto& lb = std::get<Term::Lam>(b->node);
    if (la->loc != lb.loc) return false;
    binders.emplace_back(la->param, lb.param);
    bool ok = alpha_eq_rec(la->body, lb.body, binders);
    binders.pop_back();
    return ok;
  }
  if (const auto* pa = std::get_if<Term::App>(&a->node)) {
    const auto& pb = std::get<Term::App>(b->node);
    return alpha_eq_rec(pa->fun, pb.fun, binders) && alpha_eq_rec(pa->arg, pb.arg, binders);
  }
  return std::get<Term::Const>(a->node).lit == std::get<Term::Const>(b->node).lit;
}

void free_vars_rec(const TermPtr& t, std::vector<std::string>& bound, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          for (auto it = bound.rbegin(); it != bound.rend(); ++it)
            if (*it == n.name) return;
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, Term::Lam>) {
          bound.push_back(n.param);
          free_vars_rec(n.body, bound, out);
          bound.pop_back();
        } else if constexpr (std::is_same_v<T, Term::App>) {
          free_vars_rec(n.fun, bound, out);
          free_vars_rec(n.arg, bound, out);
        }
      },
      t->node);
}

void all_names_rec(const TermPtr& t, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, Term::Lam>) {
          out.insert(n.param);
          all_names_rec(n.body, out);
        } else if constexpr (std::is_same_v<T, Term::App>) {
          all_names_rec(n.fun, out);
          all_names_rec(n.arg, out);
        }
      },
      t->node);
}

std::string fresh_like(const std::string& base, const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

}  // namespace

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  std::vector<std::pair<std::string, std::string>> binders;
  return alpha_eq_rec(a, b, binders);
}

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  free_vars_rec(t, bound, out);
  return out;
}

std::set<std::string> all_names(const TermPtr& t) {
  std::set<std::string> out;
  all_names_rec(t, out);
  return out;
}

TermPtr substitute(const TermPtr& t, const std::string& name, const TermPtr& value) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          return n.name == name ? value : t;
        } else if constexpr (std::is_same_v<T, Term::Const>) {
          return t;
        } else if constexpr (std::is_same_v<T, Term::App>) {
          return app(substitute(n.fun, name, value), substitute(n.arg, name, value), t->span);
        } else {
          if (n.param == name) return t;  // shadowed
          if (free_vars(value).count(n.param)) {
            // Rename the binder so the substituted value is not captured.
            std::set<std::string> avoid = free_vars(value);
            auto body_names = all_names(n.body);
            avoid.insert(body_names.begin(), body_names.end());
            avoid.insert(name);
            std::string renamed = fresh_like(n.param, avoid);
            TermPtr body = substitute(n.body, n.param, var(renamed));
            return lam(n.loc, renamed, substitute(body, name, value), t->span);
          }
          return lam(n.loc, n.param, substitute(n.body, name, value), t->span);
        }
      },
      t->node);
}

}  // namespace src
}  // namespace locrpc
