#include "expr_parser.hpp"

#include <algorithm>
#include <array>
#include <charconv>

namespace narep {

namespace detail {

namespace {

constexpr std::array kReserved = {
    "if",  "then", "else", "true", "false", "repindex", "n",   "repshared",
    "range", "size", "sum", "in", "min",  "max",      "and", "or",
    "not",
};

class Parser {
 public:
  Parser(TokenStream& ts, std::vector<std::string>& bound) : ts_(ts), bound_(bound) {}

  Expr expression() {
    if (ts_.at_keyword("if")) return conditional();
    return disjunction();
  }

  Expr place_target() {
    const Token& t = ts_.peek();
    if (t.kind != Tok::Ident || is_reserved_word(t.text) || is_bound(t.text)) {
      ts_.error_expected("place name");
    }
    ts_.next();
    ast::PlaceRead read{t.text, {}};
    while (ts_.accept(Tok::LBracket)) {
      read.indices.push_back(expression());
      ts_.expect(Tok::RBracket);
    }
    return Expr(std::move(read), t.pos);
  }

 private:
  bool is_bound(const std::string& name) const {
    return std::find(bound_.begin(), bound_.end(), name) != bound_.end();
  }

  Expr conditional() {
    const SourcePos pos = ts_.peek().pos;
    ts_.expect_keyword("if");
    Expr c = expression();
    ts_.expect_keyword("then");
    Expr a = expression();
    ts_.expect_keyword("else");
    Expr b = expression();
    return Expr(ast::Cond{std::move(c), std::move(a), std::move(b)}, pos);
  }

  Expr disjunction() {
    Expr lhs = conjunction();
    for (;;) {
      const SourcePos pos = ts_.peek().pos;
      if (!(ts_.accept(Tok::OrOr) || ts_.accept_keyword("or"))) return lhs;
      Expr rhs = conjunction();
      lhs = Expr(ast::Binary{BinaryOp::Or, std::move(lhs), std::move(rhs)}, pos);
    }
  }

  Expr conjunction() {
    Expr lhs = negation();
    for (;;) {
      const SourcePos pos = ts_.peek().pos;
      if (!(ts_.accept(Tok::AndAnd) || ts_.accept_keyword("and"))) return lhs;
      Expr rhs = negation();
      lhs = Expr(ast::Binary{BinaryOp::And, std::move(lhs), std::move(rhs)}, pos);
    }
  }

  Expr negation() {
    const SourcePos pos = ts_.peek().pos;
    if (ts_.accept(Tok::Bang) || ts_.accept_keyword("not")) {
      return Expr(ast::Unary{UnaryOp::Not, negation()}, pos);
    }
    return comparison();
  }

  Expr comparison() {
    Expr lhs = additive();
    const Token& t = ts_.peek();
    BinaryOp op;
    switch (t.kind) {
      case Tok::Lt: op = BinaryOp::Lt; break;
      case Tok::Le: op = BinaryOp::Le; break;
      case Tok::Gt: op = BinaryOp::Gt; break;
      case Tok::Ge: op = BinaryOp::Ge; break;
      case Tok::EqEq: op = BinaryOp::Eq; break;
      case Tok::Ne: op = BinaryOp::Ne; break;
      default: return lhs;
    }
    const SourcePos pos = t.pos;
    ts_.next();
    Expr rhs = additive();
    return Expr(ast::Binary{op, std::move(lhs), std::move(rhs)}, pos);
  }

  Expr additive() {
    Expr lhs = multiplicative();
    for (;;) {
      const Token& t = ts_.peek();
      BinaryOp op;
      if (t.kind == Tok::Plus) {
        op = BinaryOp::Add;
      } else if (t.kind == Tok::Minus) {
        op = BinaryOp::Sub;
      } else {
        return lhs;
      }
      const SourcePos pos = t.pos;
      ts_.next();
      Expr rhs = multiplicative();
      lhs = Expr(ast::Binary{op, std::move(lhs), std::move(rhs)}, pos);
    }
  }

  Expr multiplicative() {
    Expr lhs = unary();
    for (;;) {
      const Token& t = ts_.peek();
      BinaryOp op;
      if (t.kind == Tok::Star) {
        op = BinaryOp::Mul;
      } else if (t.kind == Tok::Slash) {
        op = BinaryOp::Div;
      } else if (t.kind == Tok::Percent) {
        op = BinaryOp::Mod;
      } else {
        return lhs;
      }
      const SourcePos pos = t.pos;
      ts_.next();
      Expr rhs = unary();
      lhs = Expr(ast::Binary{op, std::move(lhs), std::move(rhs)}, pos);
    }
  }

  Expr unary() {
    const SourcePos pos = ts_.peek().pos;
    if (ts_.accept(Tok::Minus)) return Expr(ast::Unary{UnaryOp::Neg, unary()}, pos);
    return postfix();
  }

  Expr postfix() {
    const Token& t = ts_.peek();
    const SourcePos pos = t.pos;
    const bool bare_place =
        t.kind == Tok::Ident && !is_reserved_word(t.text) && !is_bound(t.text);
    Expr base = primary();
    if (!ts_.at(Tok::LBracket)) return base;

    if (bare_place) {
      ast::PlaceRead read = *base.as<ast::PlaceRead>();
      while (ts_.accept(Tok::LBracket)) {
        read.indices.push_back(expression());
        ts_.expect(Tok::RBracket);
      }
      return Expr(std::move(read), pos);
    }
    if (base.as<ast::RepSharedQuery>() || base.as<ast::Range>()) {
      ts_.expect(Tok::LBracket);
      Expr index = expression();
      ts_.expect(Tok::RBracket);
      return Expr(ast::ListIndex{std::move(base), std::move(index)}, pos);
    }
    fail(Errc::SyntaxError, "only places and lists can be indexed", ts_.peek().pos);
  }

  Expr primary() {
    const Token& t = ts_.peek();
    const SourcePos pos = t.pos;
    switch (t.kind) {
      case Tok::Int: {
        const auto v = t.int_value;
        ts_.next();
        return Expr(ast::IntLit{v}, pos);
      }
      case Tok::Real: {
        const auto v = t.real_value;
        ts_.next();
        return Expr(ast::RealLit{v}, pos);
      }
      case Tok::LParen: {
        ts_.next();
        Expr inner = expression();
        ts_.expect(Tok::RParen);
        return inner;
      }
      case Tok::Ident: break;
      default: ts_.error_expected("expression");
    }

    const std::string word = t.text;
    if (word == "if") return conditional();
    if (word == "true" || word == "false") {
      ts_.next();
      return Expr(ast::BoolLit{word == "true"}, pos);
    }
    if (word == "repindex") {
      ts_.next();
      ts_.expect(Tok::LParen);
      ts_.expect(Tok::RParen);
      return Expr(ast::RepIndex{}, pos);
    }
    if (word == "n") {
      ts_.next();
      return Expr(ast::SizeN{}, pos);
    }
    if (word == "repshared") {
      ts_.next();
      ts_.expect(Tok::LParen);
      std::string place = ts_.expect_ident("place name");
      ts_.expect(Tok::RParen);
      return Expr(ast::RepSharedQuery{std::move(place)}, pos);
    }
    if (word == "range") {
      ts_.next();
      ts_.expect(Tok::LParen);
      Expr count = expression();
      ts_.expect(Tok::RParen);
      return Expr(ast::Range{std::move(count)}, pos);
    }
    if (word == "min" || word == "max" || word == "size") {
      ts_.next();
      ts_.expect(Tok::LParen);
      std::vector<Expr> args;
      args.push_back(expression());
      while (ts_.accept(Tok::Comma)) args.push_back(expression());
      ts_.expect(Tok::RParen);
      const Builtin fn =
          word == "min" ? Builtin::Min : (word == "max" ? Builtin::Max : Builtin::Size);
      const std::size_t arity = fn == Builtin::Size ? 1 : 2;
      if (args.size() != arity) {
        fail(Errc::SyntaxError,
             word + " takes " + std::to_string(arity) + " argument" + (arity == 1 ? "" : "s"),
             pos);
      }
      return Expr(ast::Call{fn, std::move(args)}, pos);
    }
    if (word == "sum") {
      ts_.next();
      ts_.expect(Tok::LParen);
      const Token& v = ts_.peek();
      if (v.kind != Tok::Ident || is_reserved_word(v.text)) ts_.error_expected("variable name");
      std::string var = v.text;
      ts_.next();
      ts_.expect_keyword("in");
      Expr list = expression();
      ts_.expect(Tok::Colon);
      bound_.push_back(var);
      Expr body = expression();
      bound_.pop_back();
      ts_.expect(Tok::RParen);
      return Expr(ast::Sum{std::move(var), std::move(list), std::move(body)}, pos);
    }
    if (is_reserved_word(word)) ts_.error_expected("expression");

    ts_.next();
    if (is_bound(word)) return Expr(ast::Var{word}, pos);
    return Expr(ast::PlaceRead{word, {}}, pos);
  }

  TokenStream& ts_;
  std::vector<std::string>& bound_;
};

}  // namespace

bool is_reserved_word(std::string_view word) {
  return std::find(kReserved.begin(), kReserved.end(), word) != kReserved.end();
}

Expr parse_expression(TokenStream& ts, std::vector<std::string>& bound) {
  return Parser(ts, bound).expression();
}

Expr parse_place_target(TokenStream& ts, std::vector<std::string>& bound) {
  return Parser(ts, bound).place_target();
}

}  // namespace detail

Expr parse(std::string_view source) {
  detail::TokenStream ts(detail::tokenize(source));
  std::vector<std::string> bound;
  Expr e = detail::parse_expression(ts, bound);
  if (!ts.at(detail::Tok::End)) ts.error_expected("end of expression");
  return e;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength; higher binds tighter.
enum Prec { kCond = 0, kOr = 1, kAnd = 2, kNot = 3, kCmp = 4, kAdd = 5, kMul = 6, kNeg = 7, kAtom = 8 };

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return kOr;
    case BinaryOp::And: return kAnd;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
    case BinaryOp::Eq:
    case BinaryOp::Ne: return kCmp;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kAdd;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return kMul;
  }
  return kAtom;
}

std::string_view symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

struct Printer {
  std::string out;

  void print(const Expr& e, int min_prec) {
    std::visit([&](const auto& node) { emit(node, min_prec); }, e.node().base());
  }

  void open(bool paren) {
    if (paren) out += '(';
  }
  void close(bool paren) {
    if (paren) out += ')';
  }

  void emit(const ast::IntLit& n, int) { out += std::to_string(n.value); }
  void emit(const ast::RealLit& n, int) { out += format_real(n.value); }
  void emit(const ast::BoolLit& n, int) { out += n.value ? "true" : "false"; }
  void emit(const ast::RepIndex&, int) { out += "repindex()"; }
  void emit(const ast::SizeN&, int) { out += "n"; }
  void emit(const ast::Var& n, int) { out += n.name; }

  void emit(const ast::Unary& n, int min_prec) {
    const int p = n.op == UnaryOp::Neg ? kNeg : kNot;
    const bool paren = p < min_prec;
    open(paren);
    out += n.op == UnaryOp::Neg ? "-" : "!";
    print(n.operand, p);
    close(paren);
  }

  void emit(const ast::Binary& n, int min_prec) {
    const int p = precedence(n.op);
    const bool paren = p < min_prec;
    open(paren);
    // comparisons do not chain
    print(n.lhs, p == kCmp ? p + 1 : p);
    out += ' ';
    out += symbol(n.op);
    out += ' ';
    print(n.rhs, p + 1);
    close(paren);
  }

  void emit(const ast::Cond& n, int min_prec) {
    const bool paren = min_prec > kCond;
    open(paren);
    out += "if ";
    print(n.cond, kCond);
    out += " then ";
    print(n.then_branch, kCond);
    out += " else ";
    print(n.else_branch, kCond);
    close(paren);
  }

  void emit(const ast::PlaceRead& n, int) {
    out += n.place;
    for (const Expr& idx : n.indices) {
      out += '[';
      print(idx, kCond);
      out += ']';
    }
  }

  void emit(const ast::RepSharedQuery& n, int) { out += "repshared(" + n.place + ")"; }

  void emit(const ast::Range& n, int) {
    out += "range(";
    print(n.count, kCond);
    out += ')';
  }

  void emit(const ast::ListIndex& n, int) {
    print(n.list, kAtom);
    out += '[';
    print(n.index, kCond);
    out += ']';
  }

  void emit(const ast::Call& n, int) {
    out += n.fn == Builtin::Min ? "min(" : (n.fn == Builtin::Max ? "max(" : "size(");
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      if (i) out += ", ";
      print(n.args[i], kCond);
    }
    out += ')';
  }

  void emit(const ast::Sum& n, int) {
    out += "sum(" + n.var + " in ";
    print(n.list, kCond);
    out += ": ";
    print(n.body, kCond);
    out += ')';
  }
};

}  // namespace

std::string pretty_print(const Expr& e) {
  Printer p;
  p.print(e, kCond);
  return std::move(p.out);
}

}  // namespace narep
