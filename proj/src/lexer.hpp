#pragma once

// Tokenizer shared by the expression parser and the model-file parser.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "narep/error.hpp"

namespace narep::detail {

enum class Tok {
  Ident,
  Int,
  Real,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Semicolon,
  Colon,
  Dot,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  Ne,
  AndAnd,
  OrOr,
  Bang,
  Assign,
  PlusAssign,
  MinusAssign,
  Arrow,
  End,
};

std::string_view describe(Tok t);

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t int_value = 0;
  double real_value = 0.0;
  SourcePos pos;
};

/// Splits `source` into tokens; `#` starts a comment running to end of line.
std::vector<Token> tokenize(std::string_view source);

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens);

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at(Tok kind) const { return peek().kind == kind; }
  bool at_keyword(std::string_view word) const;
  bool accept(Tok kind);
  bool accept_keyword(std::string_view word);
  const Token& expect(Tok kind, std::string_view what = {});
  void expect_keyword(std::string_view word);
  std::string expect_ident(std::string_view what = "identifier");
  std::int64_t expect_int(std::string_view what = "integer");

  [[noreturn]] void error_expected(std::string_view expected) const;

 private:
  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

}  // namespace narep::detail
