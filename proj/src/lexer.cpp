#include "lexer.hpp"

#include <cctype>
#include <charconv>

namespace narep::detail {

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Real: return "real number";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semicolon: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::EqEq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Bang: return "'!'";
    case Tok::Assign: return "'='";
    case Tok::PlusAssign: return "'+='";
    case Tok::MinusAssign: return "'-='";
    case Tok::Arrow: return "'->'";
    case Tok::End: return "end of input";
  }
  return "token";
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;

  auto advance = [&](std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }

    Token tok;
    tok.pos = {line, col};

    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      tok.kind = Tok::Ident;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }

    if (digit(c) || (c == '.' && i + 1 < src.size() && digit(src[i + 1]))) {
      std::size_t j = i;
      bool is_real = false;
      while (j < src.size() && digit(src[j])) ++j;
      if (j < src.size() && src[j] == '.' && j + 1 < src.size() && digit(src[j + 1])) {
        is_real = true;
        ++j;
        while (j < src.size() && digit(src[j])) ++j;
      } else if (j < src.size() && src[j] == '.' &&
                 (j + 1 >= src.size() || !ident_start(src[j + 1]))) {
        // "1." is a real literal; "a.b" paths never start with a digit
        is_real = true;
        ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && digit(src[k])) {
          is_real = true;
          j = k;
          while (j < src.size() && digit(src[j])) ++j;
        }
      }
      tok.text = std::string(src.substr(i, j - i));
      const char* first = tok.text.data();
      const char* last = first + tok.text.size();
      if (is_real) {
        tok.kind = Tok::Real;
        auto [ptr, ec] = std::from_chars(first, last, tok.real_value);
        if (ec != std::errc() || ptr != last) {
          fail(Errc::SyntaxError, "malformed number '" + tok.text + "'", tok.pos);
        }
      } else {
        tok.kind = Tok::Int;
        auto [ptr, ec] = std::from_chars(first, last, tok.int_value);
        if (ec != std::errc() || ptr != last) {
          fail(Errc::SyntaxError, "integer literal out of range '" + tok.text + "'", tok.pos);
        }
      }
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }

    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    std::size_t len = 2;
    if (two('<', '=')) {
      tok.kind = Tok::Le;
    } else if (two('>', '=')) {
      tok.kind = Tok::Ge;
    } else if (two('=', '=')) {
      tok.kind = Tok::EqEq;
    } else if (two('!', '=')) {
      tok.kind = Tok::Ne;
    } else if (two('&', '&')) {
      tok.kind = Tok::AndAnd;
    } else if (two('|', '|')) {
      tok.kind = Tok::OrOr;
    } else if (two('+', '=')) {
      tok.kind = Tok::PlusAssign;
    } else if (two('-', '=')) {
      tok.kind = Tok::MinusAssign;
    } else if (two('-', '>')) {
      tok.kind = Tok::Arrow;
    } else {
      len = 1;
      switch (c) {
        case '(': tok.kind = Tok::LParen; break;
        case ')': tok.kind = Tok::RParen; break;
        case '[': tok.kind = Tok::LBracket; break;
        case ']': tok.kind = Tok::RBracket; break;
        case '{': tok.kind = Tok::LBrace; break;
        case '}': tok.kind = Tok::RBrace; break;
        case ',': tok.kind = Tok::Comma; break;
        case ';': tok.kind = Tok::Semicolon; break;
        case ':': tok.kind = Tok::Colon; break;
        case '.': tok.kind = Tok::Dot; break;
        case '+': tok.kind = Tok::Plus; break;
        case '-': tok.kind = Tok::Minus; break;
        case '*': tok.kind = Tok::Star; break;
        case '/': tok.kind = Tok::Slash; break;
        case '%': tok.kind = Tok::Percent; break;
        case '<': tok.kind = Tok::Lt; break;
        case '>': tok.kind = Tok::Gt; break;
        case '!': tok.kind = Tok::Bang; break;
        case '=': tok.kind = Tok::Assign; break;
        default:
          fail(Errc::SyntaxError, std::string("unexpected character '") + c + "'", tok.pos);
      }
    }
    tok.text = std::string(src.substr(i, len));
    advance(len);
    out.push_back(std::move(tok));
  }

  Token end;
  end.kind = Tok::End;
  end.pos = {line, col};
  out.push_back(std::move(end));
  return out;
}

TokenStream::TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.back().kind != Tok::End) {
    tokens_.push_back(Token{});
  }
}

const Token& TokenStream::peek(std::size_t ahead) const {
  const std::size_t k = std::min(index_ + ahead, tokens_.size() - 1);
  return tokens_[k];
}

const Token& TokenStream::next() {
  const Token& t = tokens_[index_];
  if (index_ + 1 < tokens_.size()) ++index_;
  return t;
}

bool TokenStream::at_keyword(std::string_view word) const {
  return peek().kind == Tok::Ident && peek().text == word;
}

bool TokenStream::accept(Tok kind) {
  if (!at(kind)) return false;
  next();
  return true;
}

bool TokenStream::accept_keyword(std::string_view word) {
  if (!at_keyword(word)) return false;
  next();
  return true;
}

const Token& TokenStream::expect(Tok kind, std::string_view what) {
  if (!at(kind)) error_expected(what.empty() ? describe(kind) : what);
  return next();
}

void TokenStream::expect_keyword(std::string_view word) {
  if (!at_keyword(word)) error_expected("'" + std::string(word) + "'");
  next();
}

std::string TokenStream::expect_ident(std::string_view what) {
  if (!at(Tok::Ident)) error_expected(what);
  return next().text;
}

std::int64_t TokenStream::expect_int(std::string_view what) {
  if (!at(Tok::Int)) error_expected(what);
  return next().int_value;
}

void TokenStream::error_expected(std::string_view expected) const {
  const Token& t = peek();
  std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
  fail(Errc::SyntaxError, "expected " + std::string(expected) + ", found " + found, t.pos);
}

}  // namespace narep::detail
