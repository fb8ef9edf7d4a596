#include "lexer.hpp"

#include <cctype>

#include "refac/error.hpp"

namespace refac::detail {

namespace {

bool ident_char(char c, Flavor flavor) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         (flavor == Flavor::mfh && c == '\'');
}

bool lower(char c) {
  return std::islower(static_cast<unsigned char>(c)) != 0;
}

class Lexer {
 public:
  Lexer(std::string_view text, Flavor flavor, int first_line)
      : text_(text), flavor_(flavor), line_(first_line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token tok;
      tok.line = line_;
      tok.col = col_;
      if (i_ >= text_.size()) {
        tok.kind = Tok::end;
        tok.end_line = line_;
        tok.end_col = col_;
        out.push_back(tok);
        return out;
      }
      scan(tok);
      tok.end_line = line_;
      tok.end_col = col_;
      out.push_back(std::move(tok));
    }
  }

 private:
  char peek(std::size_t k = 0) const {
    return i_ + k < text_.size() ? text_[i_ + k] : '\0';
  }

  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_space() {
    while (i_ < text_.size()) {
      char c = peek();
      if (c == '#' || (c == '%' && flavor_ == Flavor::mfe)) {
        while (i_ < text_.size() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string take_ident() {
    std::string s;
    while (i_ < text_.size() && ident_char(peek(), flavor_)) {
      s += peek();
      advance();
    }
    return s;
  }

  void punct(Token& tok, Tok kind, int len) {
    tok.kind = kind;
    for (int k = 0; k < len; ++k) {
      tok.text += peek();
      advance();
    }
  }

  void scan(Token& tok) {
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      tok.kind = Tok::integer;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        tok.text += peek();
        advance();
      }
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      bool is_var = flavor_ == Flavor::mfe && !lower(c);
      tok.text = take_ident();
      if (is_var) {
        tok.kind = Tok::variable;
        return;
      }
      tok.kind = Tok::name;
      if (flavor_ == Flavor::mfe) {
        if (tok.text == "fun") {
          tok.kind = Tok::kw_fun;
          return;
        }
        if (tok.text == "end") {
          tok.kind = Tok::kw_end;
          return;
        }
        if (peek() == ':' && lower(peek(1))) {
          advance();
          tok.text += ":" + take_ident();
        }
      }
      return;
    }
    switch (c) {
      case '`': {
        int line = line_, col = col_;
        advance();
        std::string name = take_ident();
        if (name.empty() || peek() != '`')
          throw SyntaxError(line, col, "`name`", "'`'");
        advance();
        tok.kind = Tok::backtick;
        tok.text = name;
        return;
      }
      case '(': return punct(tok, Tok::lparen, 1);
      case ')': return punct(tok, Tok::rparen, 1);
      case '[': return punct(tok, Tok::lbrack, 1);
      case ']': return punct(tok, Tok::rbrack, 1);
      case ',': return punct(tok, Tok::comma, 1);
      case '.': return punct(tok, Tok::dot, 1);
      case '=': return punct(tok, Tok::equals, 1);
      case '\\': return punct(tok, Tok::backslash, 1);
      case '+': return punct(tok, Tok::plus, 1);
      case '*': return punct(tok, Tok::star, 1);
      case '/': return punct(tok, Tok::slash, 1);
      case '-':
        return peek(1) == '>' ? punct(tok, Tok::arrow, 2)
                              : punct(tok, Tok::minus, 1);
      case ':':
        if (peek(1) == '=') return punct(tok, Tok::define, 2);
        break;
      default:
        break;
    }
    throw SyntaxError(line_, col_, "a token", std::string("'") + c + "'");
  }

  std::string_view text_;
  Flavor flavor_;
  std::size_t i_ = 0;
  int line_;
  int col_ = 1;
};

}  // namespace

std::vector<Token> lex(std::string_view text, Flavor flavor, int first_line) {
  return Lexer(text, flavor, first_line).run();
}

std::string describe(const Token& tok) {
  if (tok.kind == Tok::end) return "end of input";
  if (tok.kind == Tok::backtick) return "'`" + tok.text + "`'";
  return "'" + tok.text + "'";
}

}  // namespace refac::detail
