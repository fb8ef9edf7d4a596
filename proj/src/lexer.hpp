#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "refac/term.hpp"

namespace refac::detail {

enum class Tok {
  end,
  integer,
  name,      // lowercase-initial identifier, possibly qualified (lists:map)
  variable,  // MFE uppercase-initial identifier
  backtick,  // `name`, text holds the name
  lparen,
  rparen,
  lbrack,
  rbrack,
  comma,
  dot,
  arrow,
  equals,
  backslash,
  plus,
  minus,
  star,
  slash,
  define,  // :=
  kw_fun,
  kw_end,
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  int line = 1;
  int col = 1;
  int end_line = 1;
  int end_col = 1;  // one past the last character
};

std::vector<Token> lex(std::string_view text, Flavor flavor, int first_line = 1);

std::string describe(const Token& tok);

}  // namespace refac::detail
