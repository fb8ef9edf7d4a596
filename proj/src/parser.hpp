#pragma once

#include <string_view>
#include <vector>

#include "lexer.hpp"
#include "refac/program.hpp"

namespace refac::detail {

/// Recursive-descent parser shared by both flavors. MFH uses a layout rule:
/// a token in column 1 starts a new top-level item and ends the current
/// expression.
class Parser {
 public:
  Parser(std::string_view text, Flavor flavor, int first_line = 1);

  bool at_end() const;
  Definition definition();
  Term expression();
  // `NAME "/" INT ":=" expr` followed by "." in MFE.
  std::pair<FunKey, Term> adapter_entry();
  void expect_end();

 private:
  const Token& peek(std::size_t k = 0) const;
  Tok kind(std::size_t k = 0) const;
  const Token& next();
  const Token& expect(Tok kind, const char* what);
  [[noreturn]] void fail(const std::string& expected) const;

  // MFE
  Term e_expr();
  Term e_term();
  Term e_postfix();
  Term e_primary();
  std::vector<Term> e_args(Tok close);

  // MFH
  Term h_expr();
  Term h_add();
  Term h_mul();
  Term h_infix();
  Term h_app();
  Term h_atom();
  Term h_paren();
  bool h_atom_start() const;

  std::vector<Token> toks_;
  Flavor flavor_;
  std::size_t pos_ = 0;
  std::size_t item_start_ = 0;
};

}  // namespace refac::detail
