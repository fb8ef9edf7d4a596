#include "parser.hpp"

#include <charconv>

#include "refac/error.hpp"

namespace refac::detail {

Parser::Parser(std::string_view text, Flavor flavor, int first_line)
    : toks_(lex(text, flavor, first_line)), flavor_(flavor) {}

const Token& Parser::peek(std::size_t k) const {
  return toks_[std::min(pos_ + k, toks_.size() - 1)];
}

Tok Parser::kind(std::size_t k) const {
  const auto& t = peek(k);
  if (flavor_ == Flavor::mfh && t.col == 1 && pos_ + k > item_start_)
    return Tok::end;
  return t.kind;
}

bool Parser::at_end() const { return peek().kind == Tok::end; }

const Token& Parser::next() {
  const auto& t = peek();
  if (pos_ < toks_.size() - 1) ++pos_;
  return t;
}

void Parser::fail(const std::string& expected) const {
  const auto& tok = peek();
  // A missing terminator is reported where it was due, not at the start of
  // whatever follows on a later line. Tokens that cannot begin anything are
  // blamed themselves.
  bool begins = false;
  switch (tok.kind) {
    case Tok::end: case Tok::integer: case Tok::name: case Tok::variable:
    case Tok::lparen: case Tok::lbrack: case Tok::backslash: case Tok::kw_fun:
      begins = true;
      break;
    default:
      break;
  }
  if (pos_ > item_start_) {
    const auto& prev = toks_[pos_ - 1];
    bool dangling = prev.kind == Tok::plus || prev.kind == Tok::minus ||
                    prev.kind == Tok::star || prev.kind == Tok::slash || prev.kind == Tok::backtick;
    if ((begins || dangling) && tok.line > prev.end_line)
      throw SyntaxError(prev.end_line, prev.end_col, expected, describe(tok));
  }
  throw SyntaxError(tok.line, tok.col, expected, describe(tok));
}

const Token& Parser::expect(Tok k, const char* what) {
  if (kind() != k) fail(what);
  return next();
}

void Parser::expect_end() {
  if (!at_end()) fail("end of input");
}

namespace {

std::int64_t to_int(const Token& t) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (ec != std::errc{})
    throw SyntaxError(t.line, t.col, "integer in range", "'" + t.text + "'");
  return v;
}

}  // namespace

Definition Parser::definition() {
  item_start_ = pos_;
  Definition d;
  d.name = expect(Tok::name, "function name").text;
  if (flavor_ == Flavor::mfe) {
    expect(Tok::lparen, "'('");
    if (kind() != Tok::rparen) {
      d.params.push_back(expect(Tok::variable, "parameter").text);
      while (kind() == Tok::comma) {
        next();
        d.params.push_back(expect(Tok::variable, "parameter").text);
      }
    }
    expect(Tok::rparen, "')'");
    expect(Tok::arrow, "'->'");
    d.body = e_expr();
    expect(Tok::dot, "'.'");
  } else {
    int head_line = toks_[item_start_].line;
    while (kind() == Tok::name && peek().line == head_line) d.params.push_back(next().text);
    expect(Tok::equals, "'='");
    d.body = h_expr();
    if (kind() != Tok::end) fail("end of definition");
  }
  return d;
}

Term Parser::expression() {
  item_start_ = pos_;
  return flavor_ == Flavor::mfe ? e_expr() : h_expr();
}

std::pair<FunKey, Term> Parser::adapter_entry() {
  item_start_ = pos_;
  FunKey key;
  key.name = expect(Tok::name, "function name").text;
  expect(Tok::slash, "'/'");
  key.arity = static_cast<int>(to_int(expect(Tok::integer, "arity")));
  expect(Tok::define, "':='");
  Term t = expression();
  if (flavor_ == Flavor::mfe) expect(Tok::dot, "'.'");
  else if (kind() != Tok::end) fail("end of adapter");
  return {key, t};
}

// ---------------------------------------------------------------- MFE

Term Parser::e_expr() {
  Term lhs = e_term();
  while (kind() == Tok::plus || kind() == Tok::minus) {
    auto op = next().kind == Tok::plus ? BinOpKind::add : BinOpKind::sub;
    lhs = binop(op, lhs, e_term());
  }
  return lhs;
}

Term Parser::e_term() {
  Term lhs = e_postfix();
  while (kind() == Tok::star) {
    next();
    lhs = binop(BinOpKind::mul, lhs, e_postfix());
  }
  return lhs;
}

Term Parser::e_postfix() {
  Term t = e_primary();
  while (kind() == Tok::lparen) {
    next();
    t = app(t, e_args(Tok::rparen));
  }
  return t;
}

std::vector<Term> Parser::e_args(Tok close) {
  std::vector<Term> args;
  const char* what = close == Tok::rparen ? "')'" : "']'";
  if (kind() != close) {
    args.push_back(e_expr());
    while (kind() == Tok::comma) {
      next();
      args.push_back(e_expr());
    }
  }
  expect(close, what);
  return args;
}

Term Parser::e_primary() {
  switch (kind()) {
    case Tok::integer:
      return lit(to_int(next()));
    case Tok::minus: {
      next();
      return lit(-to_int(expect(Tok::integer, "integer")));
    }
    case Tok::variable:
      return var(next().text);
    case Tok::name: {
      std::string name = next().text;
      if (kind() == Tok::lparen) {
        next();
        auto args = e_args(Tok::rparen);
        int n = static_cast<int>(args.size());
        return app(funref(name, n), std::move(args));
      }
      if (name.find(':') != std::string::npos) fail("'('");
      return atom(name);
    }
    case Tok::kw_fun: {
      next();
      if (kind() == Tok::name) {
        std::string name = next().text;
        expect(Tok::slash, "'/'");
        int arity = static_cast<int>(to_int(expect(Tok::integer, "arity")));
        return funref(name, arity);
      }
      expect(Tok::lparen, "'(' or function name");
      std::vector<std::string> params;
      if (kind() != Tok::rparen) {
        params.push_back(expect(Tok::variable, "parameter").text);
        while (kind() == Tok::comma) {
          next();
          params.push_back(expect(Tok::variable, "parameter").text);
        }
      }
      expect(Tok::rparen, "')'");
      expect(Tok::arrow, "'->'");
      Term body = e_expr();
      expect(Tok::kw_end, "'end'");
      return lam(std::move(params), body);
    }
    case Tok::lbrack:
      next();
      return list(e_args(Tok::rbrack));
    case Tok::lparen: {
      next();
      Term t = e_expr();
      expect(Tok::rparen, "')'");
      return t;
    }
    default:
      fail("expression");
  }
}

// ---------------------------------------------------------------- MFH

Term Parser::h_expr() {
  if (kind() == Tok::backslash) {
    next();
    std::vector<std::string> params;
    params.push_back(expect(Tok::name, "parameter").text);
    while (kind() == Tok::name) params.push_back(next().text);
    expect(Tok::arrow, "'->'");
    return curried_lam(params, h_expr());
  }
  return h_add();
}

Term Parser::h_add() {
  Term lhs = h_mul();
  while (kind() == Tok::plus || kind() == Tok::minus) {
    auto op = next().kind == Tok::plus ? BinOpKind::add : BinOpKind::sub;
    lhs = binop(op, lhs, h_mul());
  }
  return lhs;
}

Term Parser::h_mul() {
  Term lhs = h_infix();
  while (kind() == Tok::star) {
    next();
    lhs = binop(BinOpKind::mul, lhs, h_infix());
  }
  return lhs;
}

Term Parser::h_infix() {
  Term lhs = h_app();
  // A backtick directly before ')' closes a left section; leave it to the
  // enclosing parenthesis.
  while (kind() == Tok::backtick && kind(1) != Tok::rparen) {
    std::string f = next().text;
    Term rhs = h_app();
    lhs = app(app(var(f), {lhs}, Sugar::infix), {rhs}, Sugar::infix);
  }
  return lhs;
}

bool Parser::h_atom_start() const {
  switch (kind()) {
    case Tok::integer:
    case Tok::name:
    case Tok::lparen:
    case Tok::lbrack:
      return true;
    default:
      return false;
  }
}

Term Parser::h_app() {
  Term head = h_atom();
  while (h_atom_start()) head = app(head, {h_atom()});
  return head;
}

Term Parser::h_atom() {
  switch (kind()) {
    case Tok::integer:
      return lit(to_int(next()));
    case Tok::minus:
      next();
      return lit(-to_int(expect(Tok::integer, "integer")));
    case Tok::name:
      return var(next().text);
    case Tok::lbrack: {
      next();
      std::vector<Term> items;
      if (kind() != Tok::rbrack) {
        items.push_back(h_expr());
        while (kind() == Tok::comma) {
          next();
          items.push_back(h_expr());
        }
      }
      expect(Tok::rbrack, "']'");
      return list(std::move(items));
    }
    case Tok::lparen:
      return h_paren();
    default:
      fail("expression");
  }
}

Term Parser::h_paren() {
  expect(Tok::lparen, "'('");
  if (kind() == Tok::backtick) {
    // Right section (`f` e) is \x -> f x e.
    std::string f = next().text;
    Term operand = h_expr();
    expect(Tok::rparen, "')'");
    NameSet avoid = all_names(operand);
    avoid.insert(f);
    std::string x = fresh_name("x", avoid);
    return lam({x}, app(app(var(f), {var(x)}, Sugar::infix), {operand},
                        Sugar::infix));
  }
  Term inner = h_expr();
  if (kind() == Tok::backtick && kind(1) == Tok::rparen) {
    std::string f = next().text;
    next();
    return app(var(f), {inner}, Sugar::infix);
  }
  expect(Tok::rparen, "')'");
  return inner;
}

}  // namespace refac::detail
