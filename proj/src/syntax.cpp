#include "refac/syntax.hpp"

#include <fstream>
#include <sstream>

#include "parser.hpp"
#include "refac/error.hpp"

namespace refac {

Flavor flavor_from_path(std::string_view path) {
  auto ends_with = [&](std::string_view ext) {
    return path.size() >= ext.size() &&
           path.substr(path.size() - ext.size()) == ext;
  };
  if (ends_with(".mfe")) return Flavor::mfe;
  if (ends_with(".mfh")) return Flavor::mfh;
  throw RefacError(ErrorKind::UsageError,
                   "cannot infer flavor of " + std::string(path) +
                       " (use --flavor mfe|mfh)");
}

std::string_view to_string(Flavor flavor) {
  return flavor == Flavor::mfe ? "mfe" : "mfh";
}

Flavor parse_flavor(std::string_view name) {
  if (name == "mfe") return Flavor::mfe;
  if (name == "mfh") return Flavor::mfh;
  throw RefacError(ErrorKind::UsageError,
                   "unknown flavor " + std::string(name));
}

SourceFile read_source(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RefacError(ErrorKind::UsageError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return {path, flavor_from_path(path), ss.str()};
}

Program parse_unresolved(std::string_view text, Flavor flavor) {
  detail::Parser parser(text, flavor);
  Program p{flavor, {}};
  while (!parser.at_end()) p.defs.push_back(parser.definition());
  return p;
}

Program parse(const SourceFile& src, const ResolveOptions& opts) {
  return parse(src.text, src.flavor, opts);
}

Program parse(std::string_view text, Flavor flavor, const ResolveOptions& opts) {
  return resolve(parse_unresolved(text, flavor), opts);
}

Term parse_expr(std::string_view text, Flavor flavor, int first_line) {
  detail::Parser parser(text, flavor, first_line);
  Term t = parser.expression();
  parser.expect_end();
  return t;
}

namespace {

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

std::string paren(std::string s, bool wrap) {
  return wrap ? "(" + s + ")" : s;
}

std::string int_text(std::int64_t v) {
  return v < 0 ? "(" + std::to_string(v) + ")" : std::to_string(v);
}

const char* op_text(BinOpKind op) {
  switch (op) {
    case BinOpKind::add: return " + ";
    case BinOpKind::sub: return " - ";
    case BinOpKind::mul: return " * ";
  }
  return " ? ";
}

// ---------------------------------------------------------------- MFE
// Precedence: 0 additive, 1 multiplicative, 2 postfix/primary.

std::string mfe(const Term& t, int prec);

std::string mfe_args(const std::vector<Term>& args) {
  std::vector<std::string> parts;
  for (const auto& a : args) parts.push_back(mfe(a, 0));
  return join(parts, ", ");
}

std::string mfe(const Term& t, int prec) {
  return visit(
      t,
      overloaded{
          [&](const Var& v) { return v.name; },
          [&](const LitInt& l) { return int_text(l.value); },
          [&](const Atom& a) { return a.name; },
          [&](const FunRef& f) {
            return "fun " + f.name + "/" + std::to_string(f.arity);
          },
          [&](const LitList& l) { return "[" + mfe_args(l.items) + "]"; },
          [&](const Lam& l) {
            return "fun(" + join(l.params, ", ") + ") -> " + mfe(l.body, 0) +
                   " end";
          },
          [&](const App& a) {
            std::string head;
            auto f = a.head.as<FunRef>();
            if (f && f->arity == static_cast<int>(a.args.size()))
              head = f->name;
            else if (auto v = a.head.as<Var>())
              head = v->name;
            else if (a.head.is<App>())
              head = mfe(a.head, 2);
            else
              head = "(" + mfe(a.head, 0) + ")";
            return head + "(" + mfe_args(a.args) + ")";
          },
          [&](const BinOp& b) {
            int level = b.op == BinOpKind::mul ? 1 : 0;
            return paren(mfe(b.lhs, level) + op_text(b.op) + mfe(b.rhs, level + 1),
                         prec > level);
          },
      });
}

// ---------------------------------------------------------------- MFH
// Precedence: 0 lambda, 1 additive, 2 multiplicative, 3 backtick infix,
// 4 application, 5 atomic.

std::string mfh(const Term& t, int prec);

std::optional<std::string> name_of(const Term& t) {
  if (auto v = t.as<Var>()) return v->name;
  if (auto f = t.as<FunRef>()) return f->name;
  return std::nullopt;
}

// App(H, [a], infix) with a nameable head prints as the left section (a `H`).
const App* as_section(const Term& t) {
  auto a = t.as<App>();
  if (a && a->sugar == Sugar::infix && a->args.size() == 1 && name_of(a->head))
    return a;
  return nullptr;
}

// \p -> H p e with infix sugar and p not free in e prints as (`H` e).
std::optional<std::string> right_section(const Lam& l) {
  if (l.params.size() != 1) return std::nullopt;
  auto outer = l.body.as<App>();
  if (!outer || outer->sugar != Sugar::infix || outer->args.size() != 1)
    return std::nullopt;
  auto inner = as_section(outer->head);
  if (!inner) return std::nullopt;
  auto p = inner->args[0].as<Var>();
  const auto& param = l.params[0];
  if (!p || p->name != param || *name_of(inner->head) == param ||
      free_vars(outer->args[0]).count(param))
    return std::nullopt;
  return "(`" + *name_of(inner->head) + "` " + mfh(outer->args[0], 0) + ")";
}

std::string mfh(const Term& t, int prec) {
  return visit(
      t,
      overloaded{
          [&](const Var& v) { return v.name; },
          [&](const LitInt& l) { return int_text(l.value); },
          [&](const Atom& a) { return a.name; },
          [&](const FunRef& f) { return f.name; },
          [&](const LitList& l) {
            std::vector<std::string> parts;
            for (const auto& x : l.items) parts.push_back(mfh(x, 0));
            return "[" + join(parts, ", ") + "]";
          },
          [&](const Lam& l) {
            if (auto rs = right_section(l)) return *rs;
            std::vector<std::string> params = l.params;
            Term body = l.body;
            while (auto inner = body.as<Lam>()) {
              if (right_section(*inner)) break;
              params.insert(params.end(), inner->params.begin(),
                            inner->params.end());
              body = inner->body;
            }
            return paren("\\" + join(params, " ") + " -> " + mfh(body, 0),
                         prec > 0);
          },
          [&](const App& a) {
            if (auto sec = as_section(t))
              return "(" + mfh(sec->args[0], 3) + " `" + *name_of(sec->head) +
                     "`)";
            if (a.sugar == Sugar::infix && a.args.size() == 1) {
              if (auto inner = as_section(a.head))
                return paren(mfh(inner->args[0], 3) + " `" +
                                 *name_of(inner->head) + "` " +
                                 mfh(a.args[0], 4),
                             prec > 3);
            }
            // Prefix juxtaposition: flatten the spine down to a head that
            // prints atomically.
            std::vector<Term> args;
            Term head = t;
            while (auto ap = head.as<App>()) {
              if (as_section(head)) break;
              if (ap->sugar == Sugar::infix && ap->args.size() == 1 &&
                  as_section(ap->head) && !head.same_node(t))
                break;
              args.insert(args.begin(), ap->args.begin(), ap->args.end());
              head = ap->head;
            }
            std::string out = mfh(head, 5);
            for (const auto& x : args) out += " " + mfh(x, 5);
            return paren(out, prec > 4);
          },
          [&](const BinOp& b) {
            int level = b.op == BinOpKind::mul ? 2 : 1;
            return paren(mfh(b.lhs, level) + op_text(b.op) + mfh(b.rhs, level + 1),
                         prec > level);
          },
      });
}

}  // namespace

std::string print(const Term& t, Flavor flavor) {
  return flavor == Flavor::mfe ? mfe(t, 0) : mfh(t, 0);
}

std::string print(const Definition& d, Flavor flavor) {
  if (flavor == Flavor::mfe)
    return d.name + "(" + join(d.params, ", ") + ") -> " + mfe(d.body, 0) + ".";
  std::string head = d.name;
  for (const auto& p : d.params) head += " " + p;
  return head + " = " + mfh(d.body, 0);
}

std::string print(const Program& p) {
  std::string out;
  for (const auto& d : p.defs) out += print(d, p.flavor) + "\n";
  return out;
}

}  // namespace refac
