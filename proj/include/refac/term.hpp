#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace refac {

enum class Flavor { mfe, mfh };

// Surface form an application came from. Only the pretty-printer reads it.
enum class Sugar { prefix, infix };

// Lambdas introduced by wrapping a function reference are tagged so the
// pipeline can collapse them back into `fun f/N` (or the atom they were
// lifted from) when they survive intact.
enum class LamOrigin { source, eta_expanded, atom_lifted };

enum class BinOpKind { add, sub, mul };

/// Identifies a top-level function or intrinsic by name and arity.
struct FunKey {
  std::string name;
  int arity = 0;

  auto operator<=>(const FunKey&) const = default;
  bool operator==(const FunKey&) const = default;
};

std::string to_string(const FunKey& key);

struct Node;

/// Immutable, shared expression tree. Copies are cheap; nodes are never
/// mutated after construction, so terms may be shared across threads.
class Term {
 public:
  Term() = default;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  const Node& node() const { return *node_; }
  bool empty() const { return node_ == nullptr; }

  template <class T>
  const T* as() const;
  template <class T>
  bool is() const {
    return as<T>() != nullptr;
  }

  // Identity of the shared node, not structural equality.
  bool same_node(const Term& other) const { return node_ == other.node_; }

 private:
  std::shared_ptr<const Node> node_;
};

struct Var {
  std::string name;
};
struct LitInt {
  std::int64_t value = 0;
};
struct LitList {
  std::vector<Term> items;
};
struct Atom {
  std::string name;
};
struct FunRef {
  std::string name;
  int arity = 0;
  FunKey key() const { return {name, arity}; }
};
struct Lam {
  std::vector<std::string> params;
  Term body;
  LamOrigin origin = LamOrigin::source;
};
struct App {
  Term head;
  std::vector<Term> args;
  Sugar sugar = Sugar::prefix;
};
struct BinOp {
  BinOpKind op = BinOpKind::add;
  Term lhs;
  Term rhs;
};

using NodeVariant =
    std::variant<Var, LitInt, LitList, Atom, FunRef, Lam, App, BinOp>;

struct Node {
  NodeVariant v;
};

template <class T>
const T* Term::as() const {
  return node_ ? std::get_if<T>(&node_->v) : nullptr;
}

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

template <class F>
decltype(auto) visit(const Term& t, F&& f) {
  return std::visit(std::forward<F>(f), t.node().v);
}

// Constructors.
Term var(std::string name);
Term lit(std::int64_t value);
Term list(std::vector<Term> items);
Term atom(std::string name);
Term funref(std::string name, int arity);
Term funref(const FunKey& key);
Term lam(std::vector<std::string> params, Term body,
         LamOrigin origin = LamOrigin::source);
Term app(Term head, std::vector<Term> args, Sugar sugar = Sugar::prefix);
Term binop(BinOpKind op, Term lhs, Term rhs);

/// Curried helpers: `\p1 -> \p2 -> ... body` and `((h a1) a2) ...`.
Term curried_lam(const std::vector<std::string>& params, Term body,
                 LamOrigin origin = LamOrigin::source);
Term curried_app(Term head, const std::vector<Term>& args,
                 Sugar sugar = Sugar::prefix);

using NameSet = std::set<std::string>;
using Binding = std::map<std::string, Term>;

/// Identifiers occurring free; FunRef and Atom names are not variables.
NameSet free_vars(const Term& t);

/// Names of every FunRef occurring in `t`.
NameSet funref_names(const Term& t);

/// Every identifier mentioned anywhere in `t` (variables, binders, FunRefs).
NameSet all_names(const Term& t);

/// `base` with any trailing `_<digits>` removed, then suffixed with the
/// smallest `_k` (k >= 1) not in `avoid`.
std::string fresh_name(const std::string& base, const NameSet& avoid);

/// Simultaneous capture-avoiding substitution of free variables.
Term substitute(const Term& t, const Binding& binding);

/// Replaces every FunRef(target) by `replacement`. Binders that would
/// capture a free name (variable or function reference) of the
/// replacement are renamed.
Term substitute_funref(const Term& t, const FunKey& target,
                       const Term& replacement);

/// Number of FunRef(target) nodes in `t`.
std::size_t count_funrefs(const Term& t, const FunKey& target);

/// Equality up to consistent renaming of bound variables. Sugar and lambda
/// provenance are presentation details and are ignored.
bool alpha_eq(const Term& a, const Term& b);

/// Syntactic equality (names of binders included; sugar ignored).
bool syntactic_eq(const Term& a, const Term& b);

std::size_t term_size(const Term& t);
std::size_t term_depth(const Term& t);

/// The immediate subterms in a fixed order (head before args, lhs before rhs).
std::vector<Term> children(const Term& t);

/// Rebuilds `t` with new children, given in the order of children(t).
Term with_children(const Term& t, const std::vector<Term>& kids);

}  // namespace refac
