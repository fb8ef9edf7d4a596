#include "nameless.hpp"

namespace refac::testing {

namespace {

using Scopes = std::vector<std::vector<std::string>>;

Nameless convert(const Term& t, Scopes& scopes) {
  Nameless n;
  visit(t, overloaded{
               [&](const Var& v) {
                 for (int d = 0; d < static_cast<int>(scopes.size()); ++d) {
                   const auto& s = scopes[scopes.size() - 1 - d];
                   for (int i = 0; i < static_cast<int>(s.size()); ++i)
                     if (s[i] == v.name) {
                       n.kind = Nameless::Kind::bound;
                       n.depth = d;
                       n.index = i;
                       return;
                     }
                 }
                 n.kind = Nameless::Kind::free;
                 n.name = v.name;
               },
               [&](const LitInt& l) {
                 n.kind = Nameless::Kind::lit;
                 n.value = l.value;
               },
               [&](const Atom& a) {
                 n.kind = Nameless::Kind::atom;
                 n.name = a.name;
               },
               [&](const FunRef& f) {
                 n.kind = Nameless::Kind::ref;
                 n.name = f.name;
                 n.value = f.arity;
               },
               [&](const LitList& l) {
                 n.kind = Nameless::Kind::list;
                 for (const auto& x : l.items) n.kids.push_back(convert(x, scopes));
               },
               [&](const Lam& l) {
                 n.kind = Nameless::Kind::lam;
                 n.value = static_cast<std::int64_t>(l.params.size());
                 scopes.push_back(l.params);
                 n.kids.push_back(convert(l.body, scopes));
                 scopes.pop_back();
               },
               [&](const App& a) {
                 n.kind = Nameless::Kind::app;
                 n.kids.push_back(convert(a.head, scopes));
                 for (const auto& x : a.args) n.kids.push_back(convert(x, scopes));
               },
               [&](const BinOp& b) {
                 n.kind = Nameless::Kind::binop;
                 n.value = static_cast<std::int64_t>(b.op);
                 n.kids.push_back(convert(b.lhs, scopes));
                 n.kids.push_back(convert(b.rhs, scopes));
               },
           });
  return n;
}

}  // namespace

Nameless to_nameless(const Term& t) {
  Scopes scopes;
  return convert(t, scopes);
}

Nameless nameless_subst(const Nameless& t,
                        const std::map<std::string, Nameless>& binding) {
  if (t.kind == Nameless::Kind::free) {
    auto it = binding.find(t.name);
    return it == binding.end() ? t : it->second;
  }
  Nameless out = t;
  for (auto& k : out.kids) k = nameless_subst(k, binding);
  return out;
}

}  // namespace refac::testing
