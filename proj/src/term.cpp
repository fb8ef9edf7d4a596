#include "refac/term.hpp"

#include <algorithm>
#include <cctype>

namespace refac {

std::string to_string(const FunKey& key) {
  return key.name + "/" + std::to_string(key.arity);
}

namespace {
Term make(NodeVariant v) {
  return Term(std::make_shared<const Node>(Node{std::move(v)}));
}
}  // namespace

Term var(std::string name) { return make(Var{std::move(name)}); }
Term lit(std::int64_t value) { return make(LitInt{value}); }
Term list(std::vector<Term> items) { return make(LitList{std::move(items)}); }
Term atom(std::string name) { return make(Atom{std::move(name)}); }
Term funref(std::string name, int arity) {
  return make(FunRef{std::move(name), arity});
}
Term funref(const FunKey& key) { return funref(key.name, key.arity); }
Term lam(std::vector<std::string> params, Term body, LamOrigin origin) {
  return make(Lam{std::move(params), std::move(body), origin});
}
Term app(Term head, std::vector<Term> args, Sugar sugar) {
  return make(App{std::move(head), std::move(args), sugar});
}
Term binop(BinOpKind op, Term lhs, Term rhs) {
  return make(BinOp{op, std::move(lhs), std::move(rhs)});
}

Term curried_lam(const std::vector<std::string>& params, Term body,
                 LamOrigin origin) {
  for (auto it = params.rbegin(); it != params.rend(); ++it)
    body = lam({*it}, std::move(body), origin);
  return body;
}

Term curried_app(Term head, const std::vector<Term>& args, Sugar sugar) {
  for (const auto& a : args) head = app(std::move(head), {a}, sugar);
  return head;
}

std::vector<Term> children(const Term& t) {
  return visit(t, overloaded{
                      [](const LitList& l) { return l.items; },
                      [](const Lam& l) { return std::vector<Term>{l.body}; },
                      [](const App& a) {
                        std::vector<Term> out{a.head};
                        out.insert(out.end(), a.args.begin(), a.args.end());
                        return out;
                      },
                      [](const BinOp& b) {
                        return std::vector<Term>{b.lhs, b.rhs};
                      },
                      [](const auto&) { return std::vector<Term>{}; },
                  });
}

Term with_children(const Term& t, const std::vector<Term>& kids) {
  return visit(
      t, overloaded{
             [&](const LitList&) { return list(kids); },
             [&](const Lam& l) { return lam(l.params, kids.at(0), l.origin); },
             [&](const App& a) {
               return app(kids.at(0),
                          std::vector<Term>(kids.begin() + 1, kids.end()),
                          a.sugar);
             },
             [&](const BinOp& b) { return binop(b.op, kids.at(0), kids.at(1)); },
             [&](const auto&) { return t; },
         });
}

namespace {

void collect_free(const Term& t, NameSet& bound, NameSet& out) {
  visit(t, overloaded{
               [&](const Var& v) {
                 if (!bound.count(v.name)) out.insert(v.name);
               },
               [&](const Lam& l) {
                 std::vector<std::string> added;
                 for (const auto& p : l.params)
                   if (bound.insert(p).second) added.push_back(p);
                 collect_free(l.body, bound, out);
                 for (const auto& p : added) bound.erase(p);
               },
               [&](const auto&) {
                 for (const auto& c : children(t)) collect_free(c, bound, out);
               },
           });
}

void collect_names(const Term& t, NameSet& out, bool vars, bool refs) {
  visit(t, overloaded{
               [&](const Var& v) {
                 if (vars) out.insert(v.name);
               },
               [&](const FunRef& f) {
                 if (refs) out.insert(f.name);
               },
               [&](const Lam& l) {
                 if (vars) out.insert(l.params.begin(), l.params.end());
                 collect_names(l.body, out, vars, refs);
               },
               [&](const auto&) {
                 for (const auto& c : children(t))
                   collect_names(c, out, vars, refs);
               },
           });
}

}  // namespace

NameSet free_vars(const Term& t) {
  NameSet bound, out;
  collect_free(t, bound, out);
  return out;
}

NameSet funref_names(const Term& t) {
  NameSet out;
  collect_names(t, out, false, true);
  return out;
}

NameSet all_names(const Term& t) {
  NameSet out;
  collect_names(t, out, true, true);
  return out;
}

std::string fresh_name(const std::string& base, const NameSet& avoid) {
  std::string stem = base;
  auto us = stem.rfind('_');
  if (us != std::string::npos && us + 1 < stem.size() && us > 0 &&
      std::all_of(stem.begin() + us + 1, stem.end(),
                  [](unsigned char c) { return std::isdigit(c); }))
    stem.erase(us);
  for (int k = 1;; ++k) {
    std::string candidate = stem + "_" + std::to_string(k);
    if (!avoid.count(candidate)) return candidate;
  }
}

namespace {

// Names a replacement term could have captured by a binder.
NameSet capturable(const Term& t) {
  NameSet out = free_vars(t);
  auto refs = funref_names(t);
  out.insert(refs.begin(), refs.end());
  return out;
}

// Renames the parameters of `l` that appear in `capture`, returning the new
// parameter list and the correspondingly renamed body.
std::pair<std::vector<std::string>, Term> rename_binders(
    const Lam& l, const NameSet& capture, Binding& extra) {
  NameSet avoid = capture;
  auto body_names = all_names(l.body);
  avoid.insert(body_names.begin(), body_names.end());
  avoid.insert(l.params.begin(), l.params.end());
  std::vector<std::string> params;
  for (const auto& p : l.params) {
    if (capture.count(p)) {
      auto np = fresh_name(p, avoid);
      avoid.insert(np);
      extra[p] = var(np);
      params.push_back(np);
    } else {
      params.push_back(p);
    }
  }
  return {params, l.body};
}

}  // namespace

Term substitute(const Term& t, const Binding& binding) {
  if (binding.empty()) return t;
  return visit(
      t,
      overloaded{
          [&](const Var& v) -> Term {
            auto it = binding.find(v.name);
            return it == binding.end() ? t : it->second;
          },
          [&](const Lam& l) -> Term {
            auto body_fv = free_vars(l.body);
            Binding relevant;
            for (const auto& [name, repl] : binding)
              if (body_fv.count(name) &&
                  std::find(l.params.begin(), l.params.end(), name) ==
                      l.params.end())
                relevant.emplace(name, repl);
            if (relevant.empty()) return t;
            NameSet capture;
            for (const auto& [name, repl] : relevant) {
              auto c = capturable(repl);
              capture.insert(c.begin(), c.end());
            }
            auto [params, body] = rename_binders(l, capture, relevant);
            return lam(std::move(params), substitute(body, relevant), l.origin);
          },
          [&](const auto&) -> Term {
            auto kids = children(t);
            if (kids.empty()) return t;
            for (auto& k : kids) k = substitute(k, binding);
            return with_children(t, kids);
          },
      });
}

std::size_t count_funrefs(const Term& t, const FunKey& target) {
  if (auto f = t.as<FunRef>()) return f->key() == target ? 1 : 0;
  std::size_t n = 0;
  for (const auto& c : children(t)) n += count_funrefs(c, target);
  return n;
}

namespace {

Term replace_ref(const Term& t, const FunKey& target, const Term& repl,
                 const NameSet& capture) {
  if (count_funrefs(t, target) == 0) return t;
  if (t.is<FunRef>()) return repl;
  if (auto l = t.as<Lam>()) {
    bool clash = std::any_of(l->params.begin(), l->params.end(),
                             [&](const auto& p) { return capture.count(p); });
    if (!clash) return lam(l->params, replace_ref(l->body, target, repl, capture),
                           l->origin);
    Binding renaming;
    auto [params, body] = rename_binders(*l, capture, renaming);
    body = substitute(body, renaming);
    return lam(std::move(params), replace_ref(body, target, repl, capture),
               l->origin);
  }
  auto kids = children(t);
  for (auto& k : kids) k = replace_ref(k, target, repl, capture);
  return with_children(t, kids);
}

}  // namespace

Term substitute_funref(const Term& t, const FunKey& target,
                       const Term& replacement) {
  return replace_ref(t, target, replacement, capturable(replacement));
}

namespace {

using Scope = std::map<std::string, std::vector<int>>;

int lookup(const Scope& s, const std::string& name) {
  auto it = s.find(name);
  return it == s.end() || it->second.empty() ? -1 : it->second.back();
}

bool aeq(const Term& a, const Term& b, Scope& sa, Scope& sb, int& next) {
  if (a.node().v.index() != b.node().v.index()) return false;
  return visit(
      a, overloaded{
             [&](const Var& va) {
               const auto& vb = *b.as<Var>();
               int ia = lookup(sa, va.name), ib = lookup(sb, vb.name);
               if (ia < 0 && ib < 0) return va.name == vb.name;
               return ia == ib;
             },
             [&](const LitInt& x) { return x.value == b.as<LitInt>()->value; },
             [&](const Atom& x) { return x.name == b.as<Atom>()->name; },
             [&](const FunRef& x) { return x.key() == b.as<FunRef>()->key(); },
             [&](const Lam& la) {
               const auto& lb = *b.as<Lam>();
               if (la.params.size() != lb.params.size()) return false;
               for (std::size_t i = 0; i < la.params.size(); ++i) {
                 int id = next++;
                 sa[la.params[i]].push_back(id);
                 sb[lb.params[i]].push_back(id);
               }
               bool r = aeq(la.body, lb.body, sa, sb, next);
               for (std::size_t i = 0; i < la.params.size(); ++i) {
                 sa[la.params[i]].pop_back();
                 sb[lb.params[i]].pop_back();
               }
               return r;
             },
             [&](const BinOp& x) {
               const auto& y = *b.as<BinOp>();
               return x.op == y.op && aeq(x.lhs, y.lhs, sa, sb, next) &&
                      aeq(x.rhs, y.rhs, sa, sb, next);
             },
             [&](const auto&) {
               auto ka = children(a), kb = children(b);
               if (ka.size() != kb.size()) return false;
               for (std::size_t i = 0; i < ka.size(); ++i)
                 if (!aeq(ka[i], kb[i], sa, sb, next)) return false;
               return true;
             },
         });
}

}  // namespace

bool alpha_eq(const Term& a, const Term& b) {
  Scope sa, sb;
  int next = 0;
  return aeq(a, b, sa, sb, next);
}

bool syntactic_eq(const Term& a, const Term& b) {
  if (a.node().v.index() != b.node().v.index()) return false;
  if (auto la = a.as<Lam>()) {
    if (la->params != b.as<Lam>()->params) return false;
  } else if (auto va = a.as<Var>()) {
    return va->name == b.as<Var>()->name;
  }
  // Leaves and operators compare through alpha_eq on an empty scope.
  if (children(a).empty()) return alpha_eq(a, b);
  if (auto x = a.as<BinOp>(); x && x->op != b.as<BinOp>()->op) return false;
  auto ka = children(a), kb = children(b);
  if (ka.size() != kb.size()) return false;
  for (std::size_t i = 0; i < ka.size(); ++i)
    if (!syntactic_eq(ka[i], kb[i])) return false;
  return true;
}

std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  for (const auto& c : children(t)) n += term_size(c);
  return n;
}

std::size_t term_depth(const Term& t) {
  std::size_t d = 0;
  for (const auto& c : children(t)) d = std::max(d, term_depth(c));
  return d + 1;
}

}  // namespace refac
