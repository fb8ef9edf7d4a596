#include "refac/rewrite.hpp"

#include <algorithm>

#include "refac/error.hpp"

namespace refac {

std::string_view to_string(RuleId rule) {
  switch (rule) {
    case RuleId::beta: return "BETA";
    case RuleId::eta_reduce: return "ETA_REDUCE";
    case RuleId::eta_expand_ref: return "ETA_EXPAND_REF";
    case RuleId::atom_lift: return "ATOM_LIFT";
  }
  return "?";
}

std::vector<RuleId> default_rules() { return {RuleId::beta, RuleId::eta_reduce}; }

namespace {

bool is_value(const Term& t) {
  if (t.is<Var>() || t.is<LitInt>() || t.is<Atom>() || t.is<FunRef>() ||
      t.is<Lam>())
    return true;
  if (auto l = t.as<LitList>())
    return std::all_of(l->items.begin(), l->items.end(), is_value);
  return false;
}

// How many more curried arguments `t` accepts before its body runs, when
// that is evident from the syntax; 0 when unknown. MFH only.
int known_arity(const Term& t) {
  if (auto l = t.as<Lam>()) {
    int n = static_cast<int>(l->params.size());
    if (l->body.is<Lam>()) n += known_arity(l->body);
    return n;
  }
  if (auto f = t.as<FunRef>()) return f->arity;
  if (auto a = t.as<App>()) {
    if (a->args.size() != 1 || !is_value(a->args[0])) return 0;
    return std::max(0, known_arity(a->head) - 1);
  }
  return 0;
}

Term keep_origin(const Term& result, LamOrigin origin) {
  auto l = result.as<Lam>();
  if (!l || origin == LamOrigin::source || l->origin == origin)
    return result;
  return lam(l->params, l->body, origin);
}

// An infix-sugared application whose head lambda eta-collapses to a plain
// function is tidied in place rather than beta-reduced, so the backtick
// form survives.
bool eta_collapses(const Term& head) {
  RuleContext ctx{Flavor::mfh, std::nullopt, nullptr};
  Normalizer n({RuleId::eta_reduce}, ctx, {Traversal::innermost, 1000});
  try {
    return !n.run(head).is<Lam>();
  } catch (const RefacError&) {
    return false;
  }
}

}  // namespace

std::optional<Term> step_beta(const Term& t, Flavor flavor) {
  auto a = t.as<App>();
  if (!a) return std::nullopt;
  auto l = a->head.as<Lam>();
  if (!l || l->params.size() != a->args.size()) return std::nullopt;
  if (flavor == Flavor::mfh && a->sugar == Sugar::infix && eta_collapses(a->head))
    return std::nullopt;
  Binding b;
  for (std::size_t i = 0; i < l->params.size(); ++i) b[l->params[i]] = a->args[i];
  return substitute(l->body, b);
}

std::optional<Term> step_eta_reduce(const Term& t, Flavor flavor) {
  auto l = t.as<Lam>();
  if (!l) return std::nullopt;
  auto body = l->body.as<App>();
  if (!body || l->params.empty()) return std::nullopt;
  const auto& ps = l->params;
  const auto& args = body->args;
  if (args.size() < ps.size()) return std::nullopt;
  std::size_t prefix = args.size() - ps.size();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto v = args[prefix + i].as<Var>();
    if (!v || v->name != ps[i]) return std::nullopt;
  }
  NameSet blocked(ps.begin(), ps.end());
  auto occurs = [&](const Term& x) {
    auto fv = free_vars(x);
    return std::any_of(fv.begin(), fv.end(),
                       [&](const auto& n) { return blocked.count(n) > 0; });
  };
  if (occurs(body->head)) return std::nullopt;
  for (std::size_t i = 0; i < prefix; ++i)
    if (occurs(args[i])) return std::nullopt;

  if (flavor == Flavor::mfe) {
    // Uncurried: the whole argument list must be the parameters and the head
    // a lambda of the same arity; known function names stay as calls.
    auto h = body->head.as<Lam>();
    if (prefix != 0 || !h || h->params.size() != ps.size()) return std::nullopt;
    return keep_origin(body->head, l->origin);
  }
  if (ps.size() != 1 || args.size() != 1) return std::nullopt;
  if (known_arity(body->head) < 1) return std::nullopt;
  return keep_origin(body->head, l->origin);
}

Term eta_expand(const FunKey& ref, Flavor flavor) {
  NameSet avoid{ref.name};
  std::vector<std::string> params;
  std::vector<Term> args;
  const char* base = flavor == Flavor::mfe ? "X" : "x";
  for (int i = 0; i < ref.arity; ++i) {
    auto p = fresh_name(base, avoid);
    avoid.insert(p);
    params.push_back(p);
    args.push_back(var(p));
  }
  if (flavor == Flavor::mfe)
    return lam(params, app(funref(ref), args), LamOrigin::eta_expanded);
  return curried_lam(params, curried_app(funref(ref), args),
                     LamOrigin::eta_expanded);
}

std::optional<Term> step_eta_expand_ref(const Term& t, const RuleContext& ctx) {
  auto f = t.as<FunRef>();
  if (!f || !ctx.target || f->key() != *ctx.target) return std::nullopt;
  if (ctx.flavor == Flavor::mfh && f->arity == 0) return std::nullopt;
  return eta_expand(f->key(), ctx.flavor);
}

std::optional<Term> step_atom_lift(const Term& t, const RuleContext& ctx) {
  if (ctx.flavor != Flavor::mfe || !ctx.target) return std::nullopt;
  auto a = t.as<App>();
  if (!a || a->args.size() != 2) return std::nullopt;
  auto head = a->head.as<FunRef>();
  if (!head || (head->name != "spawn" && head->name != "apply"))
    return std::nullopt;
  auto at = a->args[0].as<Atom>();
  if (!at || at->name != ctx.target->name) return std::nullopt;
  if (auto l = a->args[1].as<LitList>()) {
    if (static_cast<int>(l->items.size()) != ctx.target->arity)
      return std::nullopt;
  } else if (ctx.program) {
    std::set<int> arities;
    for (const auto& d : ctx.program->defs)
      if (d.name == at->name) arities.insert(d.arity());
    if (arities.size() > 1)
      throw RefacError(ErrorKind::AmbiguousAtomArity,
                       at->name + " in " + std::string(head->name) + "(...)");
  }
  Term expanded = eta_expand(*ctx.target, ctx.flavor);
  auto e = expanded.as<Lam>();
  return app(a->head,
             {lam(e->params, e->body, LamOrigin::atom_lifted), a->args[1]},
             a->sugar);
}

std::optional<Term> apply_rule(RuleId rule, const Term& t,
                               const RuleContext& ctx) {
  switch (rule) {
    case RuleId::beta: return step_beta(t, ctx.flavor);
    case RuleId::eta_reduce: return step_eta_reduce(t, ctx.flavor);
    case RuleId::eta_expand_ref: return step_eta_expand_ref(t, ctx);
    case RuleId::atom_lift: return step_atom_lift(t, ctx);
  }
  return std::nullopt;
}

namespace {

Term expand_non_head(const Term& t, const RuleContext& ctx) {
  if (auto r = step_eta_expand_ref(t, ctx)) return *r;
  if (auto a = t.as<App>()) {
    Term head = a->head.is<FunRef>() ? a->head : expand_non_head(a->head, ctx);
    std::vector<Term> args;
    for (const auto& x : a->args) args.push_back(expand_non_head(x, ctx));
    return app(head, args, a->sugar);
  }
  auto kids = children(t);
  if (kids.empty()) return t;
  for (auto& k : kids) k = expand_non_head(k, ctx);
  return with_children(t, kids);
}

Term lift_atoms(const Term& t, const RuleContext& ctx) {
  auto kids = children(t);
  Term rebuilt = t;
  if (!kids.empty()) {
    for (auto& k : kids) k = lift_atoms(k, ctx);
    rebuilt = with_children(t, kids);
  }
  if (auto r = step_atom_lift(rebuilt, ctx)) return *r;
  return rebuilt;
}

}  // namespace

Program eta_expand_refs(const Program& p, const FunKey& target,
                        const RuleContext& ctx) {
  RuleContext c = ctx;
  c.flavor = p.flavor;
  c.target = target;
  Program out = p;
  for (auto& d : out.defs) d.body = expand_non_head(d.body, c);
  return out;
}

Program atom_lift(const Program& p, const FunKey& target, const RuleContext& ctx) {
  if (p.flavor != Flavor::mfe) return p;
  RuleContext c = ctx;
  c.flavor = p.flavor;
  c.target = target;
  if (!c.program) c.program = &p;
  Program out = p;
  for (auto& d : out.defs) d.body = lift_atoms(d.body, c);
  return out;
}

Term contract_expanded_refs(const Term& t) {
  auto kids = children(t);
  Term rebuilt = t;
  if (!kids.empty()) {
    for (auto& k : kids) k = contract_expanded_refs(k);
    rebuilt = with_children(t, kids);
  }
  auto l = rebuilt.as<Lam>();
  if (!l || l->origin == LamOrigin::source) return rebuilt;
  std::vector<std::string> params = l->params;
  Term body = l->body;
  while (auto inner = body.as<Lam>()) {
    if (inner->origin != l->origin) return rebuilt;
    params.insert(params.end(), inner->params.begin(), inner->params.end());
    body = inner->body;
  }
  std::vector<Term> args;
  while (auto a = body.as<App>()) {
    if (a->sugar != Sugar::prefix) return rebuilt;
    args.insert(args.begin(), a->args.begin(), a->args.end());
    body = a->head;
  }
  auto f = body.as<FunRef>();
  if (!f || f->arity != static_cast<int>(params.size()) ||
      args.size() != params.size())
    return rebuilt;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto v = args[i].as<Var>();
    if (!v || v->name != params[i]) return rebuilt;
  }
  if (l->origin == LamOrigin::atom_lifted) return atom(f->name);
  return body;
}

bool has_redex(const Term& t, Flavor flavor) {
  if (step_beta(t, flavor) || step_eta_reduce(t, flavor)) return true;
  for (const auto& c : children(t))
    if (has_redex(c, flavor)) return true;
  return false;
}

Normalizer::Normalizer(std::vector<RuleId> rules, RuleContext ctx,
                       Strategy strategy, TraceSink sink)
    : rules_(std::move(rules)),
      ctx_(ctx),
      strategy_(strategy),
      sink_(std::move(sink)) {}

std::optional<Term> Normalizer::try_rules(const Term& t, const std::string& path) {
  for (auto rule : rules_) {
    auto r = apply_rule(rule, t, ctx_);
    if (!r) continue;
    if (total_ >= strategy_.fuel) {
      std::string detail = "fuel of " + std::to_string(strategy_.fuel) +
                           " firings exhausted; last firings:";
      for (const auto& f : recent_) detail += " " + f + ";";
      throw RefacError(ErrorKind::RewriteDivergence, detail);
    }
    ++total_;
    ++by_rule_[rule];
    recent_.push_back(std::string(to_string(rule)) + " @ " + path);
    if (recent_.size() > 10) recent_.pop_front();
    if (sink_) sink_({rule, path, t, *r});
    return r;
  }
  return std::nullopt;
}

Term Normalizer::outermost(Term t, const std::string& path) {
  for (;;) {
    while (auto r = try_rules(t, path)) t = *r;
    auto kids = children(t);
    bool changed = false;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      Term k = outermost(kids[i], path + "." + std::to_string(i));
      if (!k.same_node(kids[i])) {
        kids[i] = k;
        changed = true;
      }
    }
    if (!changed) return t;
    t = with_children(t, kids);
  }
}

Term Normalizer::innermost(const Term& t, const std::string& path) {
  auto kids = children(t);
  Term rebuilt = t;
  if (!kids.empty()) {
    bool changed = false;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      Term k = innermost(kids[i], path + "." + std::to_string(i));
      if (!k.same_node(kids[i])) {
        kids[i] = k;
        changed = true;
      }
    }
    if (changed) rebuilt = with_children(t, kids);
  }
  if (auto r = try_rules(rebuilt, path)) return innermost(*r, path);
  return rebuilt;
}

Term Normalizer::run(const Term& t, const std::string& path) {
  return strategy_.order == Traversal::outermost ? outermost(t, path)
                                                 : innermost(t, path);
}

Term normalize(const Term& t, const std::vector<RuleId>& rules,
               const RuleContext& ctx, const Strategy& strategy) {
  return Normalizer(rules, ctx, strategy).run(t);
}

}  // namespace refac
