#include "refac/interp.hpp"

#include <json.hpp>
#include <optional>
#include <random>
#include <sstream>

#include "refac/error.hpp"
#include "refac/syntax.hpp"

namespace refac {

namespace {

struct Fault {
  ErrKind kind;
};
struct OutOfFuel {};

std::int64_t wrap(BinOpKind op, std::int64_t a, std::int64_t b) {
  auto ua = static_cast<std::uint64_t>(a), ub = static_cast<std::uint64_t>(b);
  switch (op) {
    case BinOpKind::add: return static_cast<std::int64_t>(ua + ub);
    case BinOpKind::sub: return static_cast<std::int64_t>(ua - ub);
    case BinOpKind::mul: return static_cast<std::int64_t>(ua * ub);
  }
  return 0;
}

class Evaluator {
 public:
  Evaluator(const Program& p, std::size_t fuel) : p_(p), fuel_(fuel) {}

  Value eval(const Term& t, const Env& env) {
    return visit(
        t,
        overloaded{
            [&](const Var& v) -> Value {
              auto it = env.find(v.name);
              if (it == env.end()) throw Fault{ErrKind::UnboundName};
              return it->second;
            },
            [&](const LitInt& l) -> Value { return IntV{l.value}; },
            [&](const LitList& l) -> Value {
              ListV out;
              for (const auto& x : l.items) out.items.push_back(eval(x, env));
              return out;
            },
            [&](const Atom& a) -> Value { return AtomV{a.name}; },
            [&](const FunRef& f) -> Value { return funref_value(f); },
            [&](const Lam& l) -> Value {
              auto captured = std::make_shared<Env>();
              for (const auto& n : lam_free(t)) {
                auto it = env.find(n);
                if (it != env.end()) captured->emplace(n, it->second);
              }
              return ClosureV{l.params, l.body, std::move(captured)};
            },
            [&](const App& a) -> Value {
              Value f = eval(a.head, env);
              std::vector<Value> args;
              args.reserve(a.args.size());
              for (const auto& x : a.args) args.push_back(eval(x, env));
              return apply(f, args);
            },
            [&](const BinOp& b) -> Value {
              Value l = eval(b.lhs, env);
              Value r = eval(b.rhs, env);
              auto li = l.as<IntV>(), ri = r.as<IntV>();
              if (!li || !ri) throw Fault{ErrKind::BadOperand};
              tick();
              return IntV{wrap(b.op, li->value, ri->value)};
            },
        });
  }

  Value apply(const Value& f, const std::vector<Value>& args) {
    if (p_.flavor == Flavor::mfe) {
      tick();
      if (auto c = f.as<ClosureV>()) {
        if (c->params.size() != args.size()) throw Fault{ErrKind::ArityMismatch};
        return call_closure(*c, args);
      }
      if (auto pr = f.as<PrimV>()) {
        if (static_cast<int>(args.size()) != pr->arity)
          throw Fault{ErrKind::ArityMismatch};
        return call_prim(pr->name, args);
      }
      throw Fault{ErrKind::NotAFunction};
    }
    Value cur = f;
    for (const auto& a : args) cur = apply1(cur, a);
    return cur;
  }

  Value funref_value(const FunRef& f) {
    if (auto d = p_.lookup(f.key())) {
      if (p_.flavor == Flavor::mfe) {
        return ClosureV{d->params, d->body, empty_env()};
      }
      if (d->params.empty()) {
        tick();
        Guard g(*this);
        return eval(d->body, Env{});
      }
      std::vector<std::string> rest(d->params.begin() + 1, d->params.end());
      return ClosureV{{d->params[0]}, curried_lam(rest, d->body), empty_env()};
    }
    if (auto i = find_intrinsic(p_.flavor, f.name)) {
      if (p_.flavor == Flavor::mfe && i->arity != f.arity)
        throw Fault{ErrKind::UnboundName};
      return PrimV{i->name, i->arity, {}};
    }
    throw Fault{ErrKind::UnboundName};
  }

 private:
  struct Guard {
    explicit Guard(Evaluator& e) : e_(e) {
      if (++e_.depth_ > kMaxCallDepth) throw OutOfFuel{};
    }
    ~Guard() { --e_.depth_; }
    Evaluator& e_;
  };

  void tick() {
    if (fuel_ == 0) throw OutOfFuel{};
    --fuel_;
  }

  static EnvPtr empty_env() {
    static const EnvPtr e = std::make_shared<Env>();
    return e;
  }

  const NameSet& lam_free(const Term& t) {
    auto key = &t.node();
    auto it = free_cache_.find(key);
    // The Term copy pins the node so its address cannot be reused.
    if (it == free_cache_.end())
      it = free_cache_.emplace(key, std::make_pair(t, free_vars(t))).first;
    return it->second.second;
  }

  Value call_closure(const ClosureV& c, const std::vector<Value>& args) {
    Env env = *c.env;
    for (std::size_t i = 0; i < c.params.size(); ++i) env[c.params[i]] = args[i];
    Guard g(*this);
    return eval(c.body, env);
  }

  Value apply1(const Value& f, const Value& a) {
    tick();
    if (auto c = f.as<ClosureV>()) {
      if (c->params.empty()) throw Fault{ErrKind::NotAFunction};
      if (c->params.size() == 1) return call_closure(*c, {a});
      auto env = std::make_shared<Env>(*c->env);
      (*env)[c->params[0]] = a;
      return ClosureV{std::vector<std::string>(c->params.begin() + 1, c->params.end()),
                      c->body, env};
    }
    if (auto pr = f.as<PrimV>()) {
      PrimV next = *pr;
      next.args.push_back(a);
      if (static_cast<int>(next.args.size()) < next.arity) return next;
      return call_prim(next.name, next.args);
    }
    throw Fault{ErrKind::NotAFunction};
  }

  Value call_prim(const std::string& name, const std::vector<Value>& args) {
    Guard g(*this);
    if (name == "lists:map" || name == "map") {
      auto l = args[1].as<ListV>();
      if (!l) throw Fault{ErrKind::BadOperand};
      ListV out;
      for (const auto& x : l->items) out.items.push_back(apply(args[0], {x}));
      return out;
    }
    if (name == "apply" || name == "spawn") {
      auto l = args[1].as<ListV>();
      if (!l) throw Fault{ErrKind::BadOperand};
      if (auto a = args[0].as<AtomV>()) {
        FunRef ref{a->name, static_cast<int>(l->items.size())};
        if (!p_.lookup(ref.key())) throw Fault{ErrKind::UnboundName};
        return apply(funref_value(ref), l->items);
      }
      return apply(args[0], l->items);
    }
    if (name == "new_sum") {
      auto l = args[0].as<ListV>();
      if (!l) throw Fault{ErrKind::BadOperand};
      std::int64_t s = 0;
      for (const auto& x : l->items) {
        auto i = x.as<IntV>();
        if (!i) throw Fault{ErrKind::BadOperand};
        s = wrap(BinOpKind::add, s, i->value);
      }
      return IntV{s};
    }
    throw Fault{ErrKind::UnboundName};
  }

  const Program& p_;
  std::size_t fuel_;
  int depth_ = 0;
  std::map<const Node*, std::pair<Term, NameSet>> free_cache_;
};

template <class F>
Outcome guarded(F&& f) {
  try {
    return Outcome::ok(f());
  } catch (const Fault& e) {
    return Outcome::error(e.kind);
  } catch (const OutOfFuel&) {
    return Outcome::timeout();
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ index);
}

}  // namespace

Value int_value(std::int64_t v) { return IntV{v}; }

Value list_value(const std::vector<std::int64_t>& xs) {
  ListV l;
  for (auto x : xs) l.items.push_back(IntV{x});
  return l;
}

std::string to_string(const Value& v, Flavor flavor) {
  return std::visit(
      overloaded{
          [](const IntV& i) { return std::to_string(i.value); },
          [&](const ListV& l) {
            std::string s = "[";
            for (std::size_t i = 0; i < l.items.size(); ++i) {
              if (i) s += ", ";
              s += to_string(l.items[i], flavor);
            }
            return s + "]";
          },
          [&](const ClosureV& c) {
            if (c.params.empty()) return print(lam({}, c.body), flavor);
            return flavor == Flavor::mfh ? print(curried_lam(c.params, c.body), flavor)
                                         : print(lam(c.params, c.body), flavor);
          },
          [](const AtomV& a) { return a.name; },
          [&](const PrimV& p) {
            std::string s = p.name + "/" + std::to_string(p.arity);
            for (const auto& a : p.args) s += " " + to_string(a, flavor);
            return s;
          },
      },
      v.variant());
}

std::string_view to_string(ErrKind kind) {
  switch (kind) {
    case ErrKind::UnboundName: return "UnboundName";
    case ErrKind::ArityMismatch: return "ArityMismatch";
    case ErrKind::NotAFunction: return "NotAFunction";
    case ErrKind::BadOperand: return "BadOperand";
  }
  return "?";
}

std::string to_string(const Outcome& o, Flavor flavor) {
  switch (o.kind) {
    case Outcome::Kind::ok: return to_string(o.value, flavor);
    case Outcome::Kind::err: return "error(" + std::string(to_string(o.err)) + ")";
    case Outcome::Kind::timeout: return "timeout";
  }
  return "?";
}

Outcome interpret(const Program& p, const FunKey& entry,
                  const std::vector<Value>& args, std::size_t fuel) {
  Evaluator ev(p, fuel);
  return guarded([&]() -> Value {
    if (!p.lookup(entry)) throw Fault{ErrKind::UnboundName};
    Value f = ev.funref_value(FunRef{entry.name, entry.arity});
    if (p.flavor == Flavor::mfh && args.empty()) return f;
    return ev.apply(f, args);
  });
}

Outcome interpret_term(const Program& p, const Term& t, std::size_t fuel) {
  Evaluator ev(p, fuel);
  return guarded([&] { return ev.eval(t, Env{}); });
}

Outcome apply_value(const Program& p, const Value& fn,
                    const std::vector<Value>& args, std::size_t fuel) {
  Evaluator ev(p, fuel);
  return guarded([&] { return ev.apply(fn, args); });
}

std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::int_: return "int";
    case Shape::list_int: return "list_int";
    case Shape::fun_int_int: return "fun_int_int";
  }
  return "?";
}

Shape parse_shape(std::string_view s) {
  if (s == "int") return Shape::int_;
  if (s == "list_int") return Shape::list_int;
  if (s == "fun_int_int") return Shape::fun_int_int;
  throw RefacError(ErrorKind::UsageError, "unknown shape '" + std::string(s) + "'");
}

const std::vector<Term>& closure_pool(Flavor flavor) {
  auto build = [](const std::string& x) {
    Term v = var(x);
    std::vector<Term> bodies{
        v,
        binop(BinOpKind::add, v, lit(1)),
        binop(BinOpKind::mul, v, lit(2)),
        lit(0),
        binop(BinOpKind::sub, lit(0), v),
        binop(BinOpKind::mul, v, lit(-3)),
        binop(BinOpKind::add, v, lit(40)),
        binop(BinOpKind::mul, v, v),
    };
    std::vector<Term> out;
    for (auto& b : bodies) out.push_back(lam({x}, b));
    return out;
  };
  static const std::vector<Term> mfe = build("X");
  static const std::vector<Term> mfh = build("x");
  return flavor == Flavor::mfe ? mfe : mfh;
}

std::vector<Value> gen_values(Shape shape, std::uint64_t seed, std::size_t n,
                              Flavor flavor) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> ints(-100, 100);
  std::uniform_int_distribution<int> len(0, 5);
  std::uniform_int_distribution<int> pick(0, 7);
  std::vector<Value> out;
  for (std::size_t i = 0; i < n; ++i) {
    switch (shape) {
      case Shape::int_: out.push_back(IntV{ints(rng)}); break;
      case Shape::list_int: {
        ListV l;
        for (int k = len(rng); k > 0; --k) l.items.push_back(IntV{ints(rng)});
        out.push_back(std::move(l));
        break;
      }
      case Shape::fun_int_int: {
        auto l = closure_pool(flavor)[pick(rng)].as<Lam>();
        out.push_back(ClosureV{l->params, l->body, std::make_shared<Env>()});
        break;
      }
    }
  }
  return out;
}

namespace {

// Call spine: MFE applications are already n-ary; MFH ones are unwound.
std::pair<Term, std::vector<Term>> spine(const Term& t, Flavor flavor) {
  auto a = t.as<App>();
  if (flavor == Flavor::mfe) return {a->head, a->args};
  std::vector<Term> args;
  Term cur = t;
  while (auto x = cur.as<App>()) {
    args.insert(args.begin(), x->args.begin(), x->args.end());
    cur = x->head;
  }
  return {cur, args};
}

using ShapeGuess = std::vector<std::optional<Shape>>;

class ShapeScan {
 public:
  ShapeScan(const Program& p, std::map<FunKey, ShapeGuess>& known)
      : p_(p), known_(known) {}

  void run(const Definition& d) {
    ShapeGuess& out = known_[d.key()];
    std::map<std::string, int> idx;
    for (int i = 0; i < d.arity(); ++i) idx[d.params[i]] = i;
    scan(d.body, idx, out);
  }

 private:
  static void mark(ShapeGuess& out, const std::map<std::string, int>& idx,
                   const Term& t, Shape s) {
    auto v = t.as<Var>();
    if (!v) return;
    auto it = idx.find(v->name);
    if (it != idx.end() && !out[it->second]) out[it->second] = s;
  }

  void scan(const Term& t, const std::map<std::string, int>& idx, ShapeGuess& out) {
    if (auto l = t.as<Lam>()) {
      auto inner = idx;
      for (const auto& p : l->params) inner.erase(p);
      scan(l->body, inner, out);
      return;
    }
    if (auto b = t.as<BinOp>()) {
      mark(out, idx, b->lhs, Shape::int_);
      mark(out, idx, b->rhs, Shape::int_);
    }
    if (t.is<App>()) {
      auto [head, args] = spine(t, p_.flavor);
      mark(out, idx, head, Shape::fun_int_int);
      if (auto f = head.as<FunRef>()) {
        if (f->name == "lists:map" || f->name == "map" || f->name == "apply" ||
            f->name == "spawn") {
          if (args.size() > 0) mark(out, idx, args[0], Shape::fun_int_int);
          if (args.size() > 1) mark(out, idx, args[1], Shape::list_int);
        } else if (f->name == "new_sum") {
          if (!args.empty()) mark(out, idx, args[0], Shape::list_int);
        } else if (auto d = p_.lookup(f->key())) {
          auto it = known_.find(d->key());
          if (it != known_.end())
            for (std::size_t i = 0; i < args.size() && i < it->second.size(); ++i)
              if (it->second[i]) mark(out, idx, args[i], *it->second[i]);
        }
      }
    }
    for (const auto& k : children(t)) scan(k, idx, out);
  }

  const Program& p_;
  std::map<FunKey, ShapeGuess>& known_;
};

}  // namespace

std::vector<Shape> infer_shapes(const Program& p, const FunKey& entry) {
  std::map<FunKey, ShapeGuess> known;
  for (const auto& d : p.defs) known[d.key()] = ShapeGuess(d.params.size());
  ShapeScan scan(p, known);
  for (int round = 0; round < 4; ++round)
    for (const auto& d : p.defs) scan.run(d);
  std::vector<Shape> out(entry.arity, Shape::int_);
  auto it = known.find(entry);
  if (it != known.end())
    for (std::size_t i = 0; i < out.size() && i < it->second.size(); ++i)
      out[i] = it->second[i].value_or(Shape::int_);
  return out;
}

namespace {

bool values_agree(const Program& pa, const Value& a, const Program& pb,
                  const Value& b, std::size_t fuel, int depth) {
  if (a.is_function() && b.is_function()) {
    if (depth > 3) return true;
    int arity = 1;
    if (pa.flavor == Flavor::mfe) {
      if (auto c = a.as<ClosureV>()) arity = static_cast<int>(c->params.size());
      if (auto p = a.as<PrimV>()) arity = p->arity - static_cast<int>(p->args.size());
    }
    auto probes = gen_values(Shape::int_, 0x9e3779b97f4a7c15ull, 5, pa.flavor);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      std::vector<Value> args;
      for (int j = 0; j < arity; ++j) args.push_back(probes[(i + j) % probes.size()]);
      Outcome oa = apply_value(pa, a, args, fuel);
      Outcome ob = apply_value(pb, b, args, fuel);
      if (oa.kind == Outcome::Kind::timeout || ob.kind == Outcome::Kind::timeout)
        continue;
      if (oa.kind != ob.kind) return false;
      if (oa.kind == Outcome::Kind::err) {
        if (oa.err != ob.err) return false;
        continue;
      }
      if (!values_agree(pa, oa.value, pb, ob.value, fuel, depth + 1)) return false;
    }
    return true;
  }
  if (a.variant().index() != b.variant().index()) return false;
  if (auto x = a.as<IntV>()) return x->value == b.as<IntV>()->value;
  if (auto x = a.as<AtomV>()) return x->name == b.as<AtomV>()->name;
  if (auto x = a.as<ListV>()) {
    auto y = b.as<ListV>();
    if (x->items.size() != y->items.size()) return false;
    for (std::size_t i = 0; i < x->items.size(); ++i)
      if (!values_agree(pa, x->items[i], pb, y->items[i], fuel, depth)) return false;
    return true;
  }
  return false;
}

}  // namespace

bool outcomes_agree(const Program& pa, const Outcome& a, const Program& pb,
                    const Outcome& b, std::size_t fuel) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Outcome::Kind::timeout: return true;
    case Outcome::Kind::err: return a.err == b.err;
    case Outcome::Kind::ok: return values_agree(pa, a.value, pb, b.value, fuel, 0);
  }
  return false;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::equivalent_on_samples: return "equivalent_on_samples";
    case Verdict::counterexample_found: return "counterexample_found";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

EquivReport check_equiv(const Program& old_p, const Program& new_p,
                        const FunKey& entry, const std::vector<Shape>& shapes,
                        const EquivOptions& opts) {
  return check_equiv(old_p, entry, new_p, entry, shapes, opts);
}

EquivReport check_equiv(const Program& old_p, const FunKey& old_entry,
                        const Program& new_p, const FunKey& new_entry,
                        const std::vector<Shape>& shapes,
                        const EquivOptions& opts) {
  for (auto [prog, key] : {std::pair{&old_p, &old_entry}, std::pair{&new_p, &new_entry}})
    if (!prog->lookup(*key))
      throw RefacError(ErrorKind::EntryMissing, to_string(*key));
  if (shapes.size() != static_cast<std::size_t>(old_entry.arity))
    throw RefacError(ErrorKind::UsageError, "expected " + std::to_string(old_entry.arity) + " shapes");
  EquivReport r;
  r.flavor = old_p.flavor;
  r.samples = opts.samples;
  for (std::size_t i = 0; i < opts.samples; ++i) {
    std::uint64_t s = split_seed(opts.seed, i);
    std::vector<Value> args;
    for (std::size_t j = 0; j < shapes.size(); ++j)
      args.push_back(gen_values(shapes[j], split_seed(s, j), 1, old_p.flavor)[0]);
    Outcome a = interpret(old_p, old_entry, args, opts.fuel);
    Outcome b = interpret(new_p, new_entry, args, opts.fuel);
    if (a.kind == Outcome::Kind::timeout || b.kind == Outcome::Kind::timeout) {
      ++r.inconclusive;
    } else if (outcomes_agree(old_p, a, new_p, b, opts.fuel)) {
      ++r.agreements;
    } else {
      r.disagreements.push_back({std::move(args), std::move(a), std::move(b)});
    }
  }
  if (!r.disagreements.empty())
    r.verdict = Verdict::counterexample_found;
  else if (r.agreements > 0)
    r.verdict = Verdict::equivalent_on_samples;
  else
    r.verdict = Verdict::inconclusive;
  return r;
}

EquivReport check_obligation(const Program& p, const AdapterSpec& spec,
                             const EquivOptions& opts) {
  if (!p.lookup(spec.target))
    throw RefacError(ErrorKind::TargetUndefined, to_string(spec.target));
  Program q;
  q.flavor = p.flavor;
  auto replaced = [&](const Definition& d) {
    for (const auto& n : spec.new_defs)
      if (p.flavor == Flavor::mfh ? n.name == d.name : n.key() == d.key()) return true;
    return false;
  };
  for (const auto& d : p.defs) {
    if (spec.remove_old && d.key() == spec.target) continue;
    if (!replaced(d)) q.defs.push_back(d);
  }
  for (const auto& n : spec.new_defs) q.defs.push_back(n);

  Definition wrapper;
  wrapper.name = "__old_" + std::to_string(spec.target.arity);
  std::vector<Term> vars;
  for (int i = 1; i <= spec.target.arity; ++i) {
    wrapper.params.push_back((p.flavor == Flavor::mfe ? "X_" : "x_") + std::to_string(i));
    vars.push_back(var(wrapper.params.back()));
  }
  if (vars.empty())
    wrapper.body = p.flavor == Flavor::mfe && spec.adapter.is<Lam>()
                       ? app(spec.adapter, {})
                       : spec.adapter;
  else
    wrapper.body = p.flavor == Flavor::mfe ? app(spec.adapter, vars)
                                           : curried_app(spec.adapter, vars);
  q.defs.push_back(wrapper);

  return check_equiv(p, spec.target, q, wrapper.key(),
                     infer_shapes(p, spec.target), opts);
}

std::string report_text(const EquivReport& r) {
  std::ostringstream os;
  os << "verdict: " << to_string(r.verdict) << "\n"
     << "samples: " << r.samples << "\n"
     << "agreements: " << r.agreements << "\n"
     << "inconclusive: " << r.inconclusive << "\n"
     << "disagreements: " << r.disagreements.size() << "\n";
  for (const auto& d : r.disagreements) {
    os << "  args (";
    for (std::size_t i = 0; i < d.args.size(); ++i)
      os << (i ? ", " : "") << to_string(d.args[i], r.flavor);
    os << ") old: " << to_string(d.old_outcome, r.flavor)
       << " new: " << to_string(d.new_outcome, r.flavor) << "\n";
  }
  return os.str();
}

std::string report_json(const EquivReport& r) {
  nlohmann::json j;
  j["samples"] = r.samples;
  j["agreements"] = r.agreements;
  j["inconclusive"] = r.inconclusive;
  j["verdict"] = to_string(r.verdict);
  j["disagreements"] = nlohmann::json::array();
  for (const auto& d : r.disagreements) {
    nlohmann::json e;
    e["args"] = nlohmann::json::array();
    for (const auto& a : d.args) e["args"].push_back(to_string(a, r.flavor));
    e["old"] = to_string(d.old_outcome, r.flavor);
    e["new"] = to_string(d.new_outcome, r.flavor);
    j["disagreements"].push_back(std::move(e));
  }
  return j.dump(2);
}

}  // namespace refac
