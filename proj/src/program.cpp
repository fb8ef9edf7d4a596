#include "refac/program.hpp"

#include <algorithm>
#include <map>

#include "refac/error.hpp"

namespace refac {

const Definition* Program::find(const FunKey& key) const {
  for (const auto& d : defs)
    if (d.name == key.name && d.arity() == key.arity) return &d;
  return nullptr;
}

const Definition* Program::find_name(const std::string& name) const {
  for (const auto& d : defs)
    if (d.name == name) return &d;
  return nullptr;
}

const Definition* Program::lookup(const FunKey& key) const {
  if (flavor == Flavor::mfh) {
    auto d = find_name(key.name);
    return d && d->arity() == key.arity ? d : nullptr;
  }
  return find(key);
}

const std::vector<Intrinsic>& intrinsics(Flavor flavor) {
  static const std::vector<Intrinsic> mfe{
      {"lists:map", 2}, {"apply", 2}, {"spawn", 2}, {"new_sum", 1}};
  static const std::vector<Intrinsic> mfh{{"map", 2}, {"new_sum", 1}};
  return flavor == Flavor::mfe ? mfe : mfh;
}

std::optional<Intrinsic> find_intrinsic(Flavor flavor, const std::string& name) {
  for (const auto& i : intrinsics(flavor))
    if (i.name == name) return i;
  return std::nullopt;
}

bool is_special_head(const std::string& name) {
  return name == "spawn" || name == "apply" || name == "lists:map" ||
         name == "map";
}

namespace {

std::string where(const Definition& d) { return "in " + to_string(d.key()); }

class Resolver {
 public:
  Resolver(const Program& p, const ResolveOptions& opts) : p_(p), opts_(opts) {}

  Program run() {
    check_table();
    if (p_.flavor == Flavor::mfh) infer_external_arities();
    Program out{p_.flavor, {}};
    for (const auto& d : p_.defs) {
      current_ = &d;
      NameSet bound(d.params.begin(), d.params.end());
      out.defs.push_back({d.name, d.params, walk(d.body, bound)});
    }
    return out;
  }

 private:
  void check_table() {
    std::set<FunKey> keys;
    NameSet names;
    for (const auto& d : p_.defs) {
      if (find_intrinsic(p_.flavor, d.name))
        throw RefacError(ErrorKind::ShadowsIntrinsic, to_string(d.key()));
      bool fresh = p_.flavor == Flavor::mfe ? keys.insert(d.key()).second
                                            : names.insert(d.name).second;
      if (!fresh)
        throw RefacError(ErrorKind::DuplicateDefinition, to_string(d.key()));
      NameSet seen;
      for (const auto& param : d.params)
        if (!seen.insert(param).second)
          throw RefacError(ErrorKind::DuplicateDefinition,
                           "parameter " + param + " repeated " + where(d));
    }
  }

  bool is_known(const std::string& name) const {
    return p_.find_name(name) || find_intrinsic(p_.flavor, name);
  }

  // Spine length of every call to an undefined name; MFH only.
  void infer_external_arities() {
    if (!opts_.allow_external) return;
    for (const auto& d : p_.defs) {
      NameSet bound(d.params.begin(), d.params.end());
      scan_spines(d.body, bound, d);
    }
  }

  void record_external(const std::string& name, int arity,
                       const Definition& d) {
    auto [it, inserted] = external_.emplace(name, arity);
    if (!inserted && it->second != arity)
      throw RefacError(ErrorKind::ArityMismatch,
                       "external " + name + " called with " +
                           std::to_string(it->second) + " and " +
                           std::to_string(arity) + " arguments " + where(d));
  }

  void scan_spines(const Term& t, NameSet& bound, const Definition& d) {
    if (t.is<App>()) {
      Term head = t;
      int n = 0;
      std::vector<Term> args;
      while (auto ap = head.as<App>()) {
        n += static_cast<int>(ap->args.size());
        for (const auto& x : ap->args) args.push_back(x);
        head = ap->head;
      }
      std::string name;
      if (auto v = head.as<Var>(); v && !bound.count(v->name)) name = v->name;
      if (auto f = head.as<FunRef>()) name = f->name;
      if (!name.empty() && !is_known(name)) record_external(name, n, d);
      if (!head.is<Var>() && !head.is<FunRef>()) scan_spines(head, bound, d);
      for (const auto& x : args) scan_spines(x, bound, d);
      return;
    }
    if (auto l = t.as<Lam>()) {
      std::vector<std::string> added;
      for (const auto& p : l->params)
        if (bound.insert(p).second) added.push_back(p);
      scan_spines(l->body, bound, d);
      for (const auto& p : added) bound.erase(p);
      return;
    }
    for (const auto& c : children(t)) scan_spines(c, bound, d);
  }

  Term resolve_name(const std::string& name) {
    if (auto d = p_.find_name(name)) return funref(name, d->arity());
    if (auto i = find_intrinsic(p_.flavor, name)) return funref(name, i->arity);
    if (opts_.allow_external) {
      auto it = external_.find(name);
      return funref(name, it == external_.end() ? 0 : it->second);
    }
    throw RefacError(ErrorKind::UnboundName, name + " " + where(*current_));
  }

  Term walk(const Term& t, NameSet& bound) {
    if (auto v = t.as<Var>()) {
      if (bound.count(v->name)) return t;
      if (p_.flavor == Flavor::mfh) return resolve_name(v->name);
      throw RefacError(ErrorKind::UnboundName, v->name + " " + where(*current_));
    }
    if (auto f = t.as<FunRef>()) {
      if (p_.flavor == Flavor::mfh) {
        if (p_.find_name(f->name) || find_intrinsic(p_.flavor, f->name))
          return resolve_name(f->name);
        if (opts_.allow_external) return t;
        throw RefacError(ErrorKind::UnboundName,
                         f->name + " " + where(*current_));
      }
      if (p_.find(f->key())) return t;
      if (auto i = find_intrinsic(p_.flavor, f->name); i && i->arity == f->arity)
        return t;
      if (opts_.allow_external) return t;
      throw RefacError(ErrorKind::UnboundName,
                       to_string(f->key()) + " " + where(*current_));
    }
    if (auto l = t.as<Lam>()) {
      NameSet seen;
      for (const auto& p : l->params)
        if (!seen.insert(p).second)
          throw RefacError(ErrorKind::DuplicateDefinition,
                           "lambda parameter " + p + " repeated " +
                               where(*current_));
      std::vector<std::string> added;
      for (const auto& p : l->params)
        if (bound.insert(p).second) added.push_back(p);
      Term body = walk(l->body, bound);
      for (const auto& p : added) bound.erase(p);
      return lam(l->params, body, l->origin);
    }
    auto kids = children(t);
    if (kids.empty()) return t;
    for (auto& k : kids) k = walk(k, bound);
    return with_children(t, kids);
  }

  const Program& p_;
  ResolveOptions opts_;
  const Definition* current_ = nullptr;
  std::map<std::string, int> external_;
};

}  // namespace

Program resolve(const Program& program, const ResolveOptions& opts) {
  return Resolver(program, opts).run();
}

Term as_lambda(const Definition& def, Flavor flavor) {
  if (flavor == Flavor::mfh) return curried_lam(def.params, def.body);
  return lam(def.params, def.body);
}

bool alpha_eq(const Program& a, const Program& b) {
  if (a.flavor != b.flavor || a.defs.size() != b.defs.size()) return false;
  for (std::size_t i = 0; i < a.defs.size(); ++i) {
    const auto& da = a.defs[i];
    const auto& db = b.defs[i];
    if (da.name != db.name || da.arity() != db.arity()) return false;
    if (!alpha_eq(lam(da.params, da.body), lam(db.params, db.body)))
      return false;
  }
  return true;
}

std::size_t count_funrefs(const Program& p, const FunKey& target) {
  std::size_t n = 0;
  for (const auto& d : p.defs) n += count_funrefs(d.body, target);
  return n;
}

}  // namespace refac
