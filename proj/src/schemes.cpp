#include "refac/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "parser.hpp"
#include "refac/syntax.hpp"

namespace refac {

namespace {

int remaining_arity(const Term& t) {
  if (auto l = t.as<Lam>())
    return static_cast<int>(l->params.size()) + remaining_arity(l->body);
  if (auto f = t.as<FunRef>()) return f->arity;
  if (auto a = t.as<App>())
    return std::max(0, remaining_arity(a->head) - static_cast<int>(a->args.size()));
  return 0;
}

const Definition& target_def(const Program& p, const FunKey& target) {
  auto d = p.lookup(target);
  if (!d) throw RefacError(ErrorKind::TargetUndefined, to_string(target));
  return *d;
}

std::vector<Term> vars_of(const std::vector<std::string>& names) {
  std::vector<Term> out;
  for (const auto& n : names) out.push_back(var(n));
  return out;
}

Term call(Flavor flavor, const Term& head, const std::vector<Term>& args) {
  return flavor == Flavor::mfe ? app(head, args) : curried_app(head, args);
}

Term lambda(Flavor flavor, const std::vector<std::string>& params, const Term& body) {
  return flavor == Flavor::mfe ? lam(params, body) : curried_lam(params, body);
}

bool is_var_name(Flavor flavor, const std::string& s) {
  if (s.empty()) return false;
  auto c0 = static_cast<unsigned char>(s[0]);
  if (flavor == Flavor::mfe ? !(std::isupper(c0) || c0 == '_')
                            : !(std::islower(c0) || c0 == '_'))
    return false;
  return std::all_of(s.begin(), s.end(), [&](char ch) {
    auto c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || c == '_' || (flavor == Flavor::mfh && c == '\'');
  });
}

bool is_fun_name(Flavor flavor, const std::string& s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return flavor == Flavor::mfh ? is_var_name(flavor, s)
                               : std::all_of(s.begin(), s.end(), [](char ch) {
                                   auto c = static_cast<unsigned char>(ch);
                                   return std::isalnum(c) || c == '_';
                                 });
}

// Is (name, arity) already taken by a definition other than `except`?
void check_free_slot(const Program& p, const std::string& name, int arity,
                     const FunKey& except) {
  if (find_intrinsic(p.flavor, name))
    throw RefacError(ErrorKind::NameCollision, name + " is an intrinsic");
  for (const auto& d : p.defs) {
    if (d.key() == except) continue;
    bool clash = p.flavor == Flavor::mfe ? d.key() == FunKey{name, arity}
                                         : d.name == name;
    if (clash) throw RefacError(ErrorKind::NameCollision, to_string(d.key()) + " already defined");
  }
}

NameSet program_names(const Program& p) {
  NameSet out;
  for (const auto& d : p.defs) out.insert(d.name);
  for (const auto& i : intrinsics(p.flavor)) out.insert(i.name);
  return out;
}

// Step (1): drop or keep the target, put the new definitions in its place.
Program install(const Program& p, const AdapterSpec& spec, bool delegate) {
  Program q{p.flavor, {}};
  std::vector<std::size_t> fresh;
  bool placed = false;
  auto emit = [&] {
    for (const auto& nd : spec.new_defs) {
      fresh.push_back(q.defs.size());
      q.defs.push_back(nd);
    }
    placed = true;
  };
  for (const auto& d : p.defs) {
    if (d.key() != spec.target) {
      q.defs.push_back(d);
      continue;
    }
    if (!spec.remove_old) {
      Definition kept = d;
      if (delegate) kept.body = call(p.flavor, spec.adapter, vars_of(d.params));
      q.defs.push_back(kept);
    }
    emit();
  }
  if (!placed) emit();
  for (std::size_t i : fresh) {
    const auto& nd = q.defs[i];
    for (std::size_t j = 0; j < q.defs.size(); ++j) {
      if (std::find(fresh.begin(), fresh.end(), j) != fresh.end()) continue;
      const auto& d = q.defs[j];
      bool clash = p.flavor == Flavor::mfe ? d.key() == nd.key() : d.name == nd.name;
      if (clash)
        throw RefacError(ErrorKind::NameCollision,
                         to_string(nd.key()) + " collides with " + to_string(d.key()));
    }
  }
  return q;
}

}  // namespace

int adapter_arity(const Term& adapter, Flavor flavor) {
  if (flavor == Flavor::mfe) {
    if (auto l = adapter.as<Lam>()) return static_cast<int>(l->params.size());
    if (auto f = adapter.as<FunRef>()) return f->arity;
    return -1;
  }
  return remaining_arity(adapter);
}

std::string_view to_string(ObligationStatus s) {
  switch (s) {
    case ObligationStatus::checked_ok: return "checked_ok";
    case ObligationStatus::checked_failed: return "checked_failed";
    case ObligationStatus::skipped: return "skipped";
  }
  return "?";
}

Term resolve_term(const Program& p, const Term& t, ErrorKind not_closed) {
  for (const auto& v : free_vars(t)) {
    bool known = p.flavor == Flavor::mfh &&
                 (p.find_name(v) || find_intrinsic(p.flavor, v));
    if (!known)
      throw RefacError(not_closed, "'" + print(t, p.flavor) + "' mentions " + v);
  }
  Program q = p;
  q.defs.push_back({"__expr", {}, t});
  try {
    return resolve(q).defs.back().body;
  } catch (const RefacError& e) {
    if (e.kind() == ErrorKind::UnboundName) throw RefacError(not_closed, e.detail());
    throw;
  }
}

AdapterSpec resolve_spec(const Program& p, const AdapterSpec& spec,
                         bool allow_external) {
  if (!allow_external) target_def(p, spec.target);
  if (p.flavor == Flavor::mfe && !free_vars(spec.adapter).empty())
    throw RefacError(ErrorKind::AdapterNotClosed,
                     to_string(spec.target) + " := " + print(spec.adapter, p.flavor));

  // Other definitions still call the target until substitution, so it stays
  // in scope unless a new definition takes its place.
  AdapterSpec scoped = spec;
  scoped.remove_old = std::any_of(spec.new_defs.begin(), spec.new_defs.end(), [&](const Definition& nd) {
    return p.flavor == Flavor::mfe ? nd.key() == spec.target : nd.name == spec.target.name;
  });
  Program ctx = install(p, scoped, false);
  ResolveOptions opts{allow_external};
  Program resolved = resolve(ctx, opts);
  ctx.defs.push_back({"__adapter", {}, spec.adapter});
  Term adapter;
  try {
    adapter = resolve(ctx, opts).defs.back().body;
  } catch (const RefacError& e) {
    if (e.kind() != ErrorKind::UnboundName) throw;
    throw RefacError(ErrorKind::AdapterNotClosed, to_string(spec.target) + ": " + e.detail());
  }
  if (!free_vars(adapter).empty())
    throw RefacError(ErrorKind::AdapterNotClosed,
                     to_string(spec.target) + " := " + print(adapter, p.flavor));

  int n = spec.target.arity;
  bool ok = p.flavor == Flavor::mfe
                ? adapter_arity(adapter, p.flavor) == n
                : n <= adapter_arity(adapter, p.flavor);
  if (!ok)
    throw RefacError(ErrorKind::ArityMismatch,
                     "adapter for " + to_string(spec.target) + " takes " +
                         std::to_string(adapter_arity(adapter, p.flavor)) + " arguments");

  AdapterSpec out = spec;
  out.adapter = adapter;
  out.new_defs.clear();
  for (const auto& nd : spec.new_defs)
    for (const auto& d : resolved.defs)
      if (d.key() == nd.key()) {
        out.new_defs.push_back(d);
        break;
      }
  return out;
}

RefactorReport apply_adapter(const Program& p, const AdapterSpec& spec0,
                             const ApplyOptions& opts) {
  AdapterSpec spec = resolve_spec(p, spec0, opts.allow_external);
  Program q = install(p, spec, true);

  RuleContext ctx{p.flavor, spec.target, &q};
  q = atom_lift(q, spec.target, ctx);
  q = eta_expand_refs(q, spec.target, ctx);

  RefactorReport r;
  r.sites_rewritten = count_funrefs(q, spec.target);

  bool fast = opts.fast_path && spec.rename_to;
  Term replacement = fast ? funref(*spec.rename_to, spec.target.arity) : spec.adapter;
  for (auto& d : q.defs) d.body = substitute_funref(d.body, spec.target, replacement);

  if (opts.normalize && !fast) {
    Normalizer n(default_rules(), {p.flavor, std::nullopt, &q}, opts.strategy, opts.trace);
    for (auto& d : q.defs) d.body = n.run(d.body, to_string(d.key()));
    r.rule_firings = n.firings();
  }
  for (auto& d : q.defs) d.body = contract_expanded_refs(d.body);

  r.output = resolve(q, {opts.allow_external});
  return r;
}

RefactorReport refactor(const Program& p, const AdapterSpec& spec0,
                        const RefactorOptions& opts) {
  AdapterSpec spec = resolve_spec(p, spec0, opts.apply.allow_external);
  std::optional<EquivReport> equiv;
  if (opts.check && p.lookup(spec.target)) {
    equiv = check_obligation(p, spec, opts.equiv);
    if (equiv->verdict == Verdict::counterexample_found) {
      RefactorReport r;
      r.obligation = ObligationStatus::checked_failed;
      r.equiv = std::move(equiv);
      r.output = p;
      return r;
    }
  }
  RefactorReport r = apply_adapter(p, spec, opts.apply);
  if (equiv) {
    r.obligation = ObligationStatus::checked_ok;
    r.equiv = std::move(equiv);
  }
  return r;
}

AdapterSpec scheme_rename(const Program& p, const FunKey& target,
                          const std::string& new_name) {
  const Definition& d = target_def(p, target);
  if (new_name == target.name)
    throw RefacError(ErrorKind::NameCollision, "new name equals " + to_string(target));
  if (!is_fun_name(p.flavor, new_name))
    throw RefacError(ErrorKind::UsageError, "'" + new_name + "' is not a function name");
  check_free_slot(p, new_name, target.arity, target);

  AdapterSpec s;
  s.target = target;
  Definition nd = d;
  nd.name = new_name;
  s.new_defs.push_back(nd);
  NameSet avoid{new_name};
  std::vector<std::string> xs;
  for (int i = 0; i < target.arity; ++i) {
    xs.push_back(fresh_name(p.flavor == Flavor::mfe ? "X" : "x", avoid));
    avoid.insert(xs.back());
  }
  Term h = funref(new_name, target.arity);
  s.adapter = p.flavor == Flavor::mfh && xs.empty()
                  ? h
                  : lambda(p.flavor, xs, call(p.flavor, h, vars_of(xs)));
  s.rename_to = new_name;
  return s;
}

namespace {

Term abstract_occurrences(const Term& t, const Term& extract, const Term& v,
                          std::size_t& count) {
  if (alpha_eq(t, extract)) {
    ++count;
    return v;
  }
  auto kids = children(t);
  if (kids.empty()) return t;
  for (auto& k : kids) k = abstract_occurrences(k, extract, v, count);
  return with_children(t, kids);
}

Term adapter_for(Flavor flavor, const Definition& d, const Term& body) {
  if (flavor == Flavor::mfh && d.params.empty()) return body;
  return lambda(flavor, d.params, body);
}

}  // namespace

AdapterSpec scheme_generalise(const Program& p, const FunKey& target,
                              const std::string& new_param,
                              const Term& extract0) {
  const Definition& d = target_def(p, target);
  Term extract = resolve_term(p, extract0, ErrorKind::ExtractNotClosed);
  if (!is_var_name(p.flavor, new_param))
    throw RefacError(ErrorKind::UsageError, "'" + new_param + "' is not a parameter name");
  NameSet used = all_names(d.body);
  used.insert(d.params.begin(), d.params.end());
  if (used.count(new_param))
    throw RefacError(ErrorKind::NameCollision, new_param + " already used in " + to_string(target));
  check_free_slot(p, target.name, target.arity + 1, target);

  std::size_t count = 0;
  Term body = abstract_occurrences(d.body, extract, var(new_param), count);
  if (count == 0)
    throw RefacError(ErrorKind::ExtractNotFound,
                     print(extract, p.flavor) + " in " + to_string(target));

  AdapterSpec s;
  s.target = target;
  Definition nd = d;
  nd.params.push_back(new_param);
  nd.body = body;
  s.new_defs.push_back(nd);
  auto args = vars_of(d.params);
  args.push_back(extract);
  s.adapter = adapter_for(p.flavor, d, call(p.flavor, funref(target.name, target.arity + 1), args));
  return s;
}

AdapterSpec scheme_reorder(const Program& p, const FunKey& target,
                           const std::vector<int>& perm) {
  const Definition& d = target_def(p, target);
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  bool valid = static_cast<int>(perm.size()) == target.arity;
  for (int i = 0; valid && i < target.arity; ++i) valid = sorted[i] == i + 1;
  if (!valid) throw RefacError(ErrorKind::BadPermutation, "not a permutation of 1.." + std::to_string(target.arity));

  AdapterSpec s;
  s.target = target;
  Definition nd = d;
  std::vector<Term> args;
  for (int i = 0; i < target.arity; ++i) {
    nd.params[i] = d.params[perm[i] - 1];
    args.push_back(var(d.params[perm[i] - 1]));
  }
  s.new_defs.push_back(nd);
  s.adapter = adapter_for(p.flavor, d, call(p.flavor, funref(target), args));
  return s;
}

AdapterSpec scheme_add_arg(const Program& p, const FunKey& target,
                           const Term& default0, int position) {
  const Definition& d = target_def(p, target);
  if (position < 1 || position > target.arity + 1)
    throw RefacError(ErrorKind::PositionOutOfRange,
                     std::to_string(position) + " not in 1.." + std::to_string(target.arity + 1));
  Term dflt = resolve_term(p, default0, ErrorKind::DefaultNotClosed);
  check_free_slot(p, target.name, target.arity + 1, target);

  NameSet avoid = all_names(d.body);
  avoid.insert(d.params.begin(), d.params.end());
  for (const auto& n : program_names(p)) avoid.insert(n);
  std::string extra = fresh_name(p.flavor == Flavor::mfe ? "X" : "x", avoid);

  AdapterSpec s;
  s.target = target;
  Definition nd = d;
  nd.params.insert(nd.params.begin() + (position - 1), extra);
  s.new_defs.push_back(nd);
  auto args = vars_of(d.params);
  args.insert(args.begin() + (position - 1), dflt);
  s.adapter = adapter_for(p.flavor, d, call(p.flavor, funref(target.name, target.arity + 1), args));
  return s;
}

AdapterSpec scheme_remove_arg(const Program& p, const FunKey& target, int position) {
  const Definition& d = target_def(p, target);
  if (position < 1 || position > target.arity)
    throw RefacError(ErrorKind::PositionOutOfRange,
                     std::to_string(position) + " not in 1.." + std::to_string(target.arity));
  const std::string& gone = d.params[position - 1];
  if (free_vars(d.body).count(gone))
    throw RefacError(ErrorKind::ParamStillUsed, gone + " in " + to_string(target));
  check_free_slot(p, target.name, target.arity - 1, target);

  AdapterSpec s;
  s.target = target;
  Definition nd = d;
  nd.params.erase(nd.params.begin() + (position - 1));
  s.new_defs.push_back(nd);
  auto args = vars_of(nd.params);
  s.adapter = adapter_for(p.flavor, d, call(p.flavor, funref(target.name, target.arity - 1), args));
  return s;
}

AdapterSpec scheme_unfold(const Program& p, const FunKey& target) {
  const Definition& d = target_def(p, target);
  if (count_funrefs(d.body, target) > 0)
    throw RefacError(ErrorKind::RecursiveUnfold, to_string(target));
  AdapterSpec s;
  s.target = target;
  s.adapter = adapter_for(p.flavor, d, d.body);
  return s;
}

FunKey parse_funkey(std::string_view s) {
  auto slash = s.rfind('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == s.size())
    throw RefacError(ErrorKind::UsageError, "expected NAME/ARITY, got '" + std::string(s) + "'");
  FunKey k{std::string(s.substr(0, slash)), 0};
  for (char c : s.substr(slash + 1)) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw RefacError(ErrorKind::UsageError, "bad arity in '" + std::string(s) + "'");
    k.arity = k.arity * 10 + (c - '0');
    if (k.arity > 1000)
      throw RefacError(ErrorKind::UsageError, "arity too large in '" + std::string(s) + "'");
  }
  return k;
}

AdapterFile parse_adapter_file(std::string_view text, Flavor flavor) {
  enum class Section { none, fresh, adapter };
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    lines.push_back(cur);
  }
  // Each section is parsed from a copy of the file with every other line
  // blanked, so positions in diagnostics match the file.
  std::string new_text, adapter_text;
  AdapterFile out;
  Section sec = Section::none;
  bool saw_adapter = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    auto first = line.find_first_not_of(" \t\r");
    std::string trimmed = first == std::string::npos ? "" : line.substr(first);
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
      trimmed.pop_back();
    std::string n_line, a_line;
    if (trimmed.rfind("%%", 0) == 0) {
      std::string marker = trimmed.substr(2);
      marker.erase(0, marker.find_first_not_of(" \t"));
      if (marker == "new") {
        sec = Section::fresh;
      } else if (marker == "adapter") {
        sec = Section::adapter;
        saw_adapter = true;
      } else if (marker == "remove-old") {
        out.remove_old = true;
      } else {
        throw RefacError(ErrorKind::BadAdapterFile,
                         "line " + std::to_string(i + 1) + ": unknown section '" + trimmed + "'");
      }
    } else if (sec == Section::fresh) {
      n_line = line;
    } else if (sec == Section::adapter) {
      a_line = line;
    } else if (!trimmed.empty() && trimmed[0] != '#' && trimmed[0] != '%') {
      throw RefacError(ErrorKind::BadAdapterFile,
                       "line " + std::to_string(i + 1) + ": text outside any section");
    }
    new_text += n_line + "\n";
    adapter_text += a_line + "\n";
  }
  if (!saw_adapter) throw RefacError(ErrorKind::BadAdapterFile, "no '%% adapter' section");

  detail::Parser defs(new_text, flavor);
  while (!defs.at_end()) out.new_defs.push_back(defs.definition());
  detail::Parser entries(adapter_text, flavor);
  while (!entries.at_end()) out.adapters.push_back(entries.adapter_entry());
  if (out.adapters.empty()) throw RefacError(ErrorKind::BadAdapterFile, "empty '%% adapter' section");
  return out;
}

AdapterSpec load_adapter_file(const std::string& path, Flavor flavor) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RefacError(ErrorKind::UsageError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  AdapterFile f = parse_adapter_file(ss.str(), flavor);
  if (f.adapters.size() != 1)
    throw RefacError(ErrorKind::BadAdapterFile,
                     path + ": expected exactly one adapter, found " + std::to_string(f.adapters.size()));
  AdapterSpec s;
  s.target = f.adapters[0].first;
  s.adapter = f.adapters[0].second;
  s.new_defs = std::move(f.new_defs);
  s.remove_old = f.remove_old;
  return s;
}

}  // namespace refac
