#include "refac/migrate.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "refac/syntax.hpp"

namespace refac {

namespace {

void collect_refs(const Term& t, std::vector<FunKey>& out) {
  if (auto f = t.as<FunRef>()) out.push_back(f->key());
  for (const auto& k : children(t)) collect_refs(k, out);
}

bool clashes(Flavor flavor, const Definition& a, const Definition& b) {
  return flavor == Flavor::mfe ? a.key() == b.key() : a.name == b.name;
}

}  // namespace

AdapterModule parse_adapter_module(std::string_view text, Flavor flavor) {
  AdapterFile f = parse_adapter_file(text, flavor);
  AdapterModule m;
  m.new_defs = std::move(f.new_defs);
  std::set<FunKey> seen;
  for (auto& [key, adapter] : f.adapters) {
    if (!seen.insert(key).second)
      throw RefacError(ErrorKind::ConflictingAdapters, "two adapters for " + to_string(key));
    for (const auto& d : m.new_defs)
      if (flavor == Flavor::mfe ? d.key() == key : d.name == key.name)
        throw RefacError(ErrorKind::ConflictingAdapters,
                         to_string(key) + " is both adapted and newly defined");
    AdapterSpec s;
    s.target = key;
    s.adapter = adapter;
    s.remove_old = true;
    m.adapters.push_back(std::move(s));
  }
  return m;
}

AdapterModule load_adapter_module(const std::string& path, Flavor flavor) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RefacError(ErrorKind::UsageError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_adapter_module(ss.str(), flavor);
}

MigrationResult migrate(const Program& client, const AdapterModule& module,
                        const MigrateOptions& opts) {
  std::set<FunKey> covered;
  for (const auto& s : module.adapters)
    if (!covered.insert(s.target).second)
      throw RefacError(ErrorKind::ConflictingAdapters, "two adapters for " + to_string(s.target));

  MigrationResult res;
  Program q = client;
  for (const auto& nd : module.new_defs) {
    for (const auto& d : q.defs)
      if (clashes(q.flavor, d, nd))
        throw RefacError(ErrorKind::NameCollision,
                         to_string(nd.key()) + " collides with " + to_string(d.key()));
    q.defs.push_back(nd);
  }
  q = resolve(q, {true});

  ApplyOptions apply;
  apply.strategy = opts.strategy;
  apply.allow_external = true;
  apply.normalize = false;
  auto remaining = [&] {
    std::size_t n = 0;
    for (const auto& k : covered) n += count_funrefs(q, k);
    return n;
  };
  // Adapters may mention other old functions; a later round picks those up.
  for (std::size_t round = 0; round <= module.adapters.size(); ++round) {
    for (const auto& s : module.adapters) {
      RefactorReport r = apply_adapter(q, s, apply);
      res.report.sites[s.target] += r.sites_rewritten;
      q = std::move(r.output);
    }
    if (remaining() == 0) break;
  }

  Normalizer n(default_rules(), RuleContext{q.flavor, std::nullopt, &q}, opts.strategy, opts.trace);
  for (auto& d : q.defs) d.body = contract_expanded_refs(n.run(d.body, to_string(d.key())));
  res.report.rule_firings = n.firings();
  q = resolve(q, {true});

  std::set<std::string> old_names;
  for (const auto& k : covered) old_names.insert(k.name);
  for (const auto& d : q.defs) {
    std::vector<FunKey> refs;
    collect_refs(d.body, refs);
    for (const auto& k : refs)
      if (old_names.count(k.name)) res.report.residual.push_back({k.name, k.arity, to_string(d.key())});
  }
  res.output = std::move(q);
  return res;
}

std::string report_text(const MigrationReport& r) {
  std::ostringstream out;
  for (const auto& [k, n] : r.sites) out << "sites " << to_string(k) << ": " << n << "\n";
  out << "residual: " << r.residual.size() << "\n";
  for (const auto& x : r.residual) out << "  " << x.name << "/" << x.arity << " in " << x.location << "\n";
  for (const auto& [rule, n] : r.rule_firings) out << "firings " << to_string(rule) << ": " << n << "\n";
  return out.str();
}

std::string report_json(const MigrationReport& r) {
  nlohmann::ordered_json j;
  j["sites"] = nlohmann::ordered_json::object();
  for (const auto& [k, n] : r.sites) j["sites"][to_string(k)] = n;
  j["residual"] = nlohmann::ordered_json::array();
  for (const auto& x : r.residual)
    j["residual"].push_back({{"name", x.name}, {"arity", x.arity}, {"location", x.location}});
  j["rule_firings"] = nlohmann::ordered_json::object();
  for (const auto& [rule, n] : r.rule_firings) j["rule_firings"][std::string(to_string(rule))] = n;
  return j.dump(2);
}

}  // namespace refac
