#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

#include "refac/migrate.hpp"
#include "refac/schemes.hpp"
#include "refac/syntax.hpp"

namespace refac {

namespace {

enum Exit { kOk = 0, kCounterexample = 1, kUsage = 2, kTransform = 3 };

int exit_code(const RefacError& e) {
  switch (e.kind()) {
    case ErrorKind::SyntaxError:
    case ErrorKind::UnboundName:
    case ErrorKind::DuplicateDefinition:
    case ErrorKind::ShadowsIntrinsic:
    case ErrorKind::UsageError:
    case ErrorKind::BadAdapterFile:
    case ErrorKind::EntryMissing:
      return kUsage;
    default:
      return kTransform;
  }
}

struct Globals {
  std::string flavor;
  bool in_place = false;
  bool trace = false;
  bool no_check = false;
  std::string report;
  std::size_t samples = 100;
  std::size_t fuel = kDefaultFuel;
  std::uint64_t seed = 1;
  std::size_t rewrite_fuel = 10000;
  unsigned jobs = 1;
};

struct FileResult {
  std::string out, err;
  int code = kOk;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RefacError(ErrorKind::UsageError, "cannot write " + path);
  out << text;
}

Flavor flavor_of(const Globals& g, const std::string& path) {
  return g.flavor.empty() ? flavor_from_path(path) : parse_flavor(g.flavor);
}

SourceFile read(const Globals& g, const std::string& path) {
  Flavor flavor = flavor_of(g, path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RefacError(ErrorKind::UsageError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return {path, flavor, ss.str()};
}

Program load(const Globals& g, const std::string& path, bool allow_external = false) {
  return parse(read(g, path), {allow_external});
}

TraceSink trace_to(const Globals& g, Flavor flavor, std::ostream& err) {
  if (!g.trace) return {};
  return [flavor, &err](const Firing& f) {
    err << to_string(f.rule) << " @ " << f.path << " : " << print(f.before, flavor) << " ==> "
        << print(f.after, flavor) << "\n";
  };
}

std::string refactor_report(const RefactorReport& r, const std::string& path, const std::string& fmt) {
  if (fmt == "json") {
    nlohmann::ordered_json j;
    j["file"] = path;
    j["sites_rewritten"] = r.sites_rewritten;
    j["rule_firings"] = nlohmann::ordered_json::object();
    for (const auto& [rule, n] : r.rule_firings) j["rule_firings"][std::string(to_string(rule))] = n;
    j["obligation"] = std::string(to_string(r.obligation));
    j["equiv"] = r.equiv ? nlohmann::ordered_json::parse(report_json(*r.equiv)) : nlohmann::ordered_json();
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "file: " << path << "\n"
     << "sites_rewritten: " << r.sites_rewritten << "\n";
  for (const auto& [rule, n] : r.rule_firings) os << "firings " << to_string(rule) << ": " << n << "\n";
  os << "obligation: " << to_string(r.obligation) << "\n";
  if (r.equiv) os << report_text(*r.equiv);
  return os.str();
}

// Runs `one` over every file, `jobs` at a time, and replays the buffered
// output in file order.
int for_files(const Globals& g, const std::vector<std::string>& files,
              const std::function<void(const std::string&, FileResult&)>& one, std::ostream& out,
              std::ostream& err) {
  std::vector<FileResult> results(files.size());
  auto guarded = [&](std::size_t i) {
    FileResult& r = results[i];
    try {
      one(files[i], r);
    } catch (const RefacError& e) {
      r.err += std::string(e.what()) + "\n";
      r.code = exit_code(e);
    } catch (const std::exception& e) {
      r.err += std::string("InternalError: ") + e.what() + "\n";
      r.code = kTransform;
    }
  };
  unsigned jobs = std::max(1u, std::min<unsigned>(g.jobs, static_cast<unsigned>(files.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < files.size(); ++i) guarded(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < files.size();) guarded(i);
      });
    for (auto& t : pool) t.join();
  }
  int code = kOk;
  for (const auto& r : results) {
    out << r.out;
    err << r.err;
    code = std::max(code, r.code);
  }
  return code;
}

using SpecFn = std::function<AdapterSpec(const Program&)>;

int run_refactor(const Globals& g, const std::vector<std::string>& files, const SpecFn& make,
                 std::ostream& out, std::ostream& err) {
  return for_files(
      g, files,
      [&](const std::string& path, FileResult& res) {
        std::ostringstream diag;
        Program p = load(g, path);
        RefactorOptions opts;
        opts.check = !g.no_check;
        opts.equiv = {g.samples, g.fuel, g.seed};
        opts.apply.strategy.fuel = g.rewrite_fuel;
        opts.apply.trace = trace_to(g, p.flavor, diag);
        RefactorReport r;
        try {
          r = refactor(p, make(p), opts);
        } catch (...) {
          res.err += diag.str();
          throw;
        }
        res.err += diag.str();
        if (!g.report.empty()) res.err += refactor_report(r, path, g.report);
        if (r.obligation == ObligationStatus::checked_failed) {
          res.err += "ObligationFailed: " + path + ": adapter disagrees with the original on " +
                     std::to_string(r.equiv->disagreements.size()) + " of " +
                     std::to_string(r.equiv->samples) + " samples\n";
          res.code = kCounterexample;
          return;
        }
        if (r.obligation == ObligationStatus::checked_ok && r.equiv &&
            r.equiv->verdict == Verdict::inconclusive)
          res.err += "warning: " + path + ": obligation inconclusive (all samples timed out)\n";
        if (g.no_check) res.err += "warning: " + path + ": obligation not checked\n";
        std::string text = print(r.output);
        if (g.in_place)
          write_file(path, text);
        else
          res.out += text;
      },
      out, err);
}

FunKey key_arg(const std::string& s) { return parse_funkey(s); }

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Refactoring by substitution and rewriting", "refac"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--flavor", g.flavor, "Source flavor (overrides the file extension)")
      ->check(CLI::IsMember({"mfe", "mfh"}));
  app.add_flag("--in-place", g.in_place, "Rewrite FILEs instead of printing to stdout");
  app.add_flag("--trace", g.trace, "Print every rule firing to stderr");
  app.add_flag("--no-check", g.no_check, "Skip the adapter proof obligation");
  app.add_option("--report", g.report, "Emit a report (json|text)")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--samples", g.samples, "Random samples per equivalence check");
  app.add_option("--fuel", g.fuel, "Interpreter fuel per evaluation");
  app.add_option("--seed", g.seed, "Seed for input generation");
  app.add_option("--rewrite-fuel", g.rewrite_fuel, "Maximum rule firings per file");
  app.add_option("--jobs", g.jobs, "Files processed in parallel")->check(CLI::PositiveNumber);

  std::vector<std::string> files;
  std::string target, to, param, extract, perm, deflt, adapter_file, module_file;
  std::string old_file, new_file, entry, shapes;
  int pos = 0;

  auto with_files = [&](CLI::App* sub) {
    sub->add_option("FILE", files, "Source files")->required()->check(CLI::ExistingFile);
    return sub;
  };
  auto with_target = [&](CLI::App* sub) {
    sub->add_option("--target", target, "Function NAME/ARITY")->required();
    return with_files(sub);
  };

  auto* rename = with_target(app.add_subcommand("rename", "Rename a function"));
  rename->add_option("--to", to, "New name")->required();
  auto* generalise = with_target(app.add_subcommand("generalise", "Abstract a subexpression into a parameter"));
  generalise->add_option("--param", param, "New parameter name")->required();
  generalise->add_option("--extract", extract, "Closed expression to abstract")->required();
  auto* reorder = with_target(app.add_subcommand("reorder", "Permute parameters"));
  reorder->add_option("--perm", perm, "1-based permutation, e.g. 2,1")->required();
  auto* add_arg = with_target(app.add_subcommand("add-arg", "Add a parameter with a default"));
  add_arg->add_option("--default", deflt, "Closed default expression")->required();
  add_arg->add_option("--pos", pos, "1-based position")->required();
  auto* remove_arg = with_target(app.add_subcommand("remove-arg", "Remove an unused parameter"));
  remove_arg->add_option("--pos", pos, "1-based position")->required();
  auto* unfold = with_target(app.add_subcommand("unfold", "Inline a function at every use"));
  auto* custom = with_files(app.add_subcommand("custom", "Apply an adapter file"));
  custom->add_option("--adapter", adapter_file, "Adapter file")->required()->check(CLI::ExistingFile);
  auto* migrate_cmd = with_files(app.add_subcommand("migrate", "Inline an adapter module into clients"));
  migrate_cmd->add_option("--adapters", module_file, "Adapter module file")->required()->check(CLI::ExistingFile);
  auto* check = app.add_subcommand("check", "Compare two programs on random inputs");
  check->add_option("--old", old_file, "Original program")->required()->check(CLI::ExistingFile);
  check->add_option("--new", new_file, "Refactored program")->required()->check(CLI::ExistingFile);
  check->add_option("--entry", entry, "Entry point NAME/ARITY")->required();
  check->add_option("--shapes", shapes, "Comma-separated shapes: int, list_int, fun_int_int");

  std::vector<std::string> argv_store{"refac"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "UsageError: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (rename->parsed())
      return run_refactor(g, files, [&](const Program& p) { return scheme_rename(p, key_arg(target), to); },
                          out, err);
    if (generalise->parsed())
      return run_refactor(
          g, files,
          [&](const Program& p) {
            Term e = parse_expr(extract, p.flavor);
            return scheme_generalise(p, key_arg(target), param, e);
          },
          out, err);
    if (reorder->parsed()) {
      std::vector<int> ps;
      for (const auto& s : split(perm, ',')) {
        try {
          std::size_t used = 0;
          ps.push_back(std::stoi(s, &used));
          if (used != s.size()) throw std::invalid_argument(s);
        } catch (const std::exception&) {
          throw RefacError(ErrorKind::UsageError, "bad --perm " + perm);
        }
      }
      return run_refactor(g, files, [&](const Program& p) { return scheme_reorder(p, key_arg(target), ps); },
                          out, err);
    }
    if (add_arg->parsed())
      return run_refactor(
          g, files,
          [&](const Program& p) {
            return scheme_add_arg(p, key_arg(target), parse_expr(deflt, p.flavor), pos);
          },
          out, err);
    if (remove_arg->parsed())
      return run_refactor(g, files, [&](const Program& p) { return scheme_remove_arg(p, key_arg(target), pos); },
                          out, err);
    if (unfold->parsed())
      return run_refactor(g, files, [&](const Program& p) { return scheme_unfold(p, key_arg(target)); }, out,
                          err);
    if (custom->parsed())
      return run_refactor(
          g, files, [&](const Program& p) { return load_adapter_file(adapter_file, p.flavor); }, out, err);

    if (migrate_cmd->parsed())
      return for_files(
          g, files,
          [&](const std::string& path, FileResult& res) {
            Program client = load(g, path, true);
            AdapterModule m = load_adapter_module(module_file, client.flavor);
            std::ostringstream diag;
            MigrateOptions opts;
            opts.strategy.fuel = g.rewrite_fuel;
            opts.trace = trace_to(g, client.flavor, diag);
            MigrationResult r;
            try {
              r = migrate(client, m, opts);
            } catch (...) {
              res.err += diag.str();
              throw;
            }
            res.err += diag.str();
            if (g.report == "json")
              res.err += report_json(r.report) + "\n";
            else if (g.report == "text")
              res.err += report_text(r.report);
            for (const auto& x : r.report.residual)
              res.err += "warning: " + path + ": unmigrated " + x.name + "/" + std::to_string(x.arity) +
                         " in " + x.location + "\n";
            std::string text = print(r.output);
            if (g.in_place)
              write_file(path, text);
            else
              res.out += text;
          },
          out, err);

    // check
    Program old_p = load(g, old_file);
    SourceFile nsrc = read(g, new_file);
    if (nsrc.flavor != old_p.flavor)
      throw RefacError(ErrorKind::UsageError, "--old and --new have different flavors");
    Program new_p = parse(nsrc);
    FunKey k = key_arg(entry);
    if (!old_p.lookup(k)) throw RefacError(ErrorKind::EntryMissing, to_string(k) + " in " + old_file);
    std::vector<Shape> sh;
    if (shapes.empty()) {
      sh = infer_shapes(old_p, k);
    } else {
      for (const auto& s : split(shapes, ',')) {
        try {
          sh.push_back(parse_shape(s));
        } catch (const std::exception&) {
          throw RefacError(ErrorKind::UsageError, "unknown shape " + s);
        }
      }
    }
    if (sh.size() != static_cast<std::size_t>(k.arity))
      throw RefacError(ErrorKind::UsageError, "--shapes lists " + std::to_string(sh.size()) +
                                                  " shapes for " + to_string(k));
    EquivReport r = check_equiv(old_p, new_p, k, sh, {g.samples, g.fuel, g.seed});
    out << (g.report == "json" ? report_json(r) + "\n" : report_text(r));
    return r.verdict == Verdict::counterexample_found ? kCounterexample : kOk;
  } catch (const RefacError& e) {
    err << e.what() << "\n";
    return exit_code(e);
  }
}

}  // namespace refac
