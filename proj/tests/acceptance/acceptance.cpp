// One PASS/FAIL line per acceptance criterion.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "corpus.hpp"
#include "gen.hpp"
#include "nameless.hpp"
#include "refac/migrate.hpp"
#include "refac/syntax.hpp"

namespace fs = std::filesystem;
using namespace refac;
using namespace refac::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string squash(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

struct BinRun {
  int code = -1;
  std::string out, err;
  double secs = 0;
};

BinRun refac_bin(const std::string& args) {
  static int n = 0;
  fs::path dir = fs::temp_directory_path();
  std::string tag = std::to_string(::getpid()) + "_" + std::to_string(n++);
  fs::path o = dir / ("acc_out_" + tag), e = dir / ("acc_err_" + tag);
  auto t0 = Clock::now();
  int status = std::system((std::string(REFAC_BIN) + " " + args + " > " + o.string() + " 2> " + e.string()).c_str());
  BinRun r;
  r.secs = seconds_since(t0);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(o.string());
  r.err = slurp(e.string());
  fs::remove(o);
  fs::remove(e);
  return r;
}

std::string line_of(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (l.rfind(prefix, 0) == 0) return l;
  return "";
}

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << detail << std::endl;
}

void guarded(int n, const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(n, false, std::string("exception: ") + e.what());
  }
}

// Entry points of `p` untouched by `spec`.
std::vector<FunKey> shared_entries(const Program& p, const AdapterSpec& spec, const Program& out) {
  std::vector<FunKey> ks;
  for (const auto& k : entry_points(p)) {
    if (k == spec.target || !out.lookup(k)) continue;
    bool fresh = false;
    for (const auto& nd : spec.new_defs) fresh |= nd.key() == k;
    if (!fresh) ks.push_back(k);
  }
  return ks;
}

struct Sabotage {
  std::string label;
  Program program;
  AdapterSpec spec;
  std::vector<Value> witness;  // an input on which old and adapter differ
};

// Oracle: evaluate the old target and the adapter applied to the same
// arguments, each in its own program.
bool differs(const Sabotage& s) {
  const Program& p = s.program;
  Outcome old = interpret(p, s.spec.target, s.witness);
  Program q;
  q.flavor = p.flavor;
  for (const auto& d : p.defs)
    if (d.key() != s.spec.target) q.defs.push_back(d);
  for (const auto& nd : s.spec.new_defs) {
    std::erase_if(q.defs, [&](const Definition& d) { return d.name == nd.name && d.arity() == nd.arity(); });
    q.defs.push_back(nd);
  }
  Outcome fn = interpret_term(q, s.spec.adapter);
  if (fn.kind != Outcome::Kind::ok) return true;
  Outcome now = apply_value(q, fn.value, s.witness);
  return !outcomes_agree(p, old, q, now);
}

}  // namespace

int main() {
  const std::string c_rename = corpus_path("mfe/01_rename_before.mfe");
  const std::string c_gen = corpus_path("mfe/02_generalise_before.mfe");
  const std::string c_reorder = corpus_path("mfh/01_reorder.mfh");
  const std::string c_infix = corpus_path("mfh/02_infix.mfh");

  guarded(1, [&] {
    BinRun r = refac_bin("rename --target f/1 --to h " + c_rename);
    bool ok = r.code == 0 && squash(r.out) == squash("h(X) -> X+1.\ng(Y) -> h(Y+2) - h(Y-2).") && r.secs < 1.0;
    report(1, ok, "MFE rename golden, exit " + std::to_string(r.code) + ", " + std::to_string(r.secs) + " s");
  });

  guarded(2, [&] {
    BinRun r = refac_bin("generalise --target f/1 --param Y --extract 3 " + c_gen);
    bool ok = r.code == 0 && squash(line_of(r.out, "f(")) == squash("f(X,Y) -> X+Y.") &&
              squash(line_of(r.out, "g(")) == squash("g(Xs) -> lists:map(fun(X) -> f(X,3) end, Xs).") &&
              r.secs < 1.0;
    report(2, ok, "MFE generalise golden, exit " + std::to_string(r.code) + ", " + std::to_string(r.secs) + " s");
  });

  guarded(3, [&] {
    BinRun r = refac_bin("reorder --target f/2 --perm 2,1 " + c_reorder);
    bool ok = r.code == 0 && line_of(r.out, "g ") == "g z xs = map (\\y -> f y z) xs" && r.secs < 1.0;
    report(3, ok, "MFH reorder golden: " + line_of(r.out, "g "));
  });

  guarded(4, [&] {
    BinRun r = refac_bin("--trace rename --target f/2 --to h " + c_reorder);
    bool beta = r.err.find("\nBETA @ ") != std::string::npos || r.err.rfind("BETA @ ", 0) == 0;
    bool eta = r.err.find("ETA_REDUCE @ ") != std::string::npos;
    bool ok = r.code == 0 && line_of(r.out, "g ") == "g z xs = map (h z) xs" && beta && eta;
    report(4, ok, "MFH rename with eta: " + line_of(r.out, "g ") + (beta ? ", BETA" : "") + (eta ? ", ETA_REDUCE" : ""));
  });

  guarded(5, [&] {
    BinRun r = refac_bin("rename --target f/2 --to h " + c_infix);
    bool ok = r.code == 0 && line_of(r.out, "g ") == "g z xs = map (z `h`) xs";
    report(5, ok, "infix round trip: " + line_of(r.out, "g "));
  });

  guarded(6, [&] {
    std::size_t instances = 0, passed = 0;
    for (Flavor fl : {Flavor::mfe, Flavor::mfh})
      for (const auto& path : corpus_files(fl)) {
        Program p = load_program(path);
        for (const auto& inst : builtin_instances(p)) {
          ++instances;
          EquivReport r = check_obligation(p, resolve_spec(p, inst.spec));
          passed += r.verdict == Verdict::equivalent_on_samples && r.samples == 100 && r.disagreements.empty();
        }
      }
    std::vector<Sabotage> sabs;
    auto spec = [](const Program& p, FunKey k, std::vector<const char*> defs, const char* adapter) {
      AdapterSpec s;
      s.target = k;
      for (auto d : defs) s.new_defs.push_back(parse(d, p.flavor, {true}).defs[0]);
      s.adapter = parse_expr(adapter, p.flavor);
      return resolve_spec(p, s);
    };
    {
      Program p = load_program(c_rename);
      sabs.push_back({"rename off by one", p, spec(p, {"f", 1}, {"h(X) -> X+1."}, "fun(X) -> h(X) + 1 end"),
                      {int_value(0)}});
    }
    {
      Program p = load_program(c_gen);
      sabs.push_back({"generalise with 4", p, spec(p, {"f", 1}, {"f(X,Y) -> X+Y."}, "fun(X) -> f(X, 4) end"),
                      {int_value(0)}});
    }
    {
      Program p = load_program(corpus_path("mfe/03_reorder.mfe"));
      sabs.push_back({"reorder without swap", p, spec(p, {"k", 2}, {"k(B,A) -> A-B."}, "fun(A, B) -> k(A, B) end"),
                      {int_value(10), int_value(4)}});
    }
    {
      Program p = parse("f x y = x - y\ng z xs = map (f z) xs", Flavor::mfh);
      sabs.push_back({"MFH flip without flipping", p, spec(p, {"f", 2}, {"f y x = x - y"}, "\\x y -> f x y"),
                      {int_value(10), int_value(4)}});
    }
    std::size_t caught = 0, verified = 0;
    for (const auto& s : sabs) {
      verified += differs(s);
      EquivReport r = check_obligation(s.program, s.spec);
      caught += r.verdict == Verdict::counterexample_found && !r.disagreements.empty();
    }
    bool ok = instances >= 12 && passed == instances && sabs.size() >= 3 && verified == sabs.size() &&
              caught == sabs.size();
    report(6, ok,
           std::to_string(passed) + "/" + std::to_string(instances) + " obligations hold; " + std::to_string(caught) +
               "/" + std::to_string(sabs.size()) + " sabotages caught (" + std::to_string(verified) +
               " pre-verified)");
  });

  guarded(7, [&] {
    std::ostringstream detail;
    bool ok = true;
    for (Flavor fl : {Flavor::mfe, Flavor::mfh}) {
      for (RuleId rule : {RuleId::beta, RuleId::eta_reduce, RuleId::eta_expand_ref, RuleId::atom_lift}) {
        detail << " " << to_string(fl) << "/" << to_string(rule) << "=";
        if (fl == Flavor::mfh && rule == RuleId::atom_lift) {
          detail << "n/a";
          continue;
        }
        Rng rng(7000 + static_cast<int>(rule) * 13 + (fl == Flavor::mfh));
        const Program& pre = prelude(fl);
        std::size_t compared = 0, bad = 0;
        for (int i = 0; compared < 1000 && i < 5000; ++i) {
          Term t = root_redex(rng, fl, rule);
          if (term_depth(t) > 6) continue;
          RuleContext ctx = redex_context(fl, rule, t);
          ctx.program = &pre;
          auto r = apply_rule(rule, t, ctx);
          if (!r) {
            ++bad;
            continue;
          }
          Outcome a = interpret_term(pre, t), b = interpret_term(pre, *r);
          if (a.kind == Outcome::Kind::timeout || b.kind == Outcome::Kind::timeout) continue;
          ++compared;
          bad += !outcomes_agree(pre, a, pre, b);
        }
        detail << compared << (bad ? "!" + std::to_string(bad) : "");
        ok &= compared >= 1000 && bad == 0;
      }
    }
    report(7, ok, "rule soundness, samples per rule:" + detail.str());
  });

  guarded(8, [&] {
    std::size_t pairs = 0, mismatches = 0;
    for (Flavor fl : {Flavor::mfe, Flavor::mfh}) {
      Rng rng(fl == Flavor::mfe ? 81 : 82);
      for (int i = 0; i < 1000; ++i) {
        Term t = random_term(rng, fl, 6);
        Binding b;
        std::map<std::string, Nameless> nb;
        for (const auto& v : var_pool(fl)) {
          if (rng() % 2) continue;
          Term s = random_term(rng, fl, 3);
          b[v] = s;
          nb[v] = to_nameless(s);
        }
        ++pairs;
        mismatches += !(to_nameless(substitute(t, b)) == nameless_subst(to_nameless(t), nb));
      }
    }
    report(8, pairs >= 1000 && mismatches == 0,
           std::to_string(pairs) + " pairs, " + std::to_string(mismatches) + " mismatches");
  });

  guarded(9, [&] {
    std::ostringstream detail;
    bool ok = true;
    for (Flavor fl : {Flavor::mfe, Flavor::mfh}) {
      auto files = corpus_files(fl);
      std::size_t good = 0;
      for (const auto& path : files) {
        Program p = load_program(path);
        good += alpha_eq(parse(print(p), fl), p);
      }
      Rng rng(fl == Flavor::mfe ? 91 : 92);
      std::size_t gen_good = 0;
      const std::size_t n = 500;
      for (std::size_t i = 0; i < n; ++i) {
        Program p = resolve(random_program(rng, fl));
        gen_good += alpha_eq(parse(print(p), fl), p);
      }
      ok &= files.size() >= 20 && good == files.size() && gen_good == n;
      detail << " " << to_string(fl) << ": corpus " << good << "/" << files.size() << ", generated " << gen_good
             << "/" << n << ";";
    }
    report(9, ok, "round trip" + detail.str());
  });

  guarded(10, [&] {
    auto t0 = Clock::now();
    std::size_t instances = 0, checks = 0, disagreements = 0, failed = 0;
    for (Flavor fl : {Flavor::mfe, Flavor::mfh})
      for (const auto& path : corpus_files(fl)) {
        Program p = load_program(path);
        for (const auto& inst : builtin_instances(p)) {
          ++instances;
          RefactorReport r = refactor(p, inst.spec);
          if (r.obligation != ObligationStatus::checked_ok) {
            ++failed;
            continue;
          }
          for (const auto& k : shared_entries(p, inst.spec, r.output)) {
            EquivReport e = check_equiv(p, r.output, k, infer_shapes(p, k));
            ++checks;
            disagreements += e.disagreements.size();
            failed += e.samples != 100;
          }
        }
      }
    double secs = seconds_since(t0);

    Program before = load_program(c_rename);
    Program after = refactor(before, scheme_rename(before, {"f", 1}, "h")).output;
    std::size_t fours = 0;
    auto inputs = gen_values(Shape::int_, 10, 100, Flavor::mfe);
    for (const auto& v : inputs) {
      Outcome a = interpret(before, {"g", 1}, {v}), b = interpret(after, {"g", 1}, {v});
      fours += to_string(a, Flavor::mfe) == "4" && to_string(b, Flavor::mfe) == "4";
    }
    bool ok = disagreements == 0 && failed == 0 && secs < 10.0 && fours == inputs.size();
    report(10, ok,
           std::to_string(instances) + " refactorings, " + std::to_string(checks) + " entry checks, " +
               std::to_string(disagreements) + " disagreements, " + std::to_string(secs) + " s; g/1 = 4 on " +
               std::to_string(fours) + "/100");
  });

  guarded(11, [&] {
    Program client = parse(slurp(corpus_path("migrate/01_sum.client.mfe")), Flavor::mfe, {true});
    AdapterModule m = load_adapter_module(corpus_path("migrate/01_sum.adapters.mfe"), Flavor::mfe);
    MigrationResult r = migrate(client, m);
    Program old = parse(slurp(corpus_path("migrate/01_sum.client.mfe")) + slurp(corpus_path("migrate/01_sum.oldapi.mfe")),
                        Flavor::mfe);
    std::string text = print(r.output);
    std::string a = to_string(interpret(old, {"t", 0}, {}), Flavor::mfe);
    std::string b = to_string(interpret(r.output, {"t", 0}, {}), Flavor::mfe);
    bool ok = squash(text) == squash("t() -> new_sum([1, new_sum([4,1])]).") && a == "6" && b == "6" &&
              r.report.residual.empty();
    report(11, ok, "migration: " + text.substr(0, text.size() - 1) + " (" + a + " / " + b + ", residual " +
                       std::to_string(r.report.residual.size()) + ")");
  });

  guarded(12, [&] {
    BinRun r = refac_bin("--no-check custom --adapter " + corpus_path("diverge/self_apply.adapter") + " " +
                         corpus_path("diverge/loop.mfe"));
    bool ok = r.code == 3 && r.err.rfind("RewriteDivergence:", 0) == 0 && r.secs < 2.0;
    report(12, ok, "divergence guard, exit " + std::to_string(r.code) + ", " + std::to_string(r.secs) + " s");
  });

  return failures == 0 ? 0 : 1;
}
