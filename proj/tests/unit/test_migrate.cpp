#include <doctest.h>

#include <fstream>
#include <sstream>

#include "corpus.hpp"
#include "refac/migrate.hpp"
#include "refac/syntax.hpp"

using namespace refac;
using namespace refac::testing;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Case {
  Flavor flavor;
  std::string client_text;
  Program client;
  AdapterModule module;
  std::string old_api;  // reference implementation of the old functions
};

Case load(const std::string& stem, Flavor fl) {
  std::string base = corpus_path("migrate/" + stem);
  std::string ext = fl == Flavor::mfe ? ".mfe" : ".mfh";
  Case c{fl, slurp(base + ".client" + ext), {}, {}, {}};
  c.client = parse(c.client_text, fl, {true});
  c.module = load_adapter_module(base + ".adapters" + ext, fl);
  if (std::ifstream(base + ".oldapi" + ext)) c.old_api = slurp(base + ".oldapi" + ext);
  return c;
}

// The client linked against the old implementation.
Program linked(const Case& c) { return parse(c.client_text + "\n" + c.old_api, c.flavor); }

void check_preserved(const Case& c, const Program& after) {
  Program old = linked(c);
  for (const auto& d : c.client.defs) {
    CAPTURE(to_string(d.key()));
    EquivReport r = check_equiv(old, after, d.key(), infer_shapes(old, d.key()));
    CHECK(r.verdict == Verdict::equivalent_on_samples);
    CHECK(r.disagreements.empty());
  }
}

}  // namespace

TEST_CASE("two adapters: sum example") {
  Case c = load("01_sum", Flavor::mfe);
  REQUIRE(c.module.adapters.size() == 2);
  MigrationResult m = migrate(c.client, c.module);
  CHECK(print(m.output) == "t() -> new_sum([1, new_sum([4, 1])]).\n");
  CHECK(m.report.residual.empty());
  CHECK(m.report.sites.at({"old_add", 2}) == 1);
  CHECK(m.report.sites.at({"old_inc", 1}) == 1);
  CHECK(to_string(interpret(m.output, {"t", 0}, {}), Flavor::mfe) == "6");
  CHECK(to_string(interpret(linked(c), {"t", 0}, {}), Flavor::mfe) == "6");
  CHECK(m.report.rule_firings.at(RuleId::beta) == 2);
}

TEST_CASE("uncovered arity is residual") {
  Case c = load("02_residual", Flavor::mfe);
  MigrationResult m = migrate(c.client, c.module);
  CHECK(print(m.output) == "t(X) -> new_sum([X, 2]) * 10.\nu(X) -> old_add(X, 2, 3).\n");
  REQUIRE(m.report.residual.size() == 1);
  CHECK(m.report.residual[0].name == "old_add");
  CHECK(m.report.residual[0].arity == 3);
  CHECK(m.report.residual[0].location == "u/1");
  CHECK(report_text(m.report).find("residual: 1") != std::string::npos);
  CHECK(report_json(m.report).find("\"location\": \"u/1\"") != std::string::npos);
}

TEST_CASE("chained adapters, fun refs and atoms") {
  Case c = load("03_chain", Flavor::mfe);
  MigrationResult m = migrate(c.client, c.module);
  CAPTURE(print(m.output));
  CHECK(m.report.residual.empty());
  for (const auto& a : c.module.adapters) CHECK(count_funrefs(m.output, a.target) == 0);
  CHECK(m.output.lookup({"add_n", 2}));
  check_preserved(c, m.output);
}

TEST_CASE("MFH migration") {
  Case c = load("04_lists", Flavor::mfh);
  MigrationResult m = migrate(c.client, c.module);
  CAPTURE(print(m.output));
  CHECK(m.report.residual.empty());
  CHECK(alpha_eq(m.output, parse("t xs = map (\\y -> new_sum [1, y]) xs\ns x = new_sum [x, 4 + 1]", Flavor::mfh)));
  check_preserved(c, m.output);
}

TEST_CASE("module validation") {
  Case c = load("01_sum", Flavor::mfe);
  MigrationResult same = migrate(c.client, AdapterModule{});
  CHECK(alpha_eq(same.output, c.client));
  CHECK(same.report.residual.empty());

  try {
    parse_adapter_module("%% adapter\nold/1 := fun(A) -> A end.\nold/1 := fun(A) -> A end.\n", Flavor::mfe);
    FAIL("expected ConflictingAdapters");
  } catch (const RefacError& e) {
    CHECK(e.kind() == ErrorKind::ConflictingAdapters);
  }
  try {
    parse_adapter_module("%% new\nold(A) -> A.\n%% adapter\nold/1 := fun(A) -> A end.\n", Flavor::mfe);
    FAIL("expected ConflictingAdapters");
  } catch (const RefacError& e) {
    CHECK(e.kind() == ErrorKind::ConflictingAdapters);
  }
  AdapterModule twice = c.module;
  twice.adapters.push_back(twice.adapters[0]);
  try {
    migrate(c.client, twice);
    FAIL("expected ConflictingAdapters");
  } catch (const RefacError& e) {
    CHECK(e.kind() == ErrorKind::ConflictingAdapters);
  }
  AdapterModule open = parse_adapter_module("%% adapter\nold_inc/1 := fun(A) -> A + Q end.\n", Flavor::mfe);
  try {
    migrate(c.client, open);
    FAIL("expected AdapterNotClosed");
  } catch (const RefacError& e) {
    CHECK(e.kind() == ErrorKind::AdapterNotClosed);
  }
}
