#include <doctest.h>

#include <json.hpp>

#include "gen.hpp"
#include "refac/error.hpp"
#include "refac/interp.hpp"
#include "refac/schemes.hpp"
#include "refac/syntax.hpp"

using namespace refac;
using namespace refac::testing;

namespace {

const char* kBefore = "f(X) -> X+1.\ng(Y) -> f(Y+2) - f(Y-2).";
const char* kAfter = "h(X) -> X+1.\ng(Y) -> h(Y+2) - h(Y-2).";

std::string run(const char* src, Flavor fl, FunKey entry, std::vector<Value> args = {}) {
  Program p = parse(src, fl);
  return to_string(interpret(p, entry, args), fl);
}

}  // namespace

TEST_CASE("g/1 is the constant 4") {
  Program p = parse(kBefore, Flavor::mfe);
  for (const auto& v : gen_values(Shape::int_, 3, 100, Flavor::mfe)) {
    Outcome o = interpret(p, {"g", 1}, {v});
    REQUIRE(o.kind == Outcome::Kind::ok);
    REQUIRE(o.value.as<IntV>());
    CHECK(o.value.as<IntV>()->value == 4);
  }
}

TEST_CASE("outcomes of faulty programs") {
  CHECK(run("f(X) -> X + [1].", Flavor::mfe, {"f", 1}, {int_value(1)}) == "error(BadOperand)");
  CHECK(run("f(X) -> X(1).", Flavor::mfe, {"f", 1}, {int_value(1)}) == "error(NotAFunction)");
  CHECK(run("f(X) -> (fun(A, B) -> A end)(X).", Flavor::mfe, {"f", 1}, {int_value(1)}) ==
        "error(ArityMismatch)");
  CHECK(run("f(X) -> apply(nope, [X]).", Flavor::mfe, {"f", 1}, {int_value(1)}) == "error(UnboundName)");
  CHECK(run("loop(X) -> loop(X).", Flavor::mfe, {"loop", 1}, {int_value(1)}) == "timeout");
  CHECK(run("loop x = 1 + loop x", Flavor::mfh, {"loop", 1}, {int_value(1)}) == "timeout");
  CHECK(run("f(X) -> lists:map(fun(A) -> A * A end, X).", Flavor::mfe, {"f", 1}, {list_value({1, 2, 3})}) ==
        "[1, 4, 9]");
  CHECK(run("f(X) -> new_sum([X, 1, 2]).", Flavor::mfe, {"f", 1}, {int_value(3)}) == "6");
  CHECK(run("w(X) -> X * 2.\nf(X) -> spawn(w, [X]).", Flavor::mfe, {"f", 1}, {int_value(21)}) == "42");
  CHECK(run("s() -> ok.", Flavor::mfe, {"s", 0}) == "ok");
  // wrapping arithmetic
  CHECK(run("f(X) -> X * X * X * X * X.", Flavor::mfe, {"f", 1}, {int_value(1LL << 20)}) ==
        std::to_string(static_cast<std::int64_t>(0)));
}

TEST_CASE("MFH partial application, sections and CAFs") {
  const char* src =
      "add a b = a + b\ninc = add 1\nsub a b = a - b\n"
      "r xs = map (`sub` 3) xs\nl xs = map (10 `sub`) xs\nk x = inc (inc x)";
  CHECK(run(src, Flavor::mfh, {"k", 1}, {int_value(40)}) == "42");
  CHECK(run(src, Flavor::mfh, {"r", 1}, {list_value({5, 6})}) == "[2, 3]");
  CHECK(run(src, Flavor::mfh, {"l", 1}, {list_value({5, 6})}) == "[5, 4]");
  Program p = parse(src, Flavor::mfh);
  Outcome f = interpret(p, {"inc", 0}, {});
  REQUIRE(f.kind == Outcome::Kind::ok);
  CHECK(f.value.is_function());
  CHECK(to_string(apply_value(p, f.value, {int_value(41)}), Flavor::mfh) == "42");
}

TEST_CASE("value generation") {
  for (Flavor fl : {Flavor::mfe, Flavor::mfh}) {
    auto a = gen_values(Shape::list_int, 9, 50, fl);
    auto b = gen_values(Shape::list_int, 9, 50, fl);
    REQUIRE(a.size() == 50);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(to_string(a[i], fl) == to_string(b[i], fl));
    for (const auto& v : a) {
      REQUIRE(v.as<ListV>());
      CHECK(v.as<ListV>()->items.size() <= 5);
    }
    for (const auto& v : gen_values(Shape::int_, 4, 500, fl)) {
      REQUIRE(v.as<IntV>());
      CHECK(v.as<IntV>()->value >= -100);
      CHECK(v.as<IntV>()->value <= 100);
    }
    CHECK(closure_pool(fl).size() == 8);
    Program empty;
    empty.flavor = fl;
    std::vector<std::int64_t> want{41, 42, 82, 0, -41, -123, 81, 1681};
    for (std::size_t i = 0; i < 8; ++i) {
      Outcome c = interpret_term(empty, closure_pool(fl)[i]);
      REQUIRE(c.kind == Outcome::Kind::ok);
      CHECK(to_string(apply_value(empty, c.value, {int_value(41)}), fl) == std::to_string(want[i]));
    }
    for (const auto& v : gen_values(Shape::fun_int_int, 5, 20, fl)) CHECK(v.is_function());
  }
  CHECK(parse_shape(to_string(Shape::fun_int_int)) == Shape::fun_int_int);
}

TEST_CASE("shape inference") {
  Program p = parse("g(Xs) -> lists:map(fun f/1, Xs).\nf(X) -> X+3.\nh(F, X) -> F(X) + 1.\nk(A, L) -> g(L).",
                    Flavor::mfe);
  CHECK(infer_shapes(p, {"g", 1}) == std::vector<Shape>{Shape::list_int});
  CHECK(infer_shapes(p, {"h", 2}) == std::vector<Shape>{Shape::fun_int_int, Shape::int_});
  CHECK(infer_shapes(p, {"k", 2}) == std::vector<Shape>{Shape::int_, Shape::list_int});
  Program q = parse("f x y = x+y\ng z xs = map (f z) xs\nap f x = f x", Flavor::mfh);
  CHECK(infer_shapes(q, {"g", 2}) == std::vector<Shape>{Shape::int_, Shape::list_int});
  CHECK(infer_shapes(q, {"ap", 2}) == std::vector<Shape>{Shape::fun_int_int, Shape::int_});
}

TEST_CASE("check_equiv: rename and sabotage") {
  Program before = parse(kBefore, Flavor::mfe);
  Program after = parse(kAfter, Flavor::mfe);
  EquivReport r = check_equiv(before, after, {"g", 1}, {Shape::int_});
  CHECK(r.verdict == Verdict::equivalent_on_samples);
  CHECK(r.samples == 100);
  CHECK(r.agreements == 100);
  CHECK(r.disagreements.empty());

  Program broken = parse("h(X) -> X*2.\ng(Y) -> h(Y+2) - h(Y-2).", Flavor::mfe);
  EquivReport s = check_equiv(before, broken, {"g", 1}, {Shape::int_});
  CHECK(s.verdict == Verdict::counterexample_found);
  REQUIRE_FALSE(s.disagreements.empty());
  // oracle: 2(Y+2) - 2(Y-2) = 8
  CHECK(to_string(s.disagreements[0].old_outcome, Flavor::mfe) == "4");
  CHECK(to_string(s.disagreements[0].new_outcome, Flavor::mfe) == "8");
  CHECK(report_text(s).find("verdict: counterexample_found") != std::string::npos);
  auto j = nlohmann::json::parse(report_json(s));
  CHECK(j["verdict"] == "counterexample_found");
  CHECK(j["disagreements"][0]["old"] == "4");
  CHECK(j["disagreements"][0]["new"] == "8");
  CHECK(j["samples"] == 100);

  try {
    check_equiv(before, after, {"f", 1}, {Shape::int_});
    FAIL("expected EntryMissing");
  } catch (const RefacError& e) {
    CHECK(e.kind() == ErrorKind::EntryMissing);
  }
}

TEST_CASE("check_equiv: timeouts are inconclusive") {
  Program a = parse("f(X) -> f(X).", Flavor::mfe);
  EquivReport r = check_equiv(a, a, {"f", 1}, {Shape::int_}, {10, 500, 1});
  CHECK(r.verdict == Verdict::inconclusive);
  CHECK(r.inconclusive == 10);
  Program b = parse("f(X) -> X.", Flavor::mfe);
  CHECK(check_equiv(a, b, {"f", 1}, {Shape::int_}, {10, 500, 1}).verdict == Verdict::inconclusive);
}

TEST_CASE("check_equiv is deterministic in the seed") {
  Program before = parse(kBefore, Flavor::mfe);
  Program broken = parse("h(X) -> X*X.\ng(Y) -> h(Y+2) - h(Y-2).", Flavor::mfe);
  auto j1 = report_json(check_equiv(before, broken, {"g", 1}, {Shape::int_}, {30, kDefaultFuel, 7}));
  auto j2 = report_json(check_equiv(before, broken, {"g", 1}, {Shape::int_}, {30, kDefaultFuel, 7}));
  auto j3 = report_json(check_equiv(before, broken, {"g", 1}, {Shape::int_}, {30, kDefaultFuel, 8}));
  CHECK(j1 == j2);
  CHECK(j1 != j3);
}

TEST_CASE("check_obligation") {
  Program p = parse("f(X) -> X+3.\ng(Xs) -> lists:map(fun f/1,Xs).", Flavor::mfe);
  auto def = [](const char* s) { return parse(s, Flavor::mfe, {true}).defs[0]; };

  AdapterSpec rename{{"f", 1}, {def("h(X) -> X+3.")}, parse_expr("fun(X) -> h(X) end", Flavor::mfe), true, "h"};
  CHECK(check_obligation(p, resolve_spec(p, rename)).verdict == Verdict::equivalent_on_samples);

  AdapterSpec gen{{"f", 1}, {def("f(X, Y) -> X+Y.")}, parse_expr("fun(X) -> f(X, 3) end", Flavor::mfe), true, {}};
  EquivReport ok = check_obligation(p, resolve_spec(p, gen));
  CHECK(ok.verdict == Verdict::equivalent_on_samples);
  CHECK(ok.agreements == 100);

  AdapterSpec bad = gen;
  bad.adapter = parse_expr("fun(X) -> f(X, 4) end", Flavor::mfe);
  EquivReport no = check_obligation(p, resolve_spec(p, bad));
  CHECK(no.verdict == Verdict::counterexample_found);
  CHECK(no.disagreements.size() == 100);

  AdapterSpec missing = rename;
  missing.target = {"zz", 1};
  CHECK_THROWS_AS(check_obligation(p, missing), RefacError);

  Program q = parse("f x y = x+y\ng z xs = map (f z) xs", Flavor::mfh);
  AdapterSpec flip{{"f", 2}, {parse("f y x = x+y", Flavor::mfh, {true}).defs[0]},
                   parse_expr("\\x y -> f y x", Flavor::mfh), true, {}};
  CHECK(check_obligation(q, resolve_spec(q, flip)).verdict == Verdict::equivalent_on_samples);
  Program q2 = parse("f x y = x-y\ng z xs = map (f z) xs", Flavor::mfh);
  AdapterSpec flip2{{"f", 2}, {parse("f y x = x-y", Flavor::mfh, {true}).defs[0]},
                    parse_expr("\\x y -> f x y", Flavor::mfh), true, {}};
  CHECK(check_obligation(q2, resolve_spec(q2, flip2)).verdict == Verdict::counterexample_found);
}

TEST_CASE("fuel monotonicity") {
  Rng rng(3);
  const Program& pre = prelude(Flavor::mfe);
  for (int i = 0; i < 300; ++i) {
    Term t = typed_term(rng, Flavor::mfe, Ty::int_, 4);
    Outcome small = interpret_term(pre, t, 1 + rng() % 40);
    Outcome big = interpret_term(pre, t, 100000);
    if (small.kind != Outcome::Kind::timeout) {
      CHECK(big.kind == small.kind);
      CHECK(outcomes_agree(pre, small, pre, big));
    }
  }
}

TEST_CASE("substitution agrees with environment evaluation") {
  // eval(t[X := s]) against the interpreter binding X to s in an environment
  for (Flavor fl : {Flavor::mfe, Flavor::mfh}) {
    Rng rng(fl == Flavor::mfe ? 41 : 42);
    const Program& pre = prelude(fl);
    std::string x = fl == Flavor::mfe ? "X" : "x";
    std::string y = fl == Flavor::mfe ? "Y" : "y";
    int compared = 0;
    for (int i = 0; i < 1000; ++i) {
      Term a = typed_term(rng, fl, Ty::int_, 3);
      Term b = typed_term(rng, fl, Ty::int_, 3);
      Term s = typed_term(rng, fl, Ty::int_, 3);
      // the inner binder reuses the outer name half of the time
      std::string inner = rng() % 2 ? x : y;
      Term body = binop(BinOpKind::add, a,
                        app(lam({inner}, binop(BinOpKind::mul, var(inner), var(x))),
                            {binop(BinOpKind::sub, var(x), b)}));
      Term subst = substitute(body, {{x, s}});
      Term env = app(lam({x}, body), {s});
      Outcome o1 = interpret_term(pre, subst);
      Outcome o2 = interpret_term(pre, env);
      if (o1.kind == Outcome::Kind::timeout || o2.kind == Outcome::Kind::timeout) continue;
      ++compared;
      CAPTURE(print(body, fl));
      CHECK(outcomes_agree(pre, o1, pre, o2));
    }
    CHECK(compared >= 990);
  }
}
