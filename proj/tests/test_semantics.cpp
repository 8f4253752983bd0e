#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "gmc/goal.hpp"
#include "gmc/parser.hpp"
#include "gmc/printer.hpp"
#include "gmc/semantics.hpp"

using namespace gmc;

static std::vector<std::string> step_labels(const Engine& eng,
                                            const Config& c) {
  std::vector<std::string> out;
  for (const auto& s : eng.successors(c)) out.push_back(s.label);
  std::sort(out.begin(), out.end());
  return out;
}

TEST_CASE("rationals: exact arithmetic") {
  Rat a(1, 3), b(1, 6);
  CHECK(a + b == Rat(1, 2));
  CHECK(a * b == Rat(1, 18));
  CHECK(a - b == Rat(1, 6));
  CHECK(Rat(2, 4) == Rat(1, 2));
  CHECK(Rat(-6, 4) == Rat(-3, 2));
  CHECK(Rat(1, 3) < Rat(1, 2));
  CHECK(Rat(7).is_int());
  CHECK_FALSE(Rat(1, 3).is_int());
}

TEST_CASE("engine: event programs run atomically in order") {
  Model m = parse_model(
      "var x:{0..10} = 0;\n"
      "var y:{0..10} = 0;\n"
      "P() = e{x = x + 1; y = x + 1;} -> Stop;\n");
  Engine eng(m);
  auto steps = eng.successors(eng.initial_config("P", {}));
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].label == "e");
  CHECK(steps[0].after.vals == std::vector<Int>{1, 2});
}

TEST_CASE("engine: if/else and array writes") {
  Model m = parse_model(
      "var v[3]:{0..5} = [0, 0, 0];\n"
      "var k:{0..2} = 2;\n"
      "P() = e{if (k == 2) { v[k] = 5; } else { v[0] = 1; }} -> Stop;\n");
  Engine eng(m);
  auto steps = eng.successors(eng.initial_config("P", {}));
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].after.vals == std::vector<Int>{0, 0, 5, 2});
}

TEST_CASE("engine: guards enable and disable branches") {
  Model m = parse_model(
      "var c:{0..3} = 0;\n"
      "P() = [c < 3] inc{c = c + 1;} -> P()\n"
      "   [] [c == 3] done -> Stop;\n");
  Engine eng(m);
  Config c0 = eng.initial_config("P", {});
  CHECK(step_labels(eng, c0) == std::vector<std::string>{"inc"});
  Config c3 = c0;
  c3.vals = {3};
  CHECK(step_labels(eng, c3) == std::vector<std::string>{"done"});
}

TEST_CASE("engine: external choice offers both branches") {
  Model m = parse_model(
      "var x:{0..9} = 0;\n"
      "P() = a{x = 1;} -> Stop [] b{x = 2;} -> Stop;\n");
  Engine eng(m);
  CHECK(step_labels(eng, eng.initial_config("P", {})) ==
        std::vector<std::string>{"a", "b"});
}

TEST_CASE("engine: interleaving produces both orders") {
  Model m = parse_model(
      "var x:{0..9} = 0;\n"
      "var y:{0..9} = 0;\n"
      "P() = (a{x = 1;} -> Stop) || (b{y = 1;} -> Stop);\n");
  Engine eng(m);
  Config c0 = eng.initial_config("P", {});
  CHECK(step_labels(eng, c0) == std::vector<std::string>{"a", "b"});
  auto steps = eng.successors(c0);
  const Step& a = steps[0].label == "a" ? steps[0] : steps[1];
  CHECK(step_labels(eng, a.after) == std::vector<std::string>{"b"});
}

TEST_CASE("engine: sequencing hands over after termination") {
  Model m = parse_model(
      "var x:{0..9} = 0;\n"
      "P() = Skip; a{x = 1;} -> Skip; b{x = 2;} -> Stop;\n");
  Engine eng(m);
  Config c0 = eng.initial_config("P", {});
  auto s1 = eng.successors(c0);
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].label == "a");
  auto s2 = eng.successors(s1[0].after);
  REQUIRE(s2.size() == 1);
  CHECK(s2[0].label == "b");
}

TEST_CASE("engine: Stop deadlocks, Skip terminates") {
  Model m = parse_model("var x = 0;\nP() = a -> Stop;\nQ() = a -> Skip;\n");
  Engine eng(m);
  auto sp = eng.successors(eng.initial_config("P", {}));
  REQUIRE(sp.size() == 1);
  CHECK(eng.successors(sp[0].after).empty());
  CHECK_FALSE(eng.can_terminate(sp[0].after));
  auto sq = eng.successors(eng.initial_config("Q", {}));
  REQUIRE(sq.size() == 1);
  CHECK(eng.successors(sq[0].after).empty());
  CHECK(eng.can_terminate(sq[0].after));
}

TEST_CASE("engine: parameters substitute into guards and programs") {
  Model m = parse_model(
      "var x:{0..10} = 0;\n"
      "P(n) = [n > 0] a{x = x + n;} -> P(n - 1);\n");
  Engine eng(m);
  Config c = eng.initial_config("P", {2});
  auto s1 = eng.successors(c);
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].after.vals == std::vector<Int>{2});
  auto s2 = eng.successors(s1[0].after);
  REQUIRE(s2.size() == 1);
  CHECK(s2[0].after.vals == std::vector<Int>{3});
  CHECK(eng.successors(s2[0].after).empty());
}

TEST_CASE("engine: range faults carry variable and bounds") {
  Model m = parse_model("var c:{0..3} = 0;\nP() = a{c = c + 10;} -> Stop;\n");
  Engine eng(m);
  try {
    eng.successors(eng.initial_config("P", {}));
    FAIL("expected a range fault");
  } catch (const RangeFault& f) {
    CHECK(std::string(f.what()) == "range fault: c = 10 outside {0..3}");
  }
}

TEST_CASE("engine: unranged variables use the default bounds") {
  Model m = parse_model("var x = 0;\nP() = a{x = x + 1;} -> P();\n");
  EngineOptions tight;
  tight.default_lo = -4;
  tight.default_hi = 4;
  Engine eng(m, tight);
  Config c = eng.initial_config("P", {});
  for (int i = 0; i < 4; ++i) c = eng.successors(c)[0].after;
  CHECK_THROWS_AS(eng.successors(c), RangeFault);
}

TEST_CASE("engine: evaluation faults") {
  Model m = parse_model(
      "var x:{0..10} = 0;\n"
      "var d:{0..10} = 0;\n"
      "P() = a{x = 5 / d;} -> Stop;\n");
  Engine eng(m);
  CHECK_THROWS_AS(eng.successors(eng.initial_config("P", {})), EvalFault);
  CHECK_THROWS_AS(eng.initial_config("missing", {}), EvalFault);
}

TEST_CASE("engine: unguarded recursion trips the cap") {
  Model m = parse_model("var x = 0;\nP() = P();\n");
  Engine eng(m);
  try {
    eng.successors(eng.initial_config("P", {}));
    FAIL("expected a limit fault");
  } catch (const LimitFault& f) {
    CHECK(std::string(f.what()).find("recursion cap 10000") == 0);
  }
}

TEST_CASE("engine: eval_cond and exec_program on raw valuations") {
  Model m = parse_model(
      "var a:{0..9} = 1;\n"
      "var b:{0..9} = 2;\n"
      "P() = Stop;\n");
  Engine eng(m);
  CHECK(eng.eval_cond({1, 2}, parse_cond_text("a + b == 3")));
  CHECK_FALSE(eng.eval_cond({1, 2}, parse_cond_text("a > b")));
  CHECK(eng.eval_cond({1, 2}, parse_cond_text("!(a > b) && (a == 1 || b == 9)")));
  auto out = eng.exec_program({1, 2}, parse_program_text("a = a * 3; b = a - 1;"));
  CHECK(out == std::vector<Int>{3, 2});
}

TEST_CASE("engine: integer division truncates toward zero exactly") {
  Model m = parse_model("var x = 0;\nP() = Stop;\n");
  Engine eng(m);
  auto val = [&](const char* t) {
    return eng.exec_program({0}, parse_program_text(std::string("x = ") + t +
                                                    ";"))[0];
  };
  CHECK(val("7 / 2") == 3);
  CHECK(val("-7 / 2") == -3);
  CHECK(val("7 % 2") == 1);
  CHECK(val("-7 % 2") == -1);
  CHECK(val("2 ^ 10") == 1024);
}

TEST_CASE("engine: conversion builtins agree with ConversionFn") {
  Model m = parse_model("var x:{-100000..100000} = 0;\nP() = Stop;\n");
  Engine eng(m);
  auto val = [&](const std::string& t) {
    return eng.exec_program({0}, parse_program_text("x = " + t + ";"))[0];
  };
  CHECK(val("cvlin(3, 2, 10)") == 15);
  CHECK(val("cvlin(3, 2, 7)") == 10);
  CHECK(val("cvlin(3, 2, -7)") == -10);
  CHECK(val("cvpow(1, 1, 2, 5)") == 25);
  CHECK(val("cvpow(1, 1, 2, -5)") == -25);
  CHECK(val("cvlog(1, 1, 2, 8)") == 3);
  CHECK(val("cvlog(1, 1, 2, 7)") == 2);
  CHECK(val("cvlog(1, 1, 2, 1)") == 0);
  CHECK(val("cvlog(1, 1, 2, 0)") == 0);
  CHECK(val("cvsig(100, 0, 1, 1, 62)") == 99);
  CHECK(val("cvsig(100, 0, 1, 1, 0)") == 50);
  CHECK(val("cvsig(100, 0, 1, 1, -5)") == -96);

  ConversionFn lin{ConversionFn::Kind::Linear, 3, 2};
  ConversionFn pw;
  pw.kind = ConversionFn::Kind::Power;
  pw.exponent = 3;
  ConversionFn lg;
  lg.kind = ConversionFn::Kind::Logarithmic;
  lg.base = 3;
  ConversionFn sg;
  sg.kind = ConversionFn::Kind::Logistic;
  sg.level = 40;
  sg.midpoint = 2;
  sg.steep_num = 1;
  sg.steep_den = 2;
  for (const ConversionFn& fn : {lin, pw, lg, sg}) {
    std::string call = print_expr(fn.to_expr(parse_expr_text("x")));
    for (Int d = -12; d <= 12; ++d) {
      Int got = eng.exec_program({d}, parse_program_text("x = " + call + ";"))[0];
      INFO(call << " at delta " << d);
      CHECK(got == fn.apply(d));
      if (d != 0) CHECK(fn.apply(-d) == -fn.apply(d));
    }
  }
}

TEST_CASE("engine: rational subexpressions must land on integers") {
  Model m = parse_model("var x = 0;\nP() = Stop;\n");
  Engine eng(m);
  // 0.5 * 4 is integral even though the intermediate is not
  auto out = eng.exec_program({0}, parse_program_text("x = 0.5 * 4;"));
  CHECK(out == std::vector<Int>{2});
  CHECK_THROWS_AS(eng.exec_program({0}, parse_program_text("x = 0.5 * 3;")),
                  EvalFault);
}
