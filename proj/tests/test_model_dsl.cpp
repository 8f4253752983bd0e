#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "gmc/lexer.hpp"
#include "gmc/parser.hpp"
#include "gmc/printer.hpp"
#include "gmc/validate.hpp"

using namespace gmc;

static std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

static std::string sample(const std::string& rel) {
  return slurp(std::string(GMC_SAMPLES_DIR) + "/" + rel);
}

TEST_CASE("lexer: adjacency-sensitive operators") {
  auto ts = lex("[] [ ] <> || |= -> 0..3 a.b");
  std::vector<Tok> kinds;
  for (const auto& t : ts) kinds.push_back(t.kind);
  std::vector<Tok> want{Tok::ChoiceExt, Tok::LBracket, Tok::RBracket,
                        Tok::ChoiceInt, Tok::Parallel, Tok::Models,
                        Tok::Arrow,     Tok::IntLit,   Tok::DotDot,
                        Tok::IntLit,    Tok::Ident,    Tok::Dot,
                        Tok::Ident,     Tok::End};
  CHECK(kinds == want);
  CHECK(ts[7].int_val == 0);
  CHECK(ts[9].int_val == 3);
}

TEST_CASE("lexer: comments and positions") {
  auto ts = lex("var // trailing words [] |=\nx");
  REQUIRE(ts.size() == 3);
  CHECK(ts[0].kind == Tok::KwVar);
  CHECK(ts[1].kind == Tok::Ident);
  CHECK(ts[1].text == "x");
  CHECK(ts[1].pos.line == 2);
}

TEST_CASE("lexer: rejects stray characters") {
  CHECK_THROWS_AS(lex("var $x = 0;"), ParseError);
}

TEST_CASE("parser: counter sample shape") {
  Model m = parse_model(sample("models/counter.gmc"));
  REQUIRE(m.vars.size() == 2);
  CHECK(m.vars[0].name == "c");
  CHECK(m.vars[0].has_range);
  CHECK(m.vars[0].lo == 0);
  CHECK(m.vars[0].hi == 3);
  REQUIRE(m.procs.size() == 1);
  CHECK(m.procs[0].name == "main");
  REQUIRE(m.asserts.size() == 3);
  CHECK(m.asserts[0].k == AssertK::Reaches);
  CHECK(m.asserts[1].k == AssertK::DeadlockFree);
  CHECK(m.asserts[2].k == AssertK::Safety);
}

TEST_CASE("parser: quantified define expands to a conjunction") {
  Model m = parse_model(sample("models/waypoints3.gmc"));
  const Assertion& a = m.asserts[0];
  CHECK(print_cond(a.cond) ==
        "visited[0] == 1 && visited[1] == 1 && visited[2] == 1");
}

TEST_CASE("parser: existential quantifier and bounds") {
  Model m = parse_model(
      "var v[3]:{0..1} = [0, 0, 0];\n"
      "#define any (|| i:{0..2}@(v[i] == 1));\n"
      "P() = a{v[1] = 1;} -> Stop;\n"
      "#assert P() reaches any;\n");
  CHECK(print_cond(m.asserts[0].cond) ==
        "v[0] == 1 || v[1] == 1 || v[2] == 1");

  CHECK_THROWS_AS(
      parse_model("var v[3]:{0..1} = [0, 0, 0];\n"
                  "#define any (|| i:{0..20000}@(v[i] == 1));\n"
                  "P() = Stop;\n"
                  "#assert P() reaches any;\n"),
      ParseError);
}

TEST_CASE("parser: defines are statements and need the semicolon") {
  CHECK_THROWS_AS(parse_model("var x = 0;\n#define g (x == 1)\nP() = Stop;\n"),
                  ParseError);
}

TEST_CASE("parser: assertion forms") {
  Assertion a = parse_assertion_text("main() reaches done == 1");
  CHECK(a.k == AssertK::Reaches);
  CHECK(a.entry == "main");
  CHECK(a.entry_args.empty());

  Assertion b = parse_assertion_text("p(2, 3) reaches g == 1 with max(lam)");
  CHECK(b.k == AssertK::ReachesOptimal);
  CHECK(b.entry_args == std::vector<Int>{2, 3});
  CHECK(b.objective == "lam");
  CHECK(b.dir == OptDir::Max);

  Assertion c = parse_assertion_text("main() reaches g == 1 with min(cost)");
  CHECK(c.dir == OptDir::Min);

  Assertion d = parse_assertion_text("main() |= [] energy >= 0");
  CHECK(d.k == AssertK::Safety);

  Assertion e = parse_assertion_text("main() deadlockfree");
  CHECK(e.k == AssertK::DeadlockFree);
}

TEST_CASE("parser: entry references") {
  auto [n0, a0] = parse_entry_text("main()");
  CHECK(n0 == "main");
  CHECK(a0.empty());
  auto [n1, a1] = parse_entry_text("survey(2)");
  CHECK(n1 == "survey");
  CHECK(a1 == std::vector<Int>{2});
  // the arg list is optional on an entry reference
  auto [n2, a2] = parse_entry_text("main");
  CHECK(n2 == "main");
  CHECK(a2.empty());
  CHECK_THROWS_AS(parse_entry_text("main(2"), ParseError);
}

TEST_CASE("parser: compound assignment sugar") {
  Model m = parse_model(
      "var x:{0..10} = 0;\n"
      "P() = a{x += 3; x -= 1; x *= 2;} -> Stop;\n");
  // prints in the desugared form
  std::string t = print_model(m);
  CHECK(t.find("x = x + 3") != std::string::npos);
  CHECK(t.find("x = x - 1") != std::string::npos);
  CHECK(t.find("x = x * 2") != std::string::npos);
}

TEST_CASE("parser: common syntax errors carry positions") {
  try {
    parse_model("var x = ;\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("1:9") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_model("var x = 0;\nP() = a -> ;\n"), ParseError);
  CHECK_THROWS_AS(parse_model("var x = 0;\nP() = [x == 1 Stop;\n"),
                  ParseError);
  // a lone '|' is not an operator
  CHECK_THROWS_AS(parse_model("var x = 0;\nP() = Stop | Stop;\n"), ParseError);
}

TEST_CASE("printer: parse-print fixpoint on the sample corpus") {
  for (const char* rel :
       {"models/counter.gmc", "models/report.gmc", "models/report_avoid.gmc",
        "models/waypoints3.gmc", "models/survey_mission.gmc"}) {
    INFO(rel);
    Model m = parse_model(sample(rel));
    std::string once = print_model(m);
    Model m2 = parse_model(once);
    CHECK(print_model(m2) == once);
    CHECK(m2.digest().hex() == m.digest().hex());
  }
}

TEST_CASE("digest: structural, not textual") {
  Model a = parse_model("var x = 0;\nP() = e{x = 1;} -> Stop;\n");
  Model b = parse_model(
      "// a comment\nvar x = 0;\n\nP() = e{ x = 1; }   -> Stop;\n");
  CHECK(a.digest().hex() == b.digest().hex());
  Model c = parse_model("var x = 0;\nP() = e{x = 2;} -> Stop;\n");
  CHECK(a.digest().hex() != c.digest().hex());
}

// A bad model is rejected either by the parser or by validation; tests
// below only care that it cannot reach a running engine.
static bool rejected(const std::string& text) {
  try {
    Model m = parse_model(text);
    return !validate_model(m).ok();
  } catch (const std::exception&) {
    return true;
  }
}

TEST_CASE("validate: name and shape findings") {
  // unknown variable in a program
  CHECK(rejected("var x = 0;\nP() = a{y = 1;} -> Stop;\n"));
  // unknown process
  CHECK(rejected("var x = 0;\nP() = Q();\n"));
  // arity mismatch
  CHECK(rejected("var x = 0;\nP(n) = Stop;\nQ() = P();\n"));
  // indexing a scalar
  CHECK(rejected("var x = 0;\nP() = a{x[1] = 1;} -> Stop;\n"));
  // array used without an index
  CHECK(rejected("var v[2]:{0..1} = [0, 0];\nP() = a{v = 1;} -> Stop;\n"));
  // a clean model has no findings
  Model ok = parse_model(sample("models/counter.gmc"));
  CHECK(validate_model(ok).ok());
}

TEST_CASE("validate: declaration errors") {
  CHECK(rejected("var x:{5..1} = 0;\nP() = Stop;\n"));
  // init outside the declared range
  CHECK(rejected("var x:{0..3} = 7;\nP() = Stop;\n"));
  // array initializer length mismatch
  CHECK(rejected("var v[3]:{0..1} = [0, 0];\nP() = Stop;\n"));
  // duplicate variable
  CHECK(rejected("var x = 0;\nvar x = 1;\nP() = Stop;\n"));
}

TEST_CASE("printer: assertion text round trip") {
  Model m = parse_model(sample("models/survey_mission.gmc"));
  REQUIRE(m.asserts.size() == 4);
  CHECK(print_assertion(m.asserts[0]) ==
        "#assert mission() reaches at == 4 && hitObstacle == 0 "
        "with max(lambda);");
  CHECK(print_assertion(m.asserts[1]) ==
        "#assert mission() |= [] energyLevel >= 0;");
}
