#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

#include "gmc/explorer.hpp"
#include "gmc/goal.hpp"
#include "gmc/parser.hpp"
#include "gmc/printer.hpp"
#include "json.hpp"

using namespace gmc;

static std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

static std::string sample(const std::string& rel) {
  return std::string(GMC_SAMPLES_DIR) + "/" + rel;
}

static CurrencyLedger load_ledger(const std::string& rel) {
  return ledger_from_json(nlohmann::json::parse(slurp(sample(rel))));
}

using Labels = std::vector<std::string>;

TEST_CASE("goal: conversion functions map deltas to currency") {
  ConversionFn lin{ConversionFn::Kind::Linear, 3, 2};
  CHECK(lin.apply(10) == 15);
  CHECK(lin.apply(7) == 10);
  CHECK(lin.apply(-7) == -10);

  ConversionFn pw;
  pw.kind = ConversionFn::Kind::Power;
  pw.exponent = 2;
  CHECK(pw.apply(5) == 25);
  CHECK(pw.apply(-5) == -25);

  ConversionFn lg;
  lg.kind = ConversionFn::Kind::Logarithmic;
  lg.base = 2;
  CHECK(lg.apply(8) == 3);
  CHECK(lg.apply(7) == 2);
  CHECK(lg.apply(1) == 0);
  CHECK(lg.apply(0) == 0);

  ConversionFn sg;
  sg.kind = ConversionFn::Kind::Logistic;
  sg.level = 100;
  CHECK(sg.apply(62) == 99);
  CHECK(sg.apply(0) == 50);
  // sign symmetry: a 5-unit restore credits what a 5-unit spend costs
  CHECK(sg.apply(-5) == -96);
  CHECK(sg.apply(5) == 96);
}

TEST_CASE("goal: wiring inserts debits before writes and rewards after") {
  Model m = parse_model(slurp(sample("models/waypoints3.gmc")));
  CurrencyLedger lg = load_ledger("ledgers/survey_rewards.json");
  std::vector<std::string> findings;
  Model w = wire_currency(m, lg, &findings);
  CHECK(findings.empty());

  std::string text = print_model(w);
  CHECK(text.find("lambda = lambda - cvlin(1, 1, energy - (energy - 10))") !=
        std::string::npos);
  CHECK(text.find("lambda = lambda + 30") != std::string::npos);
  // events that touch no resource stay unwired
  CHECK(text.find("go.i{visited[i] = 1; atX = posX[i]; atY = posY[i];}") !=
        std::string::npos);

  Engine eng(w);
  Explorer ex(eng);
  CheckResult r = ex.check_reaches_optimal(
      "mission", {},
      parse_cond_text("visited[0] == 1 && visited[1] == 1 && visited[2] == 1"),
      "lambda", OptDir::Max);
  CHECK(r.kind == CheckKind::Optimal);
  CHECK(r.objective == 60);
  CHECK(r.witness.labels() ==
        Labels{"go.0", "smp.0", "go.1", "smp.1", "go.2", "smp.2"});
}

TEST_CASE("goal: restoring a resource credits the currency") {
  Model m = parse_model(
      "var tank:{0..50} = 20;\n"
      "var lambda = 0;\n"
      "P() = drain{tank = tank - 8;} -> refill{tank = tank + 5;} -> Stop;\n");
  CurrencyLedger lg;
  lg.lambda_var = "lambda";
  ResourceSpec rs;
  rs.name = "fuel";
  rs.variable = "tank";
  rs.conversion = ConversionFn{ConversionFn::Kind::Linear, 2, 1};
  lg.resources.push_back(rs);

  Model w = wire_currency(m, lg);
  Engine eng(w);
  Explorer ex(eng);
  ReplayVerdict v = ex.replay("P", {}, {"drain", "refill"});
  REQUIRE(v.accepted);
  // drain costs 2*8, refill credits 2*5
  CHECK(v.steps[0].post_vals == std::vector<Int>{12, -16});
  CHECK(v.final_vals == std::vector<Int>{17, -6});
}

TEST_CASE("goal: rewards attach by base label or literal indexed label") {
  const char* src =
      "var x:{0..9} = 0;\n"
      "var lambda = 0;\n"
      "P() = go.1{x = 1;} -> go.2{x = 2;} -> other{x = 3;} -> Stop;\n";

  CurrencyLedger indexed;
  indexed.lambda_var = "lambda";
  GoalSpec g;
  g.name = "go.2";
  g.cond = parse_cond_text("x == 2");
  g.reward = 5;
  indexed.goals.push_back(g);

  Model w1 = wire_currency(parse_model(src), indexed);
  Engine e1(w1);
  Explorer x1(e1);
  ReplayVerdict v1 = x1.replay("P", {}, {"go.1", "go.2", "other"});
  REQUIRE(v1.accepted);
  CHECK(v1.steps[0].post_vals == std::vector<Int>{1, 0});  // go.1 unrewarded
  CHECK(v1.steps[1].post_vals == std::vector<Int>{2, 5});  // go.2 pays out
  CHECK(v1.final_vals == std::vector<Int>{3, 5});

  CurrencyLedger base = indexed;
  base.goals[0].name = "go";  // base label matches every go.* event
  Model w2 = wire_currency(parse_model(src), base);
  Engine e2(w2);
  Explorer x2(e2);
  ReplayVerdict v2 = x2.replay("P", {}, {"go.1", "go.2", "other"});
  REQUIRE(v2.accepted);
  CHECK(v2.steps[0].post_vals == std::vector<Int>{1, 5});
  CHECK(v2.steps[1].post_vals == std::vector<Int>{2, 10});
  CHECK(v2.final_vals == std::vector<Int>{3, 10});
}

TEST_CASE("goal: wiring reports findings instead of failing") {
  Model m = parse_model(slurp(sample("models/waypoints3.gmc")));

  CurrencyLedger bad_lambda;
  bad_lambda.lambda_var = "nothere";
  GoalSpec g;
  g.name = "smp";
  g.cond = parse_cond_text("true");
  g.reward = 1;
  bad_lambda.goals.push_back(g);
  std::vector<std::string> findings;
  wire_currency(m, bad_lambda, &findings);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0] ==
        "currency variable 'nothere' is not a declared scalar; nothing wired");

  CurrencyLedger bad_res;
  bad_res.lambda_var = "lambda";
  ResourceSpec rs;
  rs.name = "water";
  rs.variable = "ghost";
  bad_res.resources.push_back(rs);
  GoalSpec neg;
  neg.name = "smp";
  neg.cond = parse_cond_text("true");
  neg.reward = -4;
  bad_res.goals.push_back(neg);
  findings.clear();
  wire_currency(m, bad_res, &findings);
  REQUIRE(findings.size() == 2);
  CHECK(findings[0] == "resource 'water' tracks undeclared 'ghost'");
  CHECK(findings[1] == "goal 'smp' has a negative reward");
}

TEST_CASE("goal: compatibility is joint reachability") {
  Model m = parse_model(slurp(sample("models/waypoints3.gmc")));
  Engine eng(m);
  Explorer ex(eng);
  CurrencyLedger lg = load_ledger("ledgers/conflict.json");
  REQUIRE(lg.goals.size() == 3);
  const GoalSpec& visitAll = lg.goals[0];
  const GoalSpec& saveEnergy = lg.goals[1];
  const GoalSpec& spendBudget = lg.goals[2];

  CompatResult ok = check_compatible(ex, "main", {}, {visitAll, spendBudget});
  CHECK(ok.compatible);
  CHECK(ok.witness.origin == "compatible");
  CHECK_FALSE(ok.witness.labels().empty());

  CHECK_FALSE(check_compatible(ex, "main", {}, {visitAll, saveEnergy}).compatible);
  CHECK_FALSE(
      check_compatible(ex, "main", {}, {saveEnergy, spendBudget}).compatible);
  CHECK_FALSE(check_compatible(ex, "main", {},
                               {visitAll, saveEnergy, spendBudget})
                  .compatible);

  CompatResult margin = check_compatible(
      ex, "main", {}, load_ledger("ledgers/survey_rewards.json").goals);
  CHECK(margin.compatible);
}

TEST_CASE("goal: unsatisfiable cores are minimal and seed reproducible") {
  Model m = parse_model(slurp(sample("models/waypoints3.gmc")));
  Engine eng(m);
  Explorer ex(eng);
  CurrencyLedger lg = load_ledger("ledgers/conflict.json");

  auto names = [](const std::vector<GoalSpec>& gs) {
    Labels out;
    for (const auto& g : gs) out.push_back(g.name);
    return out;
  };

  std::mt19937_64 rng1(1);
  std::vector<GoalSpec> core1 = find_muc(ex, "main", {}, lg.goals, rng1);
  CHECK(names(core1) == Labels{"visitAll", "saveEnergy"});

  std::mt19937_64 rng2(2);
  std::vector<GoalSpec> core2 = find_muc(ex, "main", {}, lg.goals, rng2);
  CHECK(names(core2) == Labels{"saveEnergy", "spendBudget"});

  // same seed, same core
  std::mt19937_64 again(1);
  CHECK(names(find_muc(ex, "main", {}, lg.goals, again)) == names(core1));

  for (const auto& core : {core1, core2}) {
    CHECK_FALSE(check_compatible(ex, "main", {}, core).compatible);
    for (std::size_t drop = 0; drop < core.size(); ++drop) {
      std::vector<GoalSpec> sub;
      for (std::size_t i = 0; i < core.size(); ++i)
        if (i != drop) sub.push_back(core[i]);
      CHECK(check_compatible(ex, "main", {}, sub).compatible);
    }
  }

  std::mt19937_64 rng3(7);
  CHECK_THROWS_AS(
      find_muc(ex, "main", {}, load_ledger("ledgers/survey_rewards.json").goals,
               rng3),
      NotUnsatisfiable);
}

TEST_CASE("goal: cores come back in the input order of the goal set") {
  Model m = parse_model(slurp(sample("models/waypoints3.gmc")));
  Engine eng(m);
  Explorer ex(eng);
  CurrencyLedger lg = load_ledger("ledgers/conflict.json");
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<GoalSpec> core = find_muc(ex, "main", {}, lg.goals, rng);
    std::vector<std::size_t> pos;
    for (const auto& g : core)
      for (std::size_t i = 0; i < lg.goals.size(); ++i)
        if (lg.goals[i].name == g.name) pos.push_back(i);
    REQUIRE(pos.size() == core.size());
    CHECK(std::is_sorted(pos.begin(), pos.end()));
  }
}

TEST_CASE("goal: ledger json round trip") {
  nlohmann::json before = nlohmann::json::parse(slurp(sample(
      "ledgers/survey_rewards.json")));
  CurrencyLedger lg = ledger_from_json(before);
  CHECK(lg.lambda_var == "lambda");
  REQUIRE(lg.resources.size() == 1);
  CHECK(lg.resources[0].name == "battery");
  CHECK(lg.resources[0].variable == "energy");
  CHECK(lg.resources[0].conversion.kind == ConversionFn::Kind::Linear);
  REQUIRE(lg.goals.size() == 2);
  CHECK(lg.goals[0].name == "smp");
  CHECK(lg.goals[0].reward == 30);
  CHECK(lg.goals[0].critical);
  CHECK_FALSE(lg.goals[1].critical);

  CurrencyLedger lg2 = ledger_from_json(ledger_to_json(lg));
  CHECK(lg2.lambda_var == lg.lambda_var);
  REQUIRE(lg2.resources.size() == lg.resources.size());
  CHECK(lg2.resources[0].conversion.rate_num ==
        lg.resources[0].conversion.rate_num);
  REQUIRE(lg2.goals.size() == lg.goals.size());
  for (std::size_t i = 0; i < lg.goals.size(); ++i) {
    CHECK(lg2.goals[i].name == lg.goals[i].name);
    CHECK(lg2.goals[i].reward == lg.goals[i].reward);
    CHECK(lg2.goals[i].critical == lg.goals[i].critical);
    CHECK(print_cond(lg2.goals[i].cond) == print_cond(lg.goals[i].cond));
  }

  // every conversion kind survives a round trip
  for (auto kind :
       {ConversionFn::Kind::Linear, ConversionFn::Kind::Power,
        ConversionFn::Kind::Logarithmic, ConversionFn::Kind::Logistic}) {
    ConversionFn f;
    f.kind = kind;
    f.rate_num = 3;
    f.rate_den = 2;
    f.exponent = 4;
    f.base = 5;
    f.level = 60;
    f.midpoint = 7;
    f.steep_num = 8;
    f.steep_den = 9;
    ConversionFn g = conversion_from_json(conversion_to_json(f));
    CHECK(g.kind == f.kind);
    for (Int d = -6; d <= 6; ++d) CHECK(g.apply(d) == f.apply(d));
  }
}
