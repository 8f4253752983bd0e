#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "gmc/explorer.hpp"
#include "gmc/gtn.hpp"
#include "gmc/parser.hpp"
#include "json.hpp"

using namespace gmc;

static std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

static GtnProblem load_gtn(const std::string& rel) {
  return gtn_from_json(
      nlohmann::json::parse(slurp(std::string(GMC_SAMPLES_DIR) + "/" + rel)));
}

using Labels = std::vector<std::string>;

TEST_CASE("gtn: counter network enumerates every complete execution") {
  GtnProblem p = load_gtn("gtn/counter.json");
  validate_gtn(p);
  Engine eng(translate_gtn(p));
  auto execs = enumerate_executions(p, eng, 10);
  REQUIRE(execs.size() == 3);
  // sorted by length, then lexicographically
  CHECK(execs[0].ids == Labels{"root"});
  CHECK(execs[1].ids == Labels{"s", "root"});
  CHECK(execs[2].ids == Labels{"s", "s", "root"});
  // vals holds s_0 followed by one valuation per fired node
  REQUIRE(execs[2].vals.size() == 4);
  CHECK(execs[2].vals[0] == std::vector<Int>{0, 0});
  CHECK(execs[2].vals.back() == std::vector<Int>{2, 1});
  CHECK(execs[0].vals.back() == std::vector<Int>{0, 1});
  CHECK(execs[1].vals.back() == std::vector<Int>{1, 1});
}

TEST_CASE("gtn: survey network interleaves sub trees in any order") {
  GtnProblem p = load_gtn("gtn/mission.json");
  Engine eng(translate_gtn(p));
  auto execs = enumerate_executions(p, eng, 10);
  REQUIRE(execs.size() == 5);
  // final valuations over (at, sa, sb, reward, done)
  CHECK(execs[0].ids == Labels{"mission"});
  CHECK(execs[0].vals.back() == std::vector<Int>{0, 0, 0, 0, 1});
  CHECK(execs[1].ids == Labels{"goto_a", "survey_a", "mission"});
  CHECK(execs[1].vals.back() == std::vector<Int>{1, 1, 0, 10, 1});
  CHECK(execs[2].ids == Labels{"goto_b", "survey_b", "mission"});
  CHECK(execs[2].vals.back() == std::vector<Int>{2, 0, 1, 20, 1});
  CHECK(execs[3].ids ==
        Labels{"goto_a", "survey_a", "goto_b", "survey_b", "mission"});
  CHECK(execs[3].vals.back() == std::vector<Int>{2, 1, 1, 30, 1});
  CHECK(execs[4].ids ==
        Labels{"goto_b", "survey_b", "goto_a", "survey_a", "mission"});
  CHECK(execs[4].vals.back() == std::vector<Int>{1, 1, 1, 30, 1});
}

TEST_CASE("gtn: translated model agrees with direct enumeration") {
  GtnProblem p = load_gtn("gtn/mission.json");
  Model m = translate_gtn(p);
  Engine eng(m);
  Explorer ex(eng);
  // the root event fires exactly once per complete execution
  CheckResult r = ex.check_reaches_optimal(
      p.root, {}, parse_cond_text("done == 1"), "reward", OptDir::Max);
  CHECK(r.kind == CheckKind::Optimal);
  CHECK(r.objective == 30);
  CHECK(r.witness.labels() ==
        Labels{"goto_a", "survey_a", "goto_b", "survey_b", "mission"});
}

TEST_CASE("gtn: solve reaches, optimises, and reports unreachable goals") {
  GtnProblem p = load_gtn("gtn/counter.json");

  CheckResult reach = solve_gtn(p, parse_cond_text("done == 1"), "", OptDir::Max);
  CHECK(reach.kind == CheckKind::Reachable);
  CHECK(reach.witness.labels().back() == "root");

  CheckResult best = solve_gtn(p, parse_cond_text("done == 1"), "c", OptDir::Max);
  CHECK(best.kind == CheckKind::Optimal);
  CHECK(best.objective == 2);
  CHECK(best.witness.labels() == Labels{"s", "s", "root"});

  CheckResult least = solve_gtn(p, parse_cond_text("done == 1"), "c", OptDir::Min);
  CHECK(least.kind == CheckKind::Optimal);
  CHECK(least.objective == 0);
  CHECK(least.witness.labels() == Labels{"root"});

  CheckResult no = solve_gtn(p, parse_cond_text("c == 3"), "", OptDir::Max);
  CHECK(no.kind == CheckKind::Unreachable);
}

TEST_CASE("gtn: validation rejects malformed networks") {
  auto base = [] {
    GtnProblem p;
    p.root = "r";
    VarDecl v;
    v.name = "c";
    v.has_range = true;
    v.lo = 0;
    v.hi = 3;
    v.init = {0};
    p.variables.push_back(v);
    p.nodes.push_back(
        {"r", {}, parse_cond_text("true"), parse_program_text(""), true});
    return p;
  };

  validate_gtn(base());

  GtnProblem missing_root = base();
  missing_root.root = "nope";
  CHECK_THROWS_WITH(validate_gtn(missing_root),
                    "gtn: root node 'nope' not defined");

  GtnProblem unknown_sub = base();
  unknown_sub.nodes[0].subs.push_back("ghost");
  CHECK_THROWS_WITH(validate_gtn(unknown_sub),
                    "gtn: node 'r' lists unknown sub 'ghost'");

  GtnProblem dup = base();
  dup.nodes.push_back(dup.nodes[0]);
  CHECK_THROWS_WITH(validate_gtn(dup), "gtn: duplicate node 'r'");

  GtnProblem bad_id = base();
  bad_id.nodes.push_back(
      {"no-dash", {}, parse_cond_text("true"), parse_program_text("")});
  CHECK_THROWS_WITH(validate_gtn(bad_id),
                    "gtn: node id 'no-dash' is not an identifier");

  GtnProblem cyc = base();
  cyc.nodes.push_back(
      {"x", {"y"}, parse_cond_text("true"), parse_program_text("")});
  cyc.nodes.push_back(
      {"y", {"x"}, parse_cond_text("true"), parse_program_text("")});
  CHECK_THROWS_AS(validate_gtn(cyc), std::invalid_argument);

  GtnProblem bad_var = base();
  bad_var.nodes[0].guard = parse_cond_text("ghost == 1");
  CHECK_THROWS_AS(validate_gtn(bad_var), std::invalid_argument);
}

TEST_CASE("gtn: faults during enumeration carry the partial execution") {
  GtnProblem p;
  p.root = "r";
  VarDecl v;
  v.name = "c";
  v.has_range = true;
  v.lo = 0;
  v.hi = 1;
  v.init = {0};
  p.variables.push_back(v);
  p.nodes.push_back(
      {"r", {"s"}, parse_cond_text("true"), parse_program_text(""), true});
  p.nodes.push_back(
      {"s", {}, parse_cond_text("true"), parse_program_text("c = c + 1;")});
  Engine eng(translate_gtn(p));
  try {
    enumerate_executions(p, eng, 10);
    FAIL("expected a gtn fault");
  } catch (const GtnFault& f) {
    CHECK(std::string(f.what()) == "range fault: c = 2 outside {0..1}");
    CHECK(f.partial == Labels{"s"});
  }
}

TEST_CASE("gtn: json round trip preserves the network") {
  GtnProblem p = load_gtn("gtn/mission.json");
  GtnProblem q = gtn_from_json(gtn_to_json(p));
  CHECK(q.root == p.root);
  REQUIRE(q.nodes.size() == p.nodes.size());
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    CHECK(q.nodes[i].id == p.nodes[i].id);
    CHECK(q.nodes[i].subs == p.nodes[i].subs);
    CHECK(q.nodes[i].is_goal == p.nodes[i].is_goal);
  }
  REQUIRE(q.variables.size() == p.variables.size());
  for (std::size_t i = 0; i < p.variables.size(); ++i) {
    CHECK(q.variables[i].name == p.variables[i].name);
    CHECK(q.variables[i].init == p.variables[i].init);
  }
  // identical state spaces after the round trip
  CHECK(translate_gtn(q).digest().hex() == translate_gtn(p).digest().hex());
}

TEST_CASE("gtn: enumeration bound caps execution length") {
  GtnProblem p = load_gtn("gtn/counter.json");
  Engine eng(translate_gtn(p));
  auto execs = enumerate_executions(p, eng, 2);
  REQUIRE(execs.size() == 2);
  CHECK(execs[0].ids == Labels{"root"});
  CHECK(execs[1].ids == Labels{"s", "root"});
}
