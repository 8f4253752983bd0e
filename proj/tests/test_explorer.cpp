#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "gmc/explorer.hpp"
#include "gmc/parser.hpp"

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

using Labels = std::vector<std::string>;

TEST_CASE("explorer: counter assertions") {
  Model m = parse_model(slurp(sample("models/counter.gmc")));
  Engine eng(m);
  Explorer ex(eng);
  REQUIRE(m.asserts.size() == 3);

  CheckResult r0 = ex.run_assertion(m.asserts[0]);
  CHECK(r0.kind == CheckKind::Reachable);
  CHECK(r0.holds());
  REQUIRE(r0.has_witness);
  CHECK(r0.witness.labels() == Labels{"tick", "tick", "tick", "fin"});
  CHECK(r0.stats.states == 5);
  CHECK(r0.stats.transitions == 4);
  CHECK(r0.stats.peak_frontier == 1);

  CheckResult r1 = ex.run_assertion(m.asserts[1]);
  CHECK(r1.kind == CheckKind::DeadlockFreeOk);
  CHECK(r1.holds());
  CHECK_FALSE(r1.has_witness);
  CHECK(r1.stats.states == 5);

  CheckResult r2 = ex.run_assertion(m.asserts[2]);
  CHECK(r2.kind == CheckKind::SafetyHolds);
  CHECK(r2.holds());
  CHECK_FALSE(r2.has_witness);
  CHECK(r2.stats.states == 5);
  CHECK(r2.stats.transitions == 4);
}

TEST_CASE("explorer: reach/safety duality on the same condition") {
  Model m = parse_model(slurp(sample("models/counter.gmc")));
  Engine eng(m);
  Explorer ex(eng);
  CheckResult reach = ex.check_reaches("main", {}, parse_cond_text("done == 1"));
  CheckResult safe =
      ex.check_global_safety("main", {}, parse_cond_text("!(done == 1)"));
  REQUIRE(reach.kind == CheckKind::Reachable);
  REQUIRE(safe.kind == CheckKind::SafetyViolated);
  CHECK_FALSE(safe.holds());
  CHECK(safe.witness.labels() == reach.witness.labels());
  CHECK(safe.witness.origin == "safety");
}

TEST_CASE("explorer: trace file write and read round trip") {
  Model m = parse_model(slurp(sample("models/counter.gmc")));
  Engine eng(m);
  Explorer ex(eng);
  CheckResult r = ex.check_reaches("main", {}, parse_cond_text("done == 1"));

  std::ostringstream os;
  write_trace(os, eng, r.witness, "main()");
  std::string expected = "gmc-trace v1 model=" + eng.model().digest().hex() +
                         " entry=main()\n"
                         "0 tick c=1\n"
                         "1 tick c=2\n"
                         "2 tick c=3\n"
                         "3 fin done=1\n";
  CHECK(os.str() == expected);

  std::istringstream is(os.str());
  TraceFile t = read_trace(is);
  CHECK(t.model_hex == eng.model().digest().hex());
  CHECK(t.entry == "main()");
  CHECK(t.labels == Labels{"tick", "tick", "tick", "fin"});

  std::istringstream bad("gmc-trace v2 model=00\n");
  CHECK_THROWS_AS(read_trace(bad), ParseError);
}

TEST_CASE("explorer: report model is a reachability pair") {
  Model m = parse_model(slurp(sample("models/report_avoid.gmc")));
  Engine eng(m);
  Explorer ex(eng);
  CheckResult r = ex.run_assertion(m.asserts[0]);
  CHECK(r.kind == CheckKind::Reachable);
  CHECK(r.stats.states == 5);
  CHECK(r.stats.peak_frontier == 2);
  CHECK(r.witness.labels() == Labels{"mvAway", "auvSurfaceCom"});
}

TEST_CASE("explorer: waypoint survey reach and safety") {
  Model m = parse_model(slurp(sample("models/waypoints3.gmc")));
  Engine eng(m);
  Explorer ex(eng);

  CheckResult r0 = ex.run_assertion(m.asserts[0]);
  CHECK(r0.kind == CheckKind::Reachable);
  CHECK(r0.stats.states == 22);
  CHECK(r0.stats.transitions == 24);
  CHECK(r0.stats.peak_frontier == 6);
  // goal is true right after go.2: the last sample is not needed
  CHECK(r0.witness.labels() == Labels{"go.0", "smp.0", "go.1", "smp.1", "go.2"});

  CheckResult r1 = ex.run_assertion(m.asserts[1]);
  CHECK(r1.kind == CheckKind::SafetyHolds);
  CHECK(r1.stats.states == 25);
  CHECK(r1.stats.transitions == 27);
}

TEST_CASE("explorer: optimal reachability maximises or minimises") {
  Model m = parse_model(
      "var x:{0..9} = 0;\n"
      "var done:{0..1} = 0;\n"
      "P() = a{x = 1;} -> fin{done = 1;} -> Stop\n"
      "   [] b{x = 5;} -> fin{done = 1;} -> Stop;\n");
  Engine eng(m);
  Explorer ex(eng);

  CheckResult mx = ex.check_reaches_optimal("P", {}, parse_cond_text("done == 1"),
                                            "x", OptDir::Max);
  CHECK(mx.kind == CheckKind::Optimal);
  CHECK(mx.holds());
  CHECK(mx.objective == 5);
  CHECK(mx.witness.labels() == Labels{"b", "fin"});

  CheckResult mn = ex.check_reaches_optimal("P", {}, parse_cond_text("done == 1"),
                                            "x", OptDir::Min);
  CHECK(mn.kind == CheckKind::Optimal);
  CHECK(mn.objective == 1);
  CHECK(mn.witness.labels() == Labels{"a", "fin"});

  CheckResult none = ex.check_reaches_optimal(
      "P", {}, parse_cond_text("x == 7"), "x", OptDir::Max);
  CHECK(none.kind == CheckKind::Unreachable);
  CHECK_FALSE(none.holds());
  CHECK_FALSE(none.has_witness);
}

TEST_CASE("explorer: deadlock detection treats Skip as proper exit") {
  Model stuck = parse_model(
      "var x:{0..9} = 0;\n"
      "var done:{0..1} = 0;\n"
      "P() = a{x = 1;} -> fin{done = 1;} -> Stop\n"
      "   [] b{x = 5;} -> fin{done = 1;} -> Stop;\n");
  Engine es(stuck);
  Explorer xs(es);
  CheckResult d = xs.check_deadlock_free("P", {});
  CHECK(d.kind == CheckKind::DeadlockFound);
  CHECK_FALSE(d.holds());
  REQUIRE(d.has_witness);
  CHECK(d.witness.labels() == Labels{"a", "fin"});

  Model clean = parse_model("var x = 0;\nP() = a -> Skip;\n");
  Engine ec(clean);
  Explorer xc(ec);
  CheckResult ok = xc.check_deadlock_free("P", {});
  CHECK(ok.kind == CheckKind::DeadlockFreeOk);
  CHECK(ok.stats.states == 2);
  CHECK(ok.stats.transitions == 1);
}

TEST_CASE("explorer: shortest witnesses break ties lexicographically") {
  Model m = parse_model(
      "var g:{0..1} = 0;\n"
      "P() = a -> z{g = 1;} -> Stop [] b -> c{g = 1;} -> Stop;\n");
  Engine eng(m);
  Explorer ex(eng);
  CheckResult r = ex.check_reaches("P", {}, parse_cond_text("g == 1"));
  // [a,z] and [b,c] both reach in two steps; the leading label decides
  CHECK(r.witness.labels() == Labels{"a", "z"});
}

TEST_CASE("explorer: faults during exploration carry the path") {
  Model m = parse_model("var c:{0..3} = 0;\nP() = a{c = c + 1;} -> P();\n");
  Engine eng(m);
  Explorer ex(eng);
  try {
    ex.check_reaches("P", {}, parse_cond_text("c == 9"));
    FAIL("expected a state-space fault");
  } catch (const StateSpaceFault& f) {
    CHECK(f.inner == "range fault: c = 4 outside {0..3}");
    CHECK(std::string(f.what()) ==
          "state-space fault: range fault: c = 4 outside {0..3} (after 3 "
          "steps)");
    CHECK(f.trace_to_fault.labels() == Labels{"a", "a", "a"});
  }
}

TEST_CASE("explorer: state and depth caps abort with limit faults") {
  Model m = parse_model(slurp(sample("models/counter.gmc")));
  Engine eng(m);

  Explorer capped(eng, ExplorerOptions{.state_cap = 3});
  try {
    capped.check_reaches("main", {}, parse_cond_text("done == 1"));
    FAIL("expected a limit fault");
  } catch (const LimitFault& f) {
    CHECK(std::string(f.what()) == "state cap 3 exceeded");
  }

  Explorer shallow(eng, ExplorerOptions{.max_depth = 2});
  try {
    shallow.check_reaches("main", {}, parse_cond_text("done == 1"));
    FAIL("expected a limit fault");
  } catch (const LimitFault& f) {
    CHECK(std::string(f.what()) == "witness-length cap 2 exceeded");
  }
}

TEST_CASE("explorer: replay accepts the recorded path") {
  Model m = parse_model(slurp(sample("models/counter.gmc")));
  Engine eng(m);
  Explorer ex(eng);
  ReplayVerdict v = ex.replay("main", {}, {"tick", "tick", "tick", "fin"});
  CHECK(v.accepted);
  CHECK(v.steps.size() == 4);
  CHECK(v.steps[0].post_vals == std::vector<Int>{1, 0});
  CHECK(v.final_vals == std::vector<Int>{3, 1});
}

TEST_CASE("explorer: replay rejections name the failure") {
  Model m = parse_model(slurp(sample("models/counter.gmc")));
  Engine eng(m);
  Explorer ex(eng);
  ReplayVerdict v = ex.replay("main", {}, {"tick", "tick", "boom"});
  CHECK_FALSE(v.accepted);
  CHECK(v.reject_index == 2);
  CHECK(v.reason == ReplayReason::NoSuchLabel);
  CHECK(v.message == "no enabled step labelled 'boom'");
  CHECK(v.steps.size() == 2);

  Model am = parse_model(
      "var x:{0..9} = 0;\nP() = a{x = 1;} -> Stop [] a{x = 2;} -> Stop;\n");
  Engine ae(am);
  Explorer ax(ae);
  ReplayVerdict v2 = ax.replay("P", {}, {"a"});
  CHECK_FALSE(v2.accepted);
  CHECK(v2.reject_index == 0);
  CHECK(v2.reason == ReplayReason::Ambiguous);
  CHECK(v2.message == "label 'a' is ambiguous here");

  Model fm = parse_model("var c:{0..3} = 0;\nP() = a{c = c + 10;} -> Stop;\n");
  Engine fe(fm);
  Explorer fx(fe);
  ReplayVerdict v3 = fx.replay("P", {}, {"a"});
  CHECK_FALSE(v3.accepted);
  CHECK(v3.reason == ReplayReason::Fault);
  CHECK(v3.message == "range fault: c = 10 outside {0..3}");
}

TEST_CASE("explorer: check kind names") {
  CHECK(std::string(check_kind_name(CheckKind::Reachable)) == "Reachable");
  CHECK(std::string(check_kind_name(CheckKind::Unreachable)) == "Unreachable");
  CHECK(std::string(check_kind_name(CheckKind::Optimal)) == "Optimal");
  CHECK(std::string(check_kind_name(CheckKind::SafetyHolds)) == "SafetyHolds");
  CHECK(std::string(check_kind_name(CheckKind::SafetyViolated)) ==
        "SafetyViolated");
  CHECK(std::string(check_kind_name(CheckKind::DeadlockFound)) ==
        "DeadlockFound");
  CHECK(std::string(check_kind_name(CheckKind::DeadlockFreeOk)) ==
        "DeadlockFreeOk");
}
