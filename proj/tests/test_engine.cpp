#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wb/engine.hpp"
#include "wb/parser.hpp"
#include "wb/printer.hpp"
#include "wb/syntax.hpp"

using namespace wb;

static TermPtr pi(const std::string& s) { return parse_term(s, Calculus::Pi); }
static TermPtr cp(const std::string& s) { return parse_term(s, Calculus::CmvPlus); }
static TermPtr cm(const std::string& s) { return parse_term(s, Calculus::Cmv); }

static bool reaches(const TermPtr& from, const TermPtr& to, Calculus c) {
  std::string want = canonical_key(to);
  for (const Step& s : enumerate_steps(from, c))
    if (canonical_key(s.target) == want) return true;
  return false;
}

TEST_CASE("pi communication and tau") {
  auto steps = enumerate_steps(pi("a!<v>.P! | a?(x).x!<x>"), Calculus::Pi);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].label.kind == StepKind::PiCom);
  CHECK(canonical_key(steps[0].target) == canonical_key(pi("P! | v!<v>")));

  auto taus = enumerate_steps(pi("tau.a! + b?.c!"), Calculus::Pi);
  REQUIRE(taus.size() == 1);
  CHECK(taus[0].label.kind == StepKind::PiTau);
  CHECK(canonical_key(taus[0].target) == canonical_key(pi("a!")));

  // both choices are consumed whole
  auto race = enumerate_steps(pi("a!<v>.P! + b!<w>.Q! | a?(x) | b?(y)"), Calculus::Pi);
  CHECK(race.size() == 2);
  for (const Step& s : race) CHECK(s.label.consumed.size() == 2);
  CHECK(race[0].label.conflicts(race[1].label));

  CHECK(enumerate_steps(pi("a!<v> | b?(x)"), Calculus::Pi).empty());
}

TEST_CASE("scope is no obstacle inside one region") {
  CHECK(reaches(pi("(nu a)(a!<v> | a?(x).x!)"), pi("(nu a) v!"), Calculus::Pi));
  // extruded form reduces identically
  CHECK(reaches(pi("a?(x).x! | (nu v) a!<v>.v?"), pi("(nu v)(v! | v?)"),
                Calculus::Pi));
}

TEST_CASE("replication unfolds lazily") {
  auto steps = enumerate_steps(pi("!(a!<v>) | a?(x).x!"), Calculus::Pi);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].label.consumed[0].replicated !=
        steps[0].label.consumed[1].replicated);
  CHECK(canonical_key(steps[0].target) == canonical_key(pi("!(a!<v>) | v!")));

  // a replicated process can meet a second copy of itself
  auto self = enumerate_steps(pi("!(a!<v>.0 + a?(x).x!)"), Calculus::Pi);
  REQUIRE(self.size() == 1);
  CHECK(canonical_key(self[0].target) ==
        canonical_key(pi("!(a!<v>.0 + a?(x).x!) | v!")));
  CHECK(!self[0].label.conflicts(self[0].label));  // replication never conflicts

  // steps under a restriction inside the replication body
  auto inner = enumerate_steps(pi("!((nu k)(k!<v> | k?(x)))"), Calculus::Pi);
  CHECK(inner.size() == 1);
}

TEST_CASE("cmv+ mixed synchronization needs a session restriction") {
  CHECK(enumerate_steps(cp("lin x (l!true) | lin y (l?(z))"), Calculus::CmvPlus)
            .empty());
  auto steps = enumerate_steps(
      cp("(new x y)(lin x (l!true) | lin y (l?(z)))"), Calculus::CmvPlus);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].label.kind == StepKind::MixCom);
  CHECK(canonical_key(steps[0].target) == canonical_key(cp("0")));
}

TEST_CASE("cmv+ qualifiers drive persistence") {
  // R-LinUn: the unrestricted receiver survives
  auto linun = enumerate_steps(
      cp("(new x y)(lin x (l!true) | un y (l?(z).un a (m!z)))"), Calculus::CmvPlus);
  REQUIRE(linun.size() == 1);
  CHECK(canonical_key(linun[0].target) ==
        canonical_key(cp("(new x y)(un a (m!true) | un y (l?(z).un a (m!z)))")));

  // R-UnUn: both survive
  auto unun = enumerate_steps(
      cp("(new x y)(un x (l!true.un a (m!true)) | un y (l?(z)))"), Calculus::CmvPlus);
  REQUIRE(unun.size() == 1);
  CHECK(canonical_key(unun[0].target) ==
        canonical_key(cp("(new x y)(un x (l!true.un a (m!true)) | un y (l?(z)) "
                         "| un a (m!true))")));

  // same label required, polarities must meet
  CHECK(enumerate_steps(cp("(new x y)(lin x (l!true) | lin y (m?(z)))"),
                        Calculus::CmvPlus)
            .empty());
  CHECK(enumerate_steps(cp("(new x y)(lin x (l!true) | lin y (l!false))"),
                        Calculus::CmvPlus)
            .empty());
}

TEST_CASE("cmv communication, case and conditionals") {
  auto lin = enumerate_steps(cm("(new x y)(x!true | lin y?z.a!z)"), Calculus::Cmv);
  REQUIRE(lin.size() == 1);
  CHECK(lin[0].label.kind == StepKind::LinCom);
  CHECK(canonical_key(lin[0].target) == canonical_key(cm("a!true")));

  auto un = enumerate_steps(cm("(new x y)(x!true | un y?z.a!z)"), Calculus::Cmv);
  REQUIRE(un.size() == 1);
  CHECK(un[0].label.kind == StepKind::UnCom);
  CHECK(canonical_key(un[0].target) ==
        canonical_key(cm("(new x y)(a!true | un y?z.a!z)")));

  auto cs = enumerate_steps(cm("(new x y)(x<+l.a!true | y>>{l: b!true, m: 0})"),
                            Calculus::Cmv);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].label.kind == StepKind::Case);
  CHECK(canonical_key(cs[0].target) == canonical_key(cm("a!true | b!true")));

  auto iff = enumerate_steps(cm("if true and not false then a!true else b!true"),
                             Calculus::Cmv);
  REQUIRE(iff.size() == 1);
  CHECK(iff[0].label.kind == StepKind::IfTrue);
  CHECK(canonical_key(iff[0].target) == canonical_key(cm("a!true")));
  // a free variable blocks evaluation
  CHECK(enumerate_steps(cm("if c then a!true else 0"), Calculus::Cmv).empty());
}

TEST_CASE("barbs") {
  auto b = barbs(pi("a!<v> | b?(x) | (nu k)(k! | c!)"), Calculus::Pi);
  CHECK(b == std::set<std::string>{"~a", "b", "~c"});
  CHECK(barbs(pi("tau.a!"), Calculus::Pi).empty());
  CHECK(barbs(pi("!(a!)"), Calculus::Pi) == std::set<std::string>{"~a"});
  auto s = barbs(cp("(new x y)(lin x (l!true) | un a (m?(z)))"), Calculus::CmvPlus);
  CHECK(s == std::set<std::string>{"a"});
  auto c = barbs(cm("x!true | y>>{l: 0}"), Calculus::Cmv);
  CHECK(c == std::set<std::string>{"x", "y"});
}

TEST_CASE("exploration") {
  Lts l = explore(pi("a!<v> | a?(x).(b! | c!)"), Calculus::Pi, 10, 100);
  CHECK(l.complete);
  CHECK(l.states.size() == 2);
  CHECK(l.edges.size() == 1);
  CHECK(l.states[1].barbs == std::set<std::string>{"~b", "~c"});

  // diamond: two independent communications commute
  Lts d = explore(pi("a! | a? | b! | b?"), Calculus::Pi, 10, 100);
  CHECK(d.complete);
  CHECK(d.states.size() == 4);
  CHECK(d.edges.size() == 4);

  // an unbounded system hits the state bound
  Lts u = explore(pi("!(a?(x).(a!<x> | a!<x>)) | a!<v>"), Calculus::Pi, 50, 30);
  CHECK(!u.complete);

  std::string js = lts_json(d);
  CHECK(js.find("\"complete\":true") != std::string::npos);
  CHECK(js.find("\"consumed\"") != std::string::npos);
  CHECK(lts_dot(d).find("digraph") != std::string::npos);
}

TEST_CASE("a five-station ring elects exactly one leader") {
  const char* ring =
      "(nu a)(nu b)(nu c)(nu d)(nu e)(nu v)(nu w)(nu x)(nu y)(nu z)("
      "e! + a?.(x! + v?.1!) | "
      "a! + b?.(y! + w?.2!) | "
      "b! + c?.(z! + x?.3!) | "
      "c! + d?.(v! + y?.4!) | "
      "d! + e?.(w! + z?.5!))";
  Lts l = explore(pi(ring), Calculus::Pi, 20, 1000);
  CHECK(l.complete);
  CHECK(l.out[0].size() == 5);
  std::set<std::string> leaders;
  for (size_t i = 0; i < l.states.size(); ++i) {
    if (!l.out[i].empty()) continue;
    std::set<std::string> numerals;
    for (const std::string& b : l.states[i].barbs)
      if (b.size() > 1 && b[0] == '~' && isdigit((unsigned char)b[1]))
        numerals.insert(b);
    CHECK(numerals.size() == 1);  // exactly one elected leader per outcome
    leaders.insert(*numerals.begin());
  }
  CHECK(leaders == std::set<std::string>{"~1", "~2", "~3", "~4", "~5"});
}
