#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wb/encode.hpp"
#include "wb/equiv.hpp"
#include "wb/parser.hpp"
#include "wb/syntax.hpp"

using namespace wb;

static TermPtr cm(const std::string& s) { return parse_term(s, Calculus::Cmv); }

static Lts ex(const TermPtr& t, Calculus c = Calculus::Cmv) {
  return explore(t, c, 64, 4096);
}

TEST_CASE("weak bisimilarity is reflexive") {
  for (const char* s : {"0", "b!true.0", "(new s t)(s>>{l: a!true} | t<+l)",
                        "x!true.y!false | lin z?w.0"}) {
    Lts l = ex(cm(s));
    CHECK(weak_bisim(l, l).verdict == Verdict::Related);
    CHECK(coupled_sim(l, l).verdict == Verdict::Related);
  }
}

TEST_CASE("stuck barb-free junk is invisible") {
  Lts a = ex(cm("b!true.0"));
  Lts b = ex(cm("b!true.0 | (new s t)(t<+l)"));
  CHECK(weak_bisim(a, b).verdict == Verdict::Related);
  CHECK(coupled_sim(a, b).verdict == Verdict::Related);
}

TEST_CASE("barbs only see the subject") {
  Lts a = ex(cm("y!true.0"));
  Lts b = ex(cm("y!false.0"));
  CHECK(weak_bisim(a, b).verdict == Verdict::Related);

  Lts c = ex(cm("z!true.0"));
  RelationResult r = weak_bisim(a, c);
  CHECK(r.verdict == Verdict::NotRelated);
  CHECK(r.witness.find("weak-barb-mismatch") != std::string::npos);

  RelationResult rc = coupled_sim(a, c);
  CHECK(rc.verdict == Verdict::NotRelated);
  CHECK(rc.witness.find("weak-barb-not-included") != std::string::npos);
}

TEST_CASE("gradual commitment separates bisimilarity from coupled similarity") {
  NameGen g1, g2;
  std::vector<TermPtr> opts = {cm("b1!true.0"), cm("b2!true.0"),
                               cm("b3!true.0")};
  TermPtr flat = nd_choice(opts, g1);
  TermPtr inner = nd_choice({opts[1], opts[2]}, g2);
  TermPtr staged = nd_choice({opts[0], inner}, g2);

  Lts la = ex(flat), lb = ex(staged);
  CHECK(la.complete);
  CHECK(lb.complete);

  RelationResult wb_res = weak_bisim(la, lb);
  CHECK(wb_res.verdict == Verdict::NotRelated);
  // the half-committed state of the staged process has no counterpart
  CHECK(wb_res.witness.find("unmatched-move") != std::string::npos);

  CHECK(coupled_sim(la, lb).verdict == Verdict::Related);
  CHECK(coupled_sim(lb, la).verdict == Verdict::Related);
}

TEST_CASE("weak bisimilarity implies coupled similarity") {
  std::vector<std::pair<const char*, const char*>> pairs = {
      {"b!true.0", "b!true.0 | (new s t)(t<+l)"},
      {"y!true.0", "y!false.0"},
      {"(new s t)(s>>{l: a!true} | t<+l)", "a!true.0"},
  };
  for (auto& [s1, s2] : pairs) {
    Lts a = ex(cm(s1)), b = ex(cm(s2));
    REQUIRE(weak_bisim(a, b).verdict == Verdict::Related);
    CHECK(coupled_sim(a, b).verdict == Verdict::Related);
    CHECK(coupled_sim(b, a).verdict == Verdict::Related);
  }
}

TEST_CASE("relation pairs are reported") {
  Lts a = ex(cm("(new s t)(s>>{l: a!true} | t<+l)"));
  Lts b = ex(cm("a!true.0"));
  RelationResult r = weak_bisim(a, b);
  REQUIRE(r.verdict == Verdict::Related);
  CHECK(!r.relation.empty());
  bool has_root = false;
  for (auto& [i, j] : r.relation)
    if (i == 0 && j == 0) has_root = true;
  CHECK(has_root);
}

TEST_CASE("incomplete explorations stay unknown") {
  Lts a = explore(cm("(new s t)(s>>{l: a!true} | t<+l)"), Calculus::Cmv, 64, 1);
  CHECK(!a.complete);
  Lts b = ex(cm("a!true.0"));
  CHECK(weak_bisim(a, b).verdict == Verdict::UnknownBounded);
  CHECK(weak_bisim(b, a).verdict == Verdict::UnknownBounded);
  CHECK(coupled_sim(a, b).verdict == Verdict::UnknownBounded);
}
