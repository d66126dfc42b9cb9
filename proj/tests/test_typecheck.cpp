#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wb/parser.hpp"
#include "wb/printer.hpp"
#include "wb/typecheck.hpp"

using namespace wb;

static TypecheckResult tc(Calculus c, const std::string& src,
                          const std::vector<std::pair<std::string, std::string>>& free = {}) {
  TypeCtx g;
  for (const auto& [n, t] : free) g[Name{n}] = parse_type(t);
  return typecheck(c, g, parse_term(src, c));
}

TEST_CASE("the mixed-choice pair with unrestricted types") {
  const char* pm =
      "(new x y : un+{l!bool.end, l?bool.end})"
      "(lin x (l!true.0 + l?(z).0) | lin x (l!false.0 + l?(z).0) | "
      "lin y (l?(z).0 + l!true.0) | lin y (l?(z).0 + l!false.0))";
  auto r = tc(Calculus::CmvPlus, pm);
  REQUIRE(r.ok);
  REQUIRE(r.deriv);
  CHECK(r.deriv->rule == "T-Res");
  CHECK(type_equiv(r.deriv->type, parse_type("un+{l!bool.end, l?bool.end}")));
  CHECK(dual(r.deriv->type, dualize(r.deriv->type)));
  REQUIRE(r.deriv->premises.size() == 1);
  const DerivPtr& par = r.deriv->premises[0];
  CHECK(par->rule == "T-Par");
  REQUIRE(par->premises.size() == 4);
  for (const DerivPtr& d : par->premises) {
    CHECK(d->rule == "T-Choice");
    CHECK(d->premises.size() == 3);  // subject + two branches
  }
  std::string why;
  CHECK(validate_deriv(r.deriv, &why));
  std::string js = deriv_json(r.deriv, Calculus::CmvPlus);
  CHECK(js.find("\"T-Choice\"") != std::string::npos);
  CHECK(js.find("\"T-True\"") != std::string::npos);
}

TEST_CASE("linear choices with inferred restriction types") {
  auto r = tc(Calculus::CmvPlus, "(new x y)(lin x (l!true) | lin y (l?(z)))");
  CHECK(r.ok);
  auto r2 = tc(Calculus::CmvPlus,
               "(new x y)(lin x (l!true.0 + m?(w).0) | lin y (l?(z).0 + m!false.0))");
  CHECK(r2.ok);
}

TEST_CASE("linear discipline violations") {
  // a linear endpoint may not be shared by two components
  auto dup = tc(Calculus::CmvPlus,
                "(new x y : lin+{l!bool.end})"
                "(lin x (l!true) | lin x (l!true) | lin y (l?(z)))");
  CHECK(!dup.ok);
  // and may not be dropped
  auto drop = tc(Calculus::CmvPlus, "(new x y : lin+{l!bool.end}) lin y (l?(z))",
                 {});
  CHECK(!drop.ok);
  // a received linear value must be consumed
  auto leak = tc(Calculus::CmvPlus,
                 "(new x y : lin+{l!(lin+{m!bool.end}).end})"
                 "(lin x (l!w) | lin y (l?(z).0))",
                 {{"w", "lin+{m!bool.end}"}});
  CHECK(!leak.ok);
  auto used = tc(Calculus::CmvPlus,
                 "(new x y : lin+{l!(lin+{m!bool.end}).end})"
                 "(lin x (l!w) | lin y (l?(z).lin z (m!true)))",
                 {{"w", "lin+{m!bool.end}"}});
  CHECK(used.ok);
}

TEST_CASE("unrestricted choices may not capture linear resources") {
  auto bad = tc(Calculus::CmvPlus,
                "(new x y : un+{l!bool.end})"
                "(un x (l!true.lin a (m!true)) | lin y (l?(z)))",
                {{"a", "lin+{m!bool.end}"}});
  CHECK(!bad.ok);
  CHECK(bad.error.find("unrestricted") != std::string::npos);
}

TEST_CASE("conditional branches must agree on resources") {
  auto bad = tc(Calculus::CmvPlus,
                "(new x y : lin+{l!bool.end})"
                "((if c then lin x (l!true) else 0) | lin y (l?(z)))",
                {{"c", "bool"}});
  CHECK(!bad.ok);
  auto good = tc(Calculus::CmvPlus,
                 "(new x y : lin+{l!bool.end})"
                 "((if c then lin x (l!true) else lin x (l!false)) | lin y (l?(z)))",
                 {{"c", "bool"}});
  CHECK(good.ok);
}

TEST_CASE("choice branches must match the subject type") {
  auto missing = tc(Calculus::CmvPlus,
                    "(new x y : un+{l!bool.end, l?bool.end})"
                    "(lin x (l!true) | lin y (l?(z)))");
  CHECK(!missing.ok);  // branch sets differ from the type
  auto wrongpay = tc(Calculus::CmvPlus,
                     "(new x y : lin+{l!bool.end})(lin x (l!()) | lin y (l?(z)))");
  CHECK(!wrongpay.ok);
}

TEST_CASE("cmv communication typing") {
  auto lin = tc(Calculus::Cmv, "(new x y : lin!bool.end)(x!true | lin y?z.0)");
  CHECK(lin.ok);
  auto un = tc(Calculus::Cmv,
               "(new x y : rec t.un!bool.t)(x!true.x!false | un y?z.0)");
  CHECK(un.ok);
  auto wrong = tc(Calculus::Cmv, "(new x y : lin!bool.end)(x!() | lin y?z.0)");
  CHECK(!wrong.ok);
  // an unrestricted input may not consume linear resources
  auto cap = tc(Calculus::Cmv,
                "(new x y : rec t.un!bool.t)(x!true | un y?z.a!true)",
                {{"a", "lin!bool.end"}});
  CHECK(!cap.ok);
}

TEST_CASE("cmv selection and branching") {
  auto ok = tc(Calculus::Cmv,
               "(new x y : lin+{a: end, b: end})(x<+a | y>>{a: 0, b: 0})");
  CHECK(ok.ok);
  auto chain = tc(Calculus::Cmv,
                  "(new x y : lin+{a: lin!bool.end, b: end})"
                  "(x<+a.x!true | y>>{a: lin y?z.0, b: 0})");
  CHECK(chain.ok);
  auto missing = tc(Calculus::Cmv,
                    "(new x y : lin+{a: end})(x<+b | y>>{a: 0})");
  CHECK(!missing.ok);
}

TEST_CASE("value typing uses subsumption") {
  // w offers {a,b}; sending it where only {a} is promised is fine
  auto r = tc(Calculus::Cmv, "x!w.0",
              {{"x", "lin!(lin+{a: end}).end"}, {"w", "lin+{a: end, b: end}"}});
  CHECK(r.ok);
  auto bad = tc(Calculus::Cmv, "x!w.0",
                {{"x", "lin!(lin+{a: end, b: end}).end"}, {"w", "lin+{a: end}"}});
  CHECK(!bad.ok);
}

TEST_CASE("fragments are kept apart") {
  CHECK(!typecheck(Calculus::Pi, {}, parse_term("a!", Calculus::Pi)).ok);
  auto r = tc(Calculus::Cmv, "x!true.0", {{"x", "un+{l!bool.end}"}});
  CHECK(!r.ok);  // cmv prefix on a mixed-choice type
}
