#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wb/parser.hpp"
#include "wb/printer.hpp"
#include "wb/syntax.hpp"

using namespace wb;

static TermPtr pi(const std::string& s) { return parse_term(s, Calculus::Pi); }
static TermPtr cp(const std::string& s) { return parse_term(s, Calculus::CmvPlus); }
static TermPtr cm(const std::string& s) { return parse_term(s, Calculus::Cmv); }

TEST_CASE("free names") {
  auto names = [](const TermPtr& t) {
    std::string out;
    for (const Name& n : free_names(t)) out += n.text + " ";
    return out;
  };
  CHECK(names(pi("a!<v>.b?(x).x!<w>")) == "a b v w ");
  CHECK(names(pi("(nu a) a!<v> | a?(x)")) == "v ");
  CHECK(names(pi("((nu a) a!<v>) | a?(x)")) == "a v ");
  CHECK(names(cp("(new x y) lin x (l!true.0 + l?(z).lin z (m!true))")) == "");
  CHECK(names(cp("lin x (l?(z).lin w (m!z))")) == "w x ");
  CHECK(names(cm("lin y?z.if z then a!true else 0")) == "a y ");
  CHECK(names(pi("!(a?(x).x!<x>)")) == "a ");
}

TEST_CASE("substitution avoids capture") {
  // {y/x} into (nu y) x!<x> must not capture the free x under the binder
  TermPtr t = pi("(nu y)(x!<x>.y!<v>)");
  TermPtr s = apply_subst(t, name_subst({{Name{"x"}, Name{"y"}}}));
  NameSet fn = free_names(s);
  CHECK(fn.count(Name{"y"}));
  CHECK(fn.count(Name{"v"}));
  CHECK(!fn.count(Name{"x"}));
  // the binder was renamed away from y
  CHECK(s->op == Op::ResPi);
  CHECK(s->n1 != Name{"y"});
}

TEST_CASE("substitution respects shadowing") {
  TermPtr t = pi("a?(x).x!<w> | x!<w>");
  TermPtr s = apply_subst(t, name_subst({{Name{"x"}, Name{"z"}}}));
  CHECK(print_term(s, Calculus::Pi) == "a?(x).x!<w> | z!<w>");
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_eq(pi("(nu a) a!<v>"), pi("(nu b) b!<v>")));
  CHECK(alpha_eq(pi("c?(x).x!<x>"), pi("c?(y).y!<y>")));
  CHECK(!alpha_eq(pi("(nu a) a!<v>"), pi("(nu b) b!<w>")));
  CHECK(!alpha_eq(pi("c?(x).x!"), pi("c?(y).c!")));
  CHECK(alpha_eq(cp("(new x y) lin x (l!true)"), cp("(new a b) lin a (l!true)")));
  CHECK(!alpha_eq(cp("(new x y) lin x (l!true)"), cp("(new a b) lin b (l!true)")));
}

TEST_CASE("structural congruence axioms") {
  auto cong = [](const TermPtr& a, const TermPtr& b) {
    return canonical_key(a) == canonical_key(b);
  };
  CHECK(cong(pi("a! | 0"), pi("a!")));
  CHECK(cong(pi("a! | b!"), pi("b! | a!")));
  CHECK(cong(pi("(a! | b!) | c!"), pi("a! | (b! | c!)")));
  CHECK(cong(pi("(nu x) 0"), pi("0")));
  CHECK(cong(pi("(nu x)(nu y) x!<y>"), pi("(nu y)(nu x) x!<y>")));
  CHECK(cong(pi("(nu x)(a! | x?(z))"), pi("a! | (nu x) x?(z)")));
  CHECK(cong(pi("a!.P! + b?.Q!"), pi("b?.Q! + a!.P!")));
  CHECK(cong(cp("(new x y) lin x (l!true)"), cp("(new y x) lin x (l!true)")));
  CHECK(cong(cp("(new x y)(un a (l!true) | lin x (l!true.0 + l?(z).0))"),
             cp("un a (l!true) | (new x y) lin x (l?(z).0 + l!true.0)")));
  // non-congruent pairs stay apart
  CHECK(!cong(pi("a!"), pi("a?")));
  CHECK(!cong(pi("((nu x) x!) | x?"), pi("(nu x)(x! | x?)")));
  CHECK(!cong(pi("!a!"), pi("a! | !a!")));  // replication is not unfolded
}

// ---------------------------------------------------------------------------
// randomized congruence closure: assemble the same components and binders in
// many structurally congruent ways and demand one canonical form
// ---------------------------------------------------------------------------

namespace {

struct Gen {
  std::mt19937 rng;
  std::vector<Name> pool = {Name{"a"}, Name{"b"}, Name{"k"}, Name{"m"}, Name{"n"}};

  explicit Gen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  Name name() { return pool[pick(static_cast<int>(pool.size()))]; }

  TermPtr prefix_chain(int depth) {
    if (depth <= 0 || pick(4) == 0) return Term::inact();
    PiPrefix p;
    switch (pick(3)) {
      case 0:
        p.kind = PiPrefix::Kind::Out;
        p.channel = name();
        p.arg = name();
        break;
      case 1:
        p.kind = PiPrefix::Kind::In;
        p.channel = name();
        p.arg = name();
        break;
      default:
        p.kind = PiPrefix::Kind::Tau;
        break;
    }
    return Term::pi_sum({PiBranch{p, prefix_chain(depth - 1)}});
  }

  TermPtr component(int depth) {
    switch (pick(3)) {
      case 0: {
        std::vector<PiBranch> bs;
        int n = 1 + pick(3);
        for (int i = 0; i < n; ++i) {
          TermPtr c = prefix_chain(depth);
          if (c->op == Op::PiSum) bs.push_back(c->pi_branches[0]);
        }
        if (bs.empty()) return prefix_chain(depth);
        return Term::pi_sum(std::move(bs));
      }
      case 1:
        return Term::bang(prefix_chain(depth - 1));
      default:
        return prefix_chain(depth);
    }
  }

  // assemble binders and components into one congruent arrangement
  TermPtr assemble(std::vector<Name> binders, std::vector<TermPtr> comps) {
    if (binders.empty()) return par_tree(comps);
    int bi = pick(static_cast<int>(binders.size()));
    Name x = binders[bi];
    binders.erase(binders.begin() + bi);
    std::vector<TermPtr> outside, inside;
    for (const TermPtr& c : comps) {
      // a component may float outside only if it touches none of the binders
      // that are still to be placed
      NameSet fn = free_names(c);
      bool uses_pending = fn.count(x) > 0;
      for (const Name& b : binders) uses_pending = uses_pending || fn.count(b);
      if (!uses_pending && pick(2) == 0)
        outside.push_back(c);
      else
        inside.push_back(c);
    }
    TermPtr core = Term::res_pi(x, assemble(std::move(binders), std::move(inside)));
    outside.push_back(core);
    std::shuffle(outside.begin(), outside.end(), rng);
    return par_tree(outside);
  }

  TermPtr par_tree(std::vector<TermPtr> comps) {
    if (pick(3) == 0) comps.push_back(Term::inact());
    std::shuffle(comps.begin(), comps.end(), rng);
    if (comps.empty()) return Term::inact();
    while (comps.size() > 1) {
      // merge a random adjacent pair into a nested Par to vary associativity
      int i = pick(static_cast<int>(comps.size()) - 1);
      TermPtr merged = Term::par({comps[i], comps[i + 1]});
      comps[i] = merged;
      comps.erase(comps.begin() + i + 1);
    }
    return comps[0];
  }
};

}  // namespace

TEST_CASE("canonical form closes the congruence axioms (randomized)") {
  Gen g(20240817);
  int done = 0;
  for (int round = 0; round < 250; ++round) {
    std::vector<TermPtr> comps;
    int nc = 1 + g.pick(4);
    for (int i = 0; i < nc; ++i) comps.push_back(g.component(3));
    std::vector<Name> binders;
    int nb = g.pick(3);
    for (int i = 0; i < nb; ++i) binders.push_back(g.name());
    std::sort(binders.begin(), binders.end());
    binders.erase(std::unique(binders.begin(), binders.end()), binders.end());

    std::string first;
    for (int v = 0; v < 5; ++v) {
      TermPtr t = g.assemble(binders, comps);
      std::string key = canonical_key(t);
      if (v == 0)
        first = key;
      else
        REQUIRE(key == first);
      ++done;
    }
  }
  CHECK(done == 1250);
}

TEST_CASE("canonicalize is idempotent") {
  Gen g(7);
  for (int round = 0; round < 200; ++round) {
    std::vector<TermPtr> comps;
    for (int i = 0; i < 1 + g.pick(3); ++i) comps.push_back(g.component(3));
    TermPtr t = g.assemble({g.name()}, comps);
    TermPtr c1 = canonicalize(t);
    TermPtr c2 = canonicalize(c1);
    REQUIRE(term_key(c1, false) == term_key(c2, false));
  }
}

TEST_CASE("canonicalization commutes with injective renaming") {
  Gen g(99);
  for (int round = 0; round < 100; ++round) {
    std::vector<TermPtr> comps;
    for (int i = 0; i < 1 + g.pick(3); ++i) comps.push_back(g.component(3));
    TermPtr t = g.assemble({}, comps);
    // injective renaming of the free names
    std::map<Name, Name> ren;
    ren[Name{"a"}] = Name{"r1"};
    ren[Name{"b"}] = Name{"r2"};
    ren[Name{"k"}] = Name{"r3"};
    ren[Name{"m"}] = Name{"r4"};
    ren[Name{"n"}] = Name{"r5"};
    TermPtr rt = apply_subst(t, name_subst(ren));
    TermPtr c = canonicalize(t);
    TermPtr rc = apply_subst(c, name_subst(ren));
    CHECK(canonical_key(rt) == canonical_key(rc));
  }
}

TEST_CASE("subterms and guardedness") {
  TermPtr t = pi("a?(x).(b! | c!) | (nu k) k!");
  auto subs = subterms(t);
  bool found_guarded_par = false, found_res_body = false;
  for (const Subterm& s : subs) {
    if (s.term->op == Op::Par && s.guarded && !s.path.empty())
      found_guarded_par = true;
    if (s.term->op == Op::PiSum && !s.guarded && s.path.find('b') != std::string::npos)
      found_res_body = true;
  }
  CHECK(found_guarded_par);
  CHECK(found_res_body);
}

TEST_CASE("uniquify_binders renames clashes only") {
  TermPtr t = pi("((nu x) x!<v>) | (nu x) x?(z)");
  TermPtr u = uniquify_binders(t);
  CHECK(alpha_eq(t, u));
  // the two binders now differ
  CHECK(u->op == Op::Par);
  CHECK(u->children[0]->n1 != u->children[1]->n1);
}
