#ifndef WB_SYNTAX_HPP
#define WB_SYNTAX_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wb/term.hpp"

namespace wb {

// Substitution of names by values.  For channel/endpoint positions the image
// must be a name; substituting a non-name value there is a usage error.
using Subst = std::map<Name, Value>;

Subst name_subst(const std::map<Name, Name>& m);

NameSet free_names(const TermPtr& t);
NameSet free_names(const ExprPtr& e);
NameSet free_names(const Value& v);

TermPtr apply_subst(const TermPtr& t, const Subst& sigma);
ExprPtr apply_subst(const ExprPtr& e, const Subst& sigma);
Value apply_subst(const Value& v, const Subst& sigma);

// Deterministic serialization.  With `nameless` set, bound names are printed
// as scope-relative tokens, making the key invariant under alpha-conversion.
std::string term_key(const TermPtr& t, bool nameless);

bool alpha_eq(const TermPtr& a, const TermPtr& b);

// Canonical form modulo structural congruence (without replication
// unfolding): parallel multisets flattened and sorted, 0 dropped,
// restrictions hoisted and ordered, unused restrictions dropped, binders
// renamed to b0, b1, ... in traversal order.
TermPtr canonicalize(const TermPtr& t);

// Same normal form as canonicalize but keeping the original binder names
// (only clashing binders are freshened).  Used where step provenance must
// survive, e.g. when enumerating reductions of an explored state.
TermPtr struct_norm(const TermPtr& t);

// Serialized canonical form; equal strings iff structurally congruent.
std::string canonical_key(const TermPtr& t);

struct Subterm {
  std::string path;  // "" is the root; child steps separated by '/'
  TermPtr term;
  bool guarded;  // under an action prefix or conditional
};

std::vector<Subterm> subterms(const TermPtr& t);

// Renames binders apart from each other, from the free names of the term, and
// from `avoid`.  The result is alpha-equivalent to the input.
TermPtr uniquify_binders(const TermPtr& t, const NameSet& avoid = {});

}  // namespace wb

#endif
