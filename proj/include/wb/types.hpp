#ifndef WB_TYPES_HPP
#define WB_TYPES_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wb/term.hpp"

namespace wb {

// Session types for CMV+ (mixed choice types) and CMV (communication and
// plain choice types), with equi-recursion.
struct TypeNode;
using TypePtr = std::shared_ptr<const TypeNode>;

enum class TKind { End, UnitT, BoolT, Var, Rec, Mix, Com, Plain };
enum class View { Internal, External };  // + (internal) / & (external)

inline const char* to_string(View v) { return v == View::Internal ? "+" : "&"; }

struct MixTBranch {
  Label label;
  Pol pol = Pol::Send;
  TypePtr payload;
  TypePtr cont;
};

struct TypeNode {
  TKind kind = TKind::End;
  Name tvar;          // Var, Rec
  TypePtr rec_body;   // Rec
  Qual qual = Qual::Lin;
  View view = View::Internal;  // Mix, Plain
  Pol pol = Pol::Send;         // Com
  TypePtr payload, cont;       // Com
  std::vector<MixTBranch> mix;                     // Mix
  std::vector<std::pair<Label, TypePtr>> plain;    // Plain

  static TypePtr end();
  static TypePtr unit();
  static TypePtr boolean();
  static TypePtr var(Name t);
  static TypePtr rec(Name t, TypePtr body);
  static TypePtr mix_choice(Qual q, View v, std::vector<MixTBranch> bs);
  static TypePtr com(Qual q, Pol p, TypePtr payload, TypePtr cont);
  static TypePtr plain_choice(Qual q, View v,
                              std::vector<std::pair<Label, TypePtr>> arms);
};

std::string print_type(const TypePtr& t);

// structural helpers
bool contractive(const TypePtr& t);
TypePtr unfold(const TypePtr& t);  // removes top-level rec binders

// coinductive relations
bool type_equiv(const TypePtr& a, const TypePtr& b);
bool dual(const TypePtr& a, const TypePtr& b);
// Dualization of the session structure; throws std::runtime_error on
// non-session shapes (base types are only legal in payload positions).
TypePtr dualize(const TypePtr& t);
bool subtype(const TypePtr& a, const TypePtr& b);
bool un_type(const TypePtr& t);

// typing contexts
using TypeCtx = std::map<Name, TypePtr>;
bool un_ctx(const TypeCtx& g);
std::string print_ctx(const TypeCtx& g);

// All splits Γ = Γ1 ∘ Γ2 (un entries shared, lin entries to one side).
std::vector<std::pair<TypeCtx, TypeCtx>> ctx_split(const TypeCtx& g);
// Γ + x:T; nullopt when undefined.
std::optional<TypeCtx> ctx_add(const TypeCtx& g, const Name& x, const TypePtr& t);

}  // namespace wb

#endif
