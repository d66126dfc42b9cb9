#ifndef WB_TERM_HPP
#define WB_TERM_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wb/names.hpp"

namespace wb {

enum class Calculus { Pi, CmvPlus, Cmv };

std::string to_string(Calculus c);
std::optional<Calculus> calculus_from_string(const std::string& s);

enum class Qual { Lin, Un };
enum class Pol { Send, Recv };

inline const char* to_string(Qual q) { return q == Qual::Lin ? "lin" : "un"; }
inline const char* to_string(Pol p) { return p == Pol::Send ? "!" : "?"; }

using Label = std::string;

// ---------------------------------------------------------------------------
// Values and boolean expressions
// ---------------------------------------------------------------------------

struct Value {
  enum class Kind { NameRef, True, False, Unit };
  Kind kind = Kind::Unit;
  Name name;  // meaningful only for NameRef

  static Value of(Name n) { return Value{Kind::NameRef, std::move(n)}; }
  static Value tru() { return Value{Kind::True, {}}; }
  static Value fls() { return Value{Kind::False, {}}; }
  static Value unit() { return Value{Kind::Unit, {}}; }

  bool operator==(const Value& o) const {
    return kind == o.kind && (kind != Kind::NameRef || name == o.name);
  }
  bool operator<(const Value& o) const {
    if (kind != o.kind) return kind < o.kind;
    return kind == Kind::NameRef && name < o.name;
  }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Val, Not, And, Or };
  Kind kind = Kind::Val;
  Value value;          // Val
  ExprPtr lhs, rhs;     // Not uses lhs only

  static ExprPtr val(Value v);
  static ExprPtr mk_not(ExprPtr e);
  static ExprPtr mk_and(ExprPtr a, ExprPtr b);
  static ExprPtr mk_or(ExprPtr a, ExprPtr b);
};

// ---------------------------------------------------------------------------
// Process terms.  One node type covers all three calculi; the parser and the
// well-formedness checks keep each calculus inside its own fragment.
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

enum class Op {
  Inact,      // 0
  Par,        // n-ary parallel composition
  ResPi,      // (nu x) P
  ResSess,    // (new y z) P
  Bang,       // !P                        (pi only)
  If,         // if e then P else Q       (cmv+/cmv)
  PiSum,      // sum of prefixed branches (pi only)
  MixChoice,  // q y (l*v.P + ...)        (cmv+ only)
  CmvOut,     // y!v.P
  CmvIn,      // q y?z.P
  CmvSel,     // y<+l.P
  CmvBranch,  // y>>{l: P, ...}
};

struct PiPrefix {
  enum class Kind { Out, In, Tau };
  Kind kind = Kind::Tau;
  Name channel;  // Out/In
  Name arg;      // Out: payload name; In: bound variable
};

struct PiBranch {
  PiPrefix prefix;
  TermPtr cont;
};

struct MixBranch {
  Label label;
  Pol pol = Pol::Send;
  Value value;  // Send: transmitted value
  Name var;     // Recv: bound variable
  TermPtr cont;
};

struct CmvArm {
  Label label;
  TermPtr cont;
};

struct Term {
  Op op = Op::Inact;

  std::vector<TermPtr> children;     // Par (>=2), If (then, else)
  Name n1, n2;                       // ResPi: n1; ResSess: n1,n2; Mix/Cmv subject: n1; CmvIn var: n2
  TermPtr body;                      // ResPi/ResSess/Bang/CmvOut/CmvIn/CmvSel
  ExprPtr cond;                      // If
  Qual qual = Qual::Lin;             // MixChoice, CmvIn
  Value value;                       // CmvOut
  Label label;                       // CmvSel
  std::vector<PiBranch> pi_branches;
  std::vector<MixBranch> mix_branches;
  std::vector<CmvArm> cmv_arms;
  std::optional<std::string> res_annot;  // "(new x y : T)" annotation, surface text of T

  // factories
  static TermPtr inact();
  static TermPtr par(std::vector<TermPtr> comps);  // flattens 0/1 components
  static TermPtr res_pi(Name x, TermPtr p);
  static TermPtr res_sess(Name y, Name z, TermPtr p,
                          std::optional<std::string> annot = std::nullopt);
  static TermPtr bang(TermPtr p);
  static TermPtr cond_if(ExprPtr e, TermPtr thn, TermPtr els);
  static TermPtr pi_sum(std::vector<PiBranch> branches);
  static TermPtr mix_choice(Qual q, Name subj, std::vector<MixBranch> branches);
  static TermPtr cmv_out(Name subj, Value v, TermPtr cont);
  static TermPtr cmv_in(Qual q, Name subj, Name var, TermPtr cont);
  static TermPtr cmv_sel(Name subj, Label l, TermPtr cont);
  static TermPtr cmv_branch(Name subj, std::vector<CmvArm> arms);
};

}  // namespace wb

#endif
