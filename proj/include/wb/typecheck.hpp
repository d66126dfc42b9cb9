#ifndef WB_TYPECHECK_HPP
#define WB_TYPECHECK_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wb/term.hpp"
#include "wb/types.hpp"

namespace wb {

// Typing derivations.  Process judgments carry the subject term; value
// judgments carry the value; choice-branch judgments carry label/polarity and
// the branch payload/continuation types.
struct Deriv;
using DerivPtr = std::shared_ptr<const Deriv>;

struct Deriv {
  std::string rule;
  TypeCtx ctx;                  // context of this judgment
  TermPtr subject;              // process judgments
  std::optional<Value> value;   // value judgments
  TypePtr type;                 // value type / branch payload / T-Res endpoint type
  TypePtr type2;                // branch continuation type
  Label label;                  // branch judgments
  Pol pol = Pol::Send;
  std::string note;             // split / add records, free-form
  std::vector<DerivPtr> premises;
};

std::string deriv_json(const DerivPtr& d, Calculus c);

struct TypecheckResult {
  bool ok = false;
  std::string error;
  DerivPtr deriv;
  // the checked term with binders renamed apart (alpha-equivalent input)
  TermPtr subject;
};

// Typechecks a CMV+ or CMV process under the given context.
TypecheckResult typecheck(Calculus c, const TypeCtx& g, const TermPtr& p);

// Replays rule-local side conditions over a derivation tree.
bool validate_deriv(const DerivPtr& d, std::string* why = nullptr);

}  // namespace wb

#endif
