#ifndef WB_ENCODE_HPP
#define WB_ENCODE_HPP

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "wb/engine.hpp"
#include "wb/term.hpp"
#include "wb/typecheck.hpp"
#include "wb/types.hpp"

namespace wb {

// A mixed choice reordered into label groups: per label first the send
// summands, then the receive summands, in their original relative order.
struct ChoiceGroup {
  Label label;
  std::vector<size_t> sends;  // indices into the branch list
  std::vector<size_t> recvs;
};
std::vector<ChoiceGroup> reorder_choice(const std::vector<MixBranch>& branches);

// (vst)( s |> {opt_i: P_i} | Pi_i t <+ opt_i.0 ); commits in one step,
// leaving the unchosen selectors behind as junk.
TermPtr nd_choice(const std::vector<TermPtr>& options, NameGen& gen,
                  std::pair<Name, Name>* session = nullptr);

// Renaming policy: every source name is suffixed with "_", keeping the
// encoder-generated names (c0, d0, u0, v0, s0, t0, ...) out of its range.
Name rename_name(const Name& n);
Value rename_value(const Value& v);

// Mixed choice types to separate-choice protocol types (mechanical, derived
// from the usage the encoded terms make of each endpoint).
TypePtr encode_type(const TypePtr& t);
TypeCtx encode_ctx(const TypeCtx& g);

struct EncodeProv {
  // sessions of the first non-deterministic choice of internal translations
  std::set<std::pair<Name, Name>> start_sessions;
  std::vector<std::pair<std::string, std::string>> cases;  // path -> case tag
  std::vector<Name> fresh;  // fresh names drawn, in draw order
};

struct EncodeResult {
  TermPtr term;
  EncodeProv prov;
};

// Type-directed translation; the derivation must come from a successful
// cmv+ typecheck.  Throws std::runtime_error on foreign derivations.
EncodeResult encode(const DerivPtr& d);

std::string prov_json(const EncodeProv& p);

// Garbage collection of committed-choice junk: a session restriction whose
// endpoints are used only by selections with inactive continuations on one
// side vanishes.  Applied everywhere, to fixpoint, then renormalized.
TermPtr gc_junk(const TermPtr& t);

// True iff the edge commits the first non-deterministic choice of an
// internal-choice translation or reduces a conditional.
bool is_starting_step(const StepLabel& edge, const EncodeProv& prov);

}  // namespace wb

#endif
