#ifndef WB_HARNESS_HPP
#define WB_HARNESS_HPP

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wb/encode.hpp"
#include "wb/engine.hpp"
#include "wb/equiv.hpp"
#include "wb/typecheck.hpp"

namespace wb {

struct Bounds {
  int depth = 12;
  int max_states = 20000;
};

// Exploration of encoded terms with committed-choice junk collapsed at every
// state, so junk accumulation cannot blow up the state space.
Lts explore_encoded(const TermPtr& cmv_term, const Bounds& b);

// The sub-LTS reachable from `root`, reindexed with `root` as state 0.
Lts sub_lts(const Lts& l, size_t root);

struct CompletenessFinding {
  size_t source_state = 0;         // index into the source LTS
  std::string source_term;
  std::vector<size_t> emulation;   // target-LTS state path from the root
  Verdict verdict = Verdict::UnknownBounded;
};

struct SoundnessFinding {
  size_t target_state = 0;         // index into the target LTS
  size_t matched_source = 0;       // source-LTS state index when found
  std::vector<size_t> completion;  // target path from target_state
  bool starting_free = false;      // the completion avoids starting-steps
  Verdict verdict = Verdict::UnknownBounded;
};

struct OcReport {
  std::string source;
  Bounds bounds;
  Verdict completeness = Verdict::UnknownBounded;
  Verdict soundness = Verdict::UnknownBounded;
  Verdict barbs = Verdict::UnknownBounded;
  Verdict divergence = Verdict::UnknownBounded;
  Verdict verdict = Verdict::UnknownBounded;  // conjunction of the above
  std::vector<CompletenessFinding> completeness_findings;
  std::vector<SoundnessFinding> soundness_findings;
  std::string witness;
};

// Precomputed data shared by the certifiers for one source term.
struct EncodedSystem {
  TermPtr source;
  TypeCtx ctx;
  EncodeResult enc;
  Lts src_lts;  // source exploration (cmv+)
  Lts tgt_lts;  // junk-collapsed target exploration (cmv)
};

// Typechecks, encodes and explores; throws std::runtime_error when the source
// does not typecheck.
EncodedSystem prepare_system(const TermPtr& s, const TypeCtx& g,
                             const Bounds& b);

Verdict check_completeness(EncodedSystem& sys, OcReport& rep);
Verdict check_soundness(EncodedSystem& sys, OcReport& rep);
Verdict check_barb_sensitiveness(const EncodedSystem& sys,
                                 std::string* witness = nullptr);
Verdict check_divergence_reflection(const EncodedSystem& sys,
                                    std::string* witness = nullptr);

// Bit-exact ⟦S sigma⟧ = ⟦S⟧ sigma' for injective renamings; throws
// std::invalid_argument on a non-injective sigma.
Verdict check_name_invariance(const TermPtr& s, const TypeCtx& g,
                              const std::map<Name, Name>& sigma,
                              std::string* witness = nullptr);

// canonicalize(⟦S1|S2⟧) = canonicalize(⟦S1⟧ | ⟦S2⟧)
Verdict check_distributability_structural(const TermPtr& s1, const TermPtr& s2,
                                          const TypeCtx& g,
                                          std::string* witness = nullptr);

// All certifiers on one term, merged into one report.
OcReport oc_check(const TermPtr& s, const TypeCtx& g, const Bounds& b);

std::string oc_report_json(const OcReport& rep);

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

struct CorpusEntry {
  std::string name;
  std::string src;  // cmv+ surface syntax
  std::vector<std::pair<std::string, std::string>> free_ctx;  // name : type

  TermPtr term() const;
  TypeCtx ctx() const;
};

// Well-typed CMV+ terms covering every encoder case, including the worked
// translation example and the two-by-two M network.
const std::vector<CorpusEntry>& oc_corpus();

// An injective renaming of the free names of `s`, drawing fresh targets.
std::map<Name, Name> random_renaming(const TermPtr& s, std::mt19937& rng);

}  // namespace wb

#endif
