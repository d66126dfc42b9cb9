#ifndef WB_EQUIV_HPP
#define WB_EQUIV_HPP

#include <string>
#include <utility>
#include <vector>

#include "wb/engine.hpp"

namespace wb {

enum class Verdict { Related, NotRelated, UnknownBounded };

std::string verdict_text(Verdict v);

struct RelationResult {
  Verdict verdict = Verdict::UnknownBounded;
  // Surviving pairs (index into a.states, index into b.states).  For the
  // coupled check `relation` holds the a-simulated-by-b pairs and
  // `relation_rev` the converse orientation.
  std::vector<std::pair<size_t, size_t>> relation;
  std::vector<std::pair<size_t, size_t>> relation_rev;
  std::string witness;  // JSON, set when NotRelated
};

// Weak reduction bisimilarity with weak barbs: the roots are related iff they
// lie in some relation R where related states can match each other's
// multi-step reductions within R and have identical weak barb sets.
RelationResult weak_bisim(const Lts& a, const Lts& b);

// Weak coupled similarity: the roots are related iff each root is coupled
// similar to the other, i.e. every reduction sequence can be answered either
// staying ahead (same orientation) or by overtaking (swapped orientation),
// and weak barbs of the left state are included in those of the right.
RelationResult coupled_sim(const Lts& a, const Lts& b);

}  // namespace wb

#endif
