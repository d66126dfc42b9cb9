#ifndef WB_PATTERNS_HPP
#define WB_PATTERNS_HPP

#include <array>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wb/engine.hpp"
#include "wb/equiv.hpp"

namespace wb {

// Two co-initial steps conflict when they consume a common occurrence (same
// choice / prefix / conditional); otherwise they are distributable.
bool steps_conflict(const StepLabel& a, const StepLabel& b);
bool distributable_steps(const StepLabel& a, const StepLabel& b);

// Executions lifted pointwise: in conflict iff some cross pair of steps is.
// Both label sequences must describe consumed occurrences of one shared
// origin decomposition.
bool distributable_execs(const std::vector<StepLabel>& a,
                         const std::vector<StepLabel>& b);

struct MWitness {
  Step a, b, c;  // a and c distributable, b conflicts with both
};
std::optional<MWitness> detect_m(const TermPtr& p, Calculus c);

struct StarWitness {
  std::array<Step, 5> steps;  // cyclic conflict order a-b-c-d-e-a
};
std::optional<StarWitness> detect_star(const TermPtr& p, Calculus c);

struct ConfluenceResult {
  bool precondition_ok = false;
  bool closes = false;
  TermPtr d;  // common successor when the diamond closes
  std::string note;
};
// e1, e2 must be steps of a reducing choices on distinct session channels.
ConfluenceResult confluence_check(const TermPtr& a, const Step& e1,
                                  const Step& e2, Calculus c);

// ---------------------------------------------------------------------------
// Networks, hypergraphs and symmetry
// ---------------------------------------------------------------------------

struct NetworkDecomposition {
  Calculus calc = Calculus::Pi;
  std::vector<Name> res_pi;
  std::vector<std::pair<Name, Name>> res_sess;
  std::vector<std::optional<std::string>> sess_annots;
  std::vector<TermPtr> components;  // P_1 .. P_k, nodes 1-based
};

NetworkDecomposition decompose(const TermPtr& net, Calculus c);
TermPtr recompose(const NetworkDecomposition& net);

struct Hypergraph {
  size_t nodes = 0;                          // N = {1..k}
  std::vector<Name> edges;                   // X, sorted
  std::map<Name, std::set<size_t>> incidence;  // t : X -> subsets of N
};

Hypergraph build_hypergraph(const NetworkDecomposition& net);

struct Automorphism {
  std::vector<size_t> node_map;  // node_map[i-1] = sigma(i), 1-based
  std::map<Name, Name> edge_map;

  size_t of(size_t n) const { return node_map[n - 1]; }
};

std::vector<Automorphism> find_automorphisms(const Hypergraph& h);
bool preserves_incidence(const Hypergraph& h, const Automorphism& s);
std::set<size_t> orbit(const Automorphism& s, size_t n);

// P sigma(i) weakly bisimilar to (P_i)sigma for every node, with sigma acting
// on edge names and node ids.
Verdict check_symmetry(const NetworkDecomposition& net, const Automorphism& s,
                       int max_depth = 16, int max_states = 4096);

// ---------------------------------------------------------------------------
// Electoral systems
// ---------------------------------------------------------------------------

struct ElectionReport {
  bool supported = false;  // complete and acyclic exploration
  bool electoral = false;
  size_t executions = 0;           // maximal executions modulo canonical form
  std::vector<std::string> leaders;  // one entry per execution, sorted
  std::string note;
};

ElectionReport electoral_check(const TermPtr& net, Calculus c,
                               int max_depth = 32, int max_states = 100000);

// ---------------------------------------------------------------------------
// Bounded enumeration of CMV+ networks for pattern scanning
// ---------------------------------------------------------------------------

struct EnumConfig {
  int max_components = 4;
  int max_summands = 2;
  std::vector<Label> labels = {"l", "m"};
};

struct ScanReport {
  size_t terms = 0;
  size_t m_hits = 0;
  size_t star_hits = 0;
  bool pm_found = false;   // the canonical two-by-two M network shows up
  std::string first_m;     // first M witness term, printed
  std::string first_star;  // first star witness term, printed (expected none)
};

ScanReport scan_patterns(const EnumConfig& cfg);

// The paper's two-by-two M network over one session, used as a landmark.
TermPtr pm_network();

// Lemma-shaped CMV+ confluence instance: two sessions crossing two parallel
// halves, with a guaranteed communication step on each.  Returns the network;
// steps are recovered with enumerate_steps.
TermPtr random_confluence_instance(std::mt19937& rng);

}  // namespace wb

#endif
