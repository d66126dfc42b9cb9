#ifndef WB_ENGINE_HPP
#define WB_ENGINE_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wb/term.hpp"

namespace wb {

std::optional<bool> eval_expr(const ExprPtr& e);

enum class StepKind {
  PiCom,   // Com
  PiTau,   // Tau
  MixCom,  // R-LinLin / R-LinUn / R-UnLin / R-UnUn, by the two qualifiers
  LinCom,  // R-LinCom
  UnCom,   // R-UnCom
  Case,    // R-Case
  IfTrue,
  IfFalse,
};

struct Consumed {
  int component = 0;       // component index in the struct-normal region
  bool replicated = false; // reached by unfolding a replication
};

struct StepLabel {
  StepKind kind = StepKind::PiTau;
  Name ch_a, ch_b;        // pi: channel (ch_a); sessions: the two endpoints
  Label label;            // selected label (cmv+ / case)
  Qual qual_snd = Qual::Lin, qual_rcv = Qual::Lin;  // MixCom rule variant
  std::vector<Consumed> consumed;

  std::string text() const;
  // conflict granularity: non-replicated consumed components intersect
  bool conflicts(const StepLabel& o) const;
};

struct Step {
  StepLabel label;
  TermPtr target;
};

// Enumerates the reductions of t.  Consumed indices refer to the component
// order of struct_norm(t).
std::vector<Step> enumerate_steps(const TermPtr& t, Calculus c);

// Observable barbs: pi outputs as "~y" and inputs as "y"; session calculi
// report the bare endpoint of any unguarded free-subject prefix or choice.
std::set<std::string> barbs(const TermPtr& t, Calculus c);

struct LtsState {
  TermPtr canon;     // canonical representative (state identity)
  TermPtr concrete;  // struct-normal representative with original names
  std::set<std::string> barbs;
};

struct LtsEdge {
  size_t from = 0, to = 0;
  StepLabel label;
};

struct Lts {
  Calculus calc = Calculus::Pi;
  std::vector<LtsState> states;  // state 0 is the root
  std::vector<LtsEdge> edges;
  std::vector<std::vector<size_t>> out;  // per state, edge indices
  bool complete = true;
  int depth_bound = 0;
  int state_bound = 0;
};

Lts explore(const TermPtr& root, Calculus c, int max_depth, int max_states);

std::string lts_json(const Lts& l);
std::string lts_dot(const Lts& l);

}  // namespace wb

#endif
