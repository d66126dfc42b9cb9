#include "wb/engine.hpp"

#include <deque>
#include <map>

#include "wb/parser.hpp"
#include "wb/printer.hpp"
#include "wb/syntax.hpp"
#include "wb/types.hpp"

namespace wb {

std::optional<bool> eval_expr(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Val:
      if (e->value.kind == Value::Kind::True) return true;
      if (e->value.kind == Value::Kind::False) return false;
      return std::nullopt;
    case Expr::Kind::Not: {
      auto v = eval_expr(e->lhs);
      if (!v) return std::nullopt;
      return !*v;
    }
    case Expr::Kind::And: {
      auto a = eval_expr(e->lhs), b = eval_expr(e->rhs);
      if (!a || !b) return std::nullopt;
      return *a && *b;
    }
    case Expr::Kind::Or: {
      auto a = eval_expr(e->lhs), b = eval_expr(e->rhs);
      if (!a || !b) return std::nullopt;
      return *a || *b;
    }
  }
  return std::nullopt;
}

std::string StepLabel::text() const {
  switch (kind) {
    case StepKind::PiCom: return "com " + ch_a.text;
    case StepKind::PiTau: return "tau";
    case StepKind::MixCom:
      return "sync " + ch_a.text + " " + ch_b.text + " " + label + " " +
             to_string(qual_snd) + "/" + to_string(qual_rcv);
    case StepKind::LinCom: return "lincom " + ch_a.text + " " + ch_b.text;
    case StepKind::UnCom: return "uncom " + ch_a.text + " " + ch_b.text;
    case StepKind::Case:
      return "case " + ch_a.text + " " + ch_b.text + " " + label;
    case StepKind::IfTrue: return "if-true";
    case StepKind::IfFalse: return "if-false";
  }
  return "?";
}

bool StepLabel::conflicts(const StepLabel& o) const {
  for (const Consumed& a : consumed) {
    if (a.replicated) continue;
    for (const Consumed& b : o.consumed)
      if (!b.replicated && a.component == b.component) return true;
  }
  return false;
}

namespace {

struct Region {
  struct B {
    bool sess = false;
    Name a, b;
    std::optional<std::string> annot;
  };
  std::vector<B> binders;
  std::vector<TermPtr> comps;

  bool paired(const Name& y, const Name& z) const {
    for (const B& b : binders)
      if (b.sess && ((b.a == y && b.b == z) || (b.a == z && b.b == y)))
        return true;
    return false;
  }

  TermPtr rebuild(std::vector<TermPtr> new_comps) const {
    TermPtr body = Term::par(std::move(new_comps));
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
      if (it->sess)
        body = Term::res_sess(it->a, it->b, body, it->annot);
      else
        body = Term::res_pi(it->a, body);
    }
    return body;
  }
};

Region decompose(TermPtr t) {
  Region r;
  while (t->op == Op::ResPi || t->op == Op::ResSess) {
    Region::B b;
    b.sess = t->op == Op::ResSess;
    b.a = t->n1;
    b.b = t->n2;
    b.annot = t->res_annot;
    r.binders.push_back(std::move(b));
    t = t->body;
  }
  if (t->op == Op::Par)
    r.comps = t->children;
  else if (t->op != Op::Inact)
    r.comps = {t};
  return r;
}

// A communication advances the session protocol, so the annotation of the
// binder pair must advance with it; the result is the continuation type of
// the first endpoint.  Unknown shapes leave the annotation untouched.
std::string advance_annot(const std::string& annot, bool a_sends,
                          const StepLabel& l) {
  TypePtr t;
  try {
    t = parse_type(annot);
  } catch (const std::exception&) {
    return annot;
  }
  TypePtr u = unfold(t);
  switch (l.kind) {
    case StepKind::MixCom: {
      if (u->kind != TKind::Mix) return annot;
      Pol want = a_sends ? Pol::Send : Pol::Recv;
      for (const MixTBranch& b : u->mix)
        if (b.label == l.label && b.pol == want) return print_type(b.cont);
      return annot;
    }
    case StepKind::LinCom:
    case StepKind::UnCom:
      if (u->kind != TKind::Com) return annot;
      return print_type(u->cont);
    case StepKind::Case: {
      if (u->kind != TKind::Plain) return annot;
      for (const auto& [lbl, cont] : u->plain)
        if (lbl == l.label) return print_type(cont);
      return annot;
    }
    default:
      return annot;
  }
}

struct Slot {
  TermPtr proc;
  int orig = 0;
  bool replicated = false;
  int copy = 0;  // distinguishes the two unfolded copies of a replication
};

struct Stepper {
  Calculus calc;
  Region region;
  std::vector<Slot> slots;
  std::vector<Step> out;
  std::set<std::string> seen;

  void add_step(StepLabel label, const std::map<int, std::vector<TermPtr>>& repl) {
    // repl maps a component index to its replacements; replicated components
    // keep themselves and append the unfolded continuations.
    std::vector<TermPtr> comps;
    for (int i = 0; i < static_cast<int>(region.comps.size()); ++i) {
      auto it = repl.find(i);
      if (it == repl.end()) {
        comps.push_back(region.comps[i]);
        continue;
      }
      bool is_bang = region.comps[i]->op == Op::Bang;
      if (is_bang) comps.push_back(region.comps[i]);
      for (const TermPtr& p : it->second) comps.push_back(p);
    }
    Step s;
    s.label = std::move(label);
    Region adv = region;
    for (auto& b : adv.binders)
      if (b.sess && b.annot &&
          ((b.a == s.label.ch_a && b.b == s.label.ch_b) ||
           (b.a == s.label.ch_b && b.b == s.label.ch_a)))
        b.annot = advance_annot(*b.annot, b.a == s.label.ch_a, s.label);
    s.target = adv.rebuild(std::move(comps));
    std::string key = s.label.text();
    for (const Consumed& c : s.label.consumed)
      key += "|" + std::to_string(c.component) + (c.replicated ? "r" : "");
    key += "#" + canonical_key(s.target);
    if (seen.insert(key).second) out.push_back(std::move(s));
  }

  static void append(std::map<int, std::vector<TermPtr>>& repl, int i,
                     const TermPtr& p) {
    repl[i].push_back(p);
  }

  void run() {
    // conditionals and replication-internal steps at component level
    for (int i = 0; i < static_cast<int>(region.comps.size()); ++i) {
      const TermPtr& c = region.comps[i];
      if (c->op == Op::If) {
        auto v = eval_expr(c->cond);
        if (v) {
          StepLabel l;
          l.kind = *v ? StepKind::IfTrue : StepKind::IfFalse;
          l.consumed = {{i, false}};
          std::map<int, std::vector<TermPtr>> repl;
          repl[i] = {c->children[*v ? 0 : 1]};
          add_step(std::move(l), repl);
        }
      }
      if (c->op == Op::Bang) {
        for (const Step& inner : enumerate_steps(c->body, calc)) {
          StepLabel l = inner.label;
          l.consumed = {{i, true}};
          std::map<int, std::vector<TermPtr>> repl;
          repl[i] = {inner.target};
          add_step(std::move(l), repl);
        }
      }
    }

    // build matching slots, unfolding each replication twice
    for (int i = 0; i < static_cast<int>(region.comps.size()); ++i) {
      const TermPtr& c = region.comps[i];
      if (c->op == Op::Bang) {
        for (int copy = 0; copy < 2; ++copy) {
          if (c->body->op == Op::Par) {
            for (const TermPtr& part : c->body->children)
              slots.push_back({part, i, true, copy});
          } else {
            slots.push_back({c->body, i, true, copy});
          }
        }
      } else {
        slots.push_back({c, i, false, 0});
      }
    }

    for (size_t i = 0; i < slots.size(); ++i) {
      tau_steps(slots[i]);
      for (size_t j = 0; j < slots.size(); ++j) {
        if (i == j) continue;
        pair_steps(slots[i], slots[j]);
      }
    }
  }

  void tau_steps(const Slot& s) {
    if (calc != Calculus::Pi || s.proc->op != Op::PiSum) return;
    for (const PiBranch& b : s.proc->pi_branches) {
      if (b.prefix.kind != PiPrefix::Kind::Tau) continue;
      StepLabel l;
      l.kind = StepKind::PiTau;
      l.consumed = {{s.orig, s.replicated}};
      std::map<int, std::vector<TermPtr>> repl;
      append(repl, s.orig, b.cont);
      add_step(std::move(l), repl);
    }
  }

  void side_effects(std::map<int, std::vector<TermPtr>>& repl, const Slot& s,
                    const TermPtr& cont, bool persists) {
    // a persistent (unrestricted) participant stays alongside its continuation
    if (persists && !s.replicated) append(repl, s.orig, s.proc);
    append(repl, s.orig, cont);
  }

  void pair_steps(const Slot& snd, const Slot& rcv) {
    switch (calc) {
      case Calculus::Pi: {
        if (snd.proc->op != Op::PiSum || rcv.proc->op != Op::PiSum) return;
        for (const PiBranch& bo : snd.proc->pi_branches) {
          if (bo.prefix.kind != PiPrefix::Kind::Out) continue;
          for (const PiBranch& bi : rcv.proc->pi_branches) {
            if (bi.prefix.kind != PiPrefix::Kind::In) continue;
            if (bi.prefix.channel != bo.prefix.channel) continue;
            StepLabel l;
            l.kind = StepKind::PiCom;
            l.ch_a = bo.prefix.channel;
            l.consumed = {{snd.orig, snd.replicated}, {rcv.orig, rcv.replicated}};
            std::map<int, std::vector<TermPtr>> repl;
            append(repl, snd.orig, bo.cont);
            append(repl, rcv.orig,
                   apply_subst(bi.cont, Subst{{bi.prefix.arg,
                                               Value::of(bo.prefix.arg)}}));
            add_step(std::move(l), repl);
          }
        }
        return;
      }
      case Calculus::CmvPlus: {
        if (snd.proc->op != Op::MixChoice || rcv.proc->op != Op::MixChoice) return;
        if (!region.paired(snd.proc->n1, rcv.proc->n1)) return;
        for (const MixBranch& bs : snd.proc->mix_branches) {
          if (bs.pol != Pol::Send) continue;
          for (const MixBranch& br : rcv.proc->mix_branches) {
            if (br.pol != Pol::Recv || br.label != bs.label) continue;
            StepLabel l;
            l.kind = StepKind::MixCom;
            l.ch_a = snd.proc->n1;
            l.ch_b = rcv.proc->n1;
            l.label = bs.label;
            l.qual_snd = snd.proc->qual;
            l.qual_rcv = rcv.proc->qual;
            l.consumed = {{snd.orig, snd.replicated}, {rcv.orig, rcv.replicated}};
            std::map<int, std::vector<TermPtr>> repl;
            side_effects(repl, snd, bs.cont, snd.proc->qual == Qual::Un);
            side_effects(repl, rcv,
                         apply_subst(br.cont, Subst{{br.var, bs.value}}),
                         rcv.proc->qual == Qual::Un);
            add_step(std::move(l), repl);
          }
        }
        return;
      }
      case Calculus::Cmv: {
        if (snd.proc->op == Op::CmvOut && rcv.proc->op == Op::CmvIn) {
          if (!region.paired(snd.proc->n1, rcv.proc->n1)) return;
          StepLabel l;
          l.kind = rcv.proc->qual == Qual::Un ? StepKind::UnCom : StepKind::LinCom;
          l.ch_a = snd.proc->n1;
          l.ch_b = rcv.proc->n1;
          l.consumed = {{snd.orig, snd.replicated}, {rcv.orig, rcv.replicated}};
          std::map<int, std::vector<TermPtr>> repl;
          append(repl, snd.orig, snd.proc->body);
          side_effects(repl, rcv,
                       apply_subst(rcv.proc->body,
                                   Subst{{rcv.proc->n2, snd.proc->value}}),
                       rcv.proc->qual == Qual::Un);
          add_step(std::move(l), repl);
          return;
        }
        if (snd.proc->op == Op::CmvSel && rcv.proc->op == Op::CmvBranch) {
          if (!region.paired(snd.proc->n1, rcv.proc->n1)) return;
          for (const CmvArm& arm : rcv.proc->cmv_arms) {
            if (arm.label != snd.proc->label) continue;
            StepLabel l;
            l.kind = StepKind::Case;
            l.ch_a = snd.proc->n1;
            l.ch_b = rcv.proc->n1;
            l.label = arm.label;
            l.consumed = {{snd.orig, snd.replicated}, {rcv.orig, rcv.replicated}};
            std::map<int, std::vector<TermPtr>> repl;
            append(repl, snd.orig, snd.proc->body);
            append(repl, rcv.orig, arm.cont);
            add_step(std::move(l), repl);
          }
          return;
        }
        return;
      }
    }
  }
};

}  // namespace

std::vector<Step> enumerate_steps(const TermPtr& t, Calculus c) {
  Stepper st;
  st.calc = c;
  st.region = decompose(struct_norm(t));
  st.run();
  return std::move(st.out);
}

namespace {

void collect_barbs(const TermPtr& t, Calculus c, std::set<std::string>& out) {
  Region r = decompose(struct_norm(t));
  NameSet bound;
  for (const auto& b : r.binders) {
    bound.insert(b.a);
    if (b.sess) bound.insert(b.b);
  }
  std::set<std::string> local;
  for (const TermPtr& comp : r.comps) {
    switch (comp->op) {
      case Op::PiSum:
        for (const PiBranch& b : comp->pi_branches) {
          if (b.prefix.kind == PiPrefix::Kind::Out)
            local.insert("~" + b.prefix.channel.text);
          else if (b.prefix.kind == PiPrefix::Kind::In)
            local.insert(b.prefix.channel.text);
        }
        break;
      case Op::Bang:
        collect_barbs(comp->body, c, local);
        break;
      case Op::MixChoice:
      case Op::CmvOut:
      case Op::CmvIn:
      case Op::CmvSel:
      case Op::CmvBranch:
        local.insert(comp->n1.text);
        break;
      default:
        break;
    }
  }
  for (const std::string& b : local) {
    std::string n = b[0] == '~' ? b.substr(1) : b;
    if (!bound.count(Name{n})) out.insert(b);
  }
}

}  // namespace

std::set<std::string> barbs(const TermPtr& t, Calculus c) {
  std::set<std::string> out;
  collect_barbs(t, c, out);
  return out;
}

Lts explore(const TermPtr& root, Calculus c, int max_depth, int max_states) {
  Lts l;
  l.calc = c;
  l.depth_bound = max_depth;
  l.state_bound = max_states;
  std::map<std::string, size_t> index;

  auto add_state = [&](const TermPtr& t) -> std::optional<size_t> {
    TermPtr canon = canonicalize(t);
    std::string key = term_key(canon, false);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    if (static_cast<int>(l.states.size()) >= max_states) {
      l.complete = false;
      return std::nullopt;
    }
    LtsState s;
    s.canon = canon;
    s.concrete = struct_norm(t);
    s.barbs = barbs(s.concrete, c);
    l.states.push_back(std::move(s));
    l.out.emplace_back();
    index[key] = l.states.size() - 1;
    return l.states.size() - 1;
  };

  add_state(root);
  std::deque<std::pair<size_t, int>> queue;
  queue.push_back({0, 0});
  std::set<size_t> expanded;
  while (!queue.empty()) {
    auto [s, d] = queue.front();
    queue.pop_front();
    if (expanded.count(s)) continue;
    expanded.insert(s);
    std::vector<Step> steps = enumerate_steps(l.states[s].concrete, c);
    if (d >= max_depth) {
      if (!steps.empty()) l.complete = false;
      continue;
    }
    for (const Step& st : steps) {
      auto to = add_state(st.target);
      if (!to) continue;
      bool fresh = !expanded.count(*to) &&
                   std::none_of(queue.begin(), queue.end(),
                                [&](const auto& p) { return p.first == *to; });
      l.edges.push_back({s, *to, st.label});
      l.out[s].push_back(l.edges.size() - 1);
      if (fresh) queue.push_back({*to, d + 1});
    }
  }
  return l;
}

std::string lts_json(const Lts& l) {
  std::string out = "{\"calculus\":" + quote_json(to_string(l.calc)) +
                    ",\"complete\":" + (l.complete ? "true" : "false") +
                    ",\"depth_bound\":" + std::to_string(l.depth_bound) +
                    ",\"state_bound\":" + std::to_string(l.state_bound) +
                    ",\"states\":[";
  for (size_t i = 0; i < l.states.size(); ++i) {
    if (i) out += ",";
    out += "{\"id\":" + std::to_string(i) +
           ",\"term\":" + quote_json(print_term(l.states[i].canon, l.calc)) +
           ",\"barbs\":[";
    size_t k = 0;
    for (const std::string& b : l.states[i].barbs) {
      if (k++) out += ",";
      out += quote_json(b);
    }
    out += "]}";
  }
  out += "],\"edges\":[";
  for (size_t i = 0; i < l.edges.size(); ++i) {
    if (i) out += ",";
    const LtsEdge& e = l.edges[i];
    out += "{\"from\":" + std::to_string(e.from) +
           ",\"to\":" + std::to_string(e.to) +
           ",\"label\":" + quote_json(e.label.text()) + ",\"consumed\":[";
    for (size_t k = 0; k < e.label.consumed.size(); ++k) {
      if (k) out += ",";
      out += "{\"component\":" + std::to_string(e.label.consumed[k].component) +
             ",\"replicated\":" +
             (e.label.consumed[k].replicated ? "true" : "false") + "}";
    }
    out += "]}";
  }
  out += "]}";
  return out;
}

std::string lts_dot(const Lts& l) {
  std::string out = "digraph lts {\n  rankdir=LR;\n";
  for (size_t i = 0; i < l.states.size(); ++i) {
    std::string label = print_term(l.states[i].canon, l.calc);
    if (label.size() > 60) label = label.substr(0, 57) + "...";
    out += "  s" + std::to_string(i) + " [label=" + quote_json(label) +
           (i == 0 ? ", shape=doublecircle" : "") + "];\n";
  }
  for (const LtsEdge& e : l.edges)
    out += "  s" + std::to_string(e.from) + " -> s" + std::to_string(e.to) +
           " [label=" + quote_json(e.label.text()) + "];\n";
  out += "}\n";
  return out;
}

}  // namespace wb
