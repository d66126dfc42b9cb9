#include "wb/patterns.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "wb/parser.hpp"
#include "wb/printer.hpp"
#include "wb/syntax.hpp"

namespace wb {

bool steps_conflict(const StepLabel& a, const StepLabel& b) {
  return a.conflicts(b);
}

bool distributable_steps(const StepLabel& a, const StepLabel& b) {
  return !a.conflicts(b);
}

bool distributable_execs(const std::vector<StepLabel>& a,
                         const std::vector<StepLabel>& b) {
  for (const StepLabel& x : a)
    for (const StepLabel& y : b)
      if (x.conflicts(y)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Pattern detection
// ---------------------------------------------------------------------------

namespace {

struct StepTable {
  std::vector<Step> steps;
  std::vector<std::string> keys;       // canonical reduct keys
  std::vector<std::vector<char>> conf;  // pairwise conflicts

  explicit StepTable(const TermPtr& p, Calculus c)
      : StepTable(enumerate_steps(p, c)) {}
  explicit StepTable(std::vector<Step> ss) : steps(std::move(ss)) {
    size_t n = steps.size();
    keys.resize(n);
    for (size_t i = 0; i < n; i++) keys[i] = canonical_key(steps[i].target);
    conf.assign(n, std::vector<char>(n, 0));
    for (size_t i = 0; i < n; i++)
      for (size_t j = i + 1; j < n; j++)
        conf[i][j] = conf[j][i] = steps[i].label.conflicts(steps[j].label);
  }
};

std::optional<MWitness> detect_m_in(const StepTable& t) {
  size_t n = t.steps.size();
  for (size_t j = 0; j < n; j++)            // the middle step b
    for (size_t i = 0; i < n; i++) {        // step a
      if (i == j) continue;
      for (size_t k = i + 1; k < n; k++) {  // step c
        if (k == j) continue;
        if (!t.conf[i][j] || !t.conf[j][k] || t.conf[i][k]) continue;
        if (t.keys[i] == t.keys[j] || t.keys[j] == t.keys[k] ||
            t.keys[i] == t.keys[k])
          continue;
        return MWitness{t.steps[i], t.steps[j], t.steps[k]};
      }
    }
  return std::nullopt;
}

// Arranges five steps into a conflict cycle if their conflict graph is
// exactly C5; non-neighbours are then distributable by construction.
std::optional<std::array<size_t, 5>> cycle_of(const StepTable& t,
                                              const std::array<size_t, 5>& s) {
  int deg[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < 5; i++)
    for (int j = i + 1; j < 5; j++)
      if (t.conf[s[i]][s[j]]) { deg[i]++; deg[j]++; }
  for (int i = 0; i < 5; i++)
    if (deg[i] != 2) return std::nullopt;
  std::array<size_t, 5> order{};
  order[0] = s[0];
  std::set<size_t> left(s.begin() + 1, s.end());
  for (int pos = 1; pos < 5; pos++) {
    bool found = false;
    for (size_t cand : left)
      if (t.conf[order[pos - 1]][cand]) {
        order[pos] = cand;
        left.erase(cand);
        found = true;
        break;
      }
    if (!found) return std::nullopt;  // degree-2 but two disjoint cycles
  }
  if (!t.conf[order[4]][order[0]]) return std::nullopt;
  return order;
}

std::optional<StarWitness> detect_star_in(const StepTable& t) {
  size_t n = t.steps.size();
  if (n < 5) return std::nullopt;
  std::array<size_t, 5> s{};
  std::function<std::optional<StarWitness>(int, size_t)> rec =
      [&](int pos, size_t from) -> std::optional<StarWitness> {
    if (pos == 5) {
      auto order = cycle_of(t, s);
      if (!order) return std::nullopt;
      for (int i = 0; i < 5; i++)
        for (int j = i + 1; j < 5; j++)
          if (t.keys[(*order)[i]] == t.keys[(*order)[j]]) return std::nullopt;
      StarWitness w;
      for (int i = 0; i < 5; i++) w.steps[i] = t.steps[(*order)[i]];
      return w;
    }
    for (size_t i = from; i < n; i++) {
      s[pos] = i;
      if (auto w = rec(pos + 1, i + 1)) return w;
    }
    return std::nullopt;
  };
  return rec(0, 0);
}

}  // namespace

std::optional<MWitness> detect_m(const TermPtr& p, Calculus c) {
  return detect_m_in(StepTable(p, c));
}

std::optional<StarWitness> detect_star(const TermPtr& p, Calculus c) {
  return detect_star_in(StepTable(p, c));
}

// ---------------------------------------------------------------------------
// Confluence
// ---------------------------------------------------------------------------

ConfluenceResult confluence_check(const TermPtr& a, const Step& e1,
                                  const Step& e2, Calculus c) {
  ConfluenceResult r;
  (void)a;
  if (e1.label.kind != StepKind::MixCom || e2.label.kind != StepKind::MixCom) {
    r.note = "both steps must reduce mixed choices";
    return r;
  }
  std::set<Name> n1{e1.label.ch_a, e1.label.ch_b};
  if (n1.count(e2.label.ch_a) || n1.count(e2.label.ch_b)) {
    r.note = "steps reduce choices on a shared channel";
    return r;
  }
  r.precondition_ok = true;
  std::map<std::string, TermPtr> succ1;
  for (const Step& s : enumerate_steps(e1.target, c))
    succ1.emplace(canonical_key(s.target), s.target);
  for (const Step& s : enumerate_steps(e2.target, c)) {
    auto it = succ1.find(canonical_key(s.target));
    if (it != succ1.end()) {
      r.closes = true;
      r.d = it->second;
      return r;
    }
  }
  r.note = "no common successor";
  return r;
}

// ---------------------------------------------------------------------------
// Networks and hypergraphs
// ---------------------------------------------------------------------------

NetworkDecomposition decompose(const TermPtr& net, Calculus c) {
  NetworkDecomposition d;
  d.calc = c;
  TermPtr t = net;
  while (t->op == Op::ResPi || t->op == Op::ResSess) {
    if (t->op == Op::ResPi) {
      d.res_pi.push_back(t->n1);
    } else {
      d.res_sess.emplace_back(t->n1, t->n2);
      d.sess_annots.push_back(t->res_annot);
    }
    t = t->body;
  }
  if (t->op == Op::Par)
    d.components = t->children;
  else
    d.components = {t};
  return d;
}

TermPtr recompose(const NetworkDecomposition& net) {
  TermPtr body = Term::par(net.components);
  for (size_t i = net.res_sess.size(); i-- > 0;)
    body = Term::res_sess(net.res_sess[i].first, net.res_sess[i].second, body,
                          net.sess_annots[i]);
  for (size_t i = net.res_pi.size(); i-- > 0;)
    body = Term::res_pi(net.res_pi[i], body);
  return body;
}

Hypergraph build_hypergraph(const NetworkDecomposition& net) {
  Hypergraph h;
  h.nodes = net.components.size();
  NameSet node_names;
  for (size_t i = 1; i <= h.nodes; i++) node_names.insert(std::to_string(i));
  for (size_t i = 0; i < net.components.size(); i++)
    for (const Name& x : free_names(net.components[i])) {
      if (node_names.count(x)) continue;
      h.incidence[x].insert(i + 1);
    }
  for (auto& [x, _] : h.incidence) h.edges.push_back(x);
  return h;
}

bool preserves_incidence(const Hypergraph& h, const Automorphism& s) {
  if (s.node_map.size() != h.nodes) return false;
  for (const Name& x : h.edges) {
    auto it = s.edge_map.find(x);
    if (it == s.edge_map.end()) return false;
    auto img = h.incidence.find(it->second);
    if (img == h.incidence.end()) return false;
    std::set<size_t> want;
    for (size_t n : h.incidence.at(x)) want.insert(s.of(n));
    if (img->second != want) return false;
  }
  return true;
}

std::vector<Automorphism> find_automorphisms(const Hypergraph& h) {
  std::vector<Automorphism> out;
  size_t k = h.nodes;
  std::vector<size_t> perm(k);
  std::vector<char> used(k + 1, 0);

  // With the node permutation fixed, map each edge to a candidate with the
  // matching image incidence, backtracking over ties.
  std::function<void(size_t, Automorphism&, std::set<Name>&)> match_edges =
      [&](size_t ei, Automorphism& s, std::set<Name>& taken) {
        if (ei == h.edges.size()) {
          if (preserves_incidence(h, s)) out.push_back(s);
          return;
        }
        const Name& x = h.edges[ei];
        std::set<size_t> want;
        for (size_t n : h.incidence.at(x)) want.insert(s.of(n));
        for (const Name& y : h.edges) {
          if (taken.count(y) || h.incidence.at(y) != want) continue;
          s.edge_map[x] = y;
          taken.insert(y);
          match_edges(ei + 1, s, taken);
          taken.erase(y);
          s.edge_map.erase(x);
        }
      };

  std::function<void(size_t)> pick = [&](size_t i) {
    if (i == k) {
      Automorphism s;
      s.node_map = perm;
      std::set<Name> taken;
      match_edges(0, s, taken);
      return;
    }
    for (size_t v = 1; v <= k; v++) {
      if (used[v]) continue;
      used[v] = 1;
      perm[i] = v;
      pick(i + 1);
      used[v] = 0;
    }
  };
  pick(0);
  return out;
}

std::set<size_t> orbit(const Automorphism& s, size_t n) {
  std::set<size_t> o;
  size_t cur = n;
  while (!o.count(cur)) {
    o.insert(cur);
    cur = s.of(cur);
  }
  return o;
}

Verdict check_symmetry(const NetworkDecomposition& net, const Automorphism& s,
                       int max_depth, int max_states) {
  size_t k = net.components.size();
  if (s.node_map.size() != k) return Verdict::NotRelated;
  std::map<Name, Name> m;
  for (auto& [x, y] : s.edge_map) m[x] = y;
  for (size_t i = 1; i <= k; i++)
    m[std::to_string(i)] = std::to_string(s.of(i));
  Subst sigma = name_subst(m);

  bool unknown = false;
  for (size_t i = 1; i <= k; i++) {
    TermPtr lhs = net.components[s.of(i) - 1];
    TermPtr rhs = apply_subst(net.components[i - 1], sigma);
    Lts la = explore(lhs, net.calc, max_depth, max_states);
    Lts lb = explore(rhs, net.calc, max_depth, max_states);
    RelationResult r = weak_bisim(la, lb);
    if (r.verdict == Verdict::NotRelated) return Verdict::NotRelated;
    if (r.verdict == Verdict::UnknownBounded) unknown = true;
  }
  return unknown ? Verdict::UnknownBounded : Verdict::Related;
}

// ---------------------------------------------------------------------------
// Electoral systems
// ---------------------------------------------------------------------------

namespace {

std::set<std::string> numeral_barbs(const std::set<std::string>& bs) {
  std::set<std::string> out;
  for (const std::string& b : bs) {
    std::string core = (!b.empty() && b[0] == '~') ? b.substr(1) : b;
    if (!core.empty() &&
        std::all_of(core.begin(), core.end(),
                    [](char ch) { return ch >= '0' && ch <= '9'; }))
      out.insert(core);
  }
  return out;
}

bool has_cycle(const Lts& l) {
  std::vector<int> mark(l.states.size(), 0);  // 0 new, 1 open, 2 done
  std::function<bool(size_t)> dfs = [&](size_t s) -> bool {
    mark[s] = 1;
    for (size_t e : l.out[s]) {
      size_t t = l.edges[e].to;
      if (mark[t] == 1) return true;
      if (mark[t] == 0 && dfs(t)) return true;
    }
    mark[s] = 2;
    return false;
  };
  return dfs(0);
}

}  // namespace

ElectionReport electoral_check(const TermPtr& net, Calculus c, int max_depth,
                               int max_states) {
  ElectionReport rep;
  Lts l = explore(net, c, max_depth, max_states);
  if (!l.complete) {
    rep.note = "exploration incomplete within bounds";
    return rep;
  }
  if (has_cycle(l)) {
    rep.note = "cyclic reduction graph; electoral checking unsupported";
    return rep;
  }
  rep.supported = true;
  rep.electoral = true;

  // distinct successor states, in order of first appearance
  std::vector<std::vector<size_t>> succ(l.states.size());
  for (size_t s = 0; s < l.states.size(); s++) {
    std::set<size_t> seen;
    for (size_t e : l.out[s]) {
      size_t t = l.edges[e].to;
      if (seen.insert(t).second) succ[s].push_back(t);
    }
  }

  const size_t kMaxExecs = 1000000;
  std::vector<size_t> path{0};
  std::function<void(size_t)> walk = [&](size_t s) {
    if (rep.executions >= kMaxExecs) return;
    if (succ[s].empty()) {
      rep.executions++;
      std::set<std::string> leader = numeral_barbs(l.states[s].barbs);
      if (leader.size() != 1) {
        rep.electoral = false;
        rep.note = "a maximal execution announces " +
                   std::to_string(leader.size()) + " leaders";
      } else {
        // no stray announcement en route
        for (size_t st : path)
          for (const std::string& n : numeral_barbs(l.states[st].barbs))
            if (!leader.count(n)) {
              rep.electoral = false;
              rep.note = "transient announcement of " + n;
            }
        rep.leaders.push_back(*leader.begin());
      }
      return;
    }
    for (size_t t : succ[s]) {
      path.push_back(t);
      walk(t);
      path.pop_back();
    }
  };
  walk(0);
  if (rep.executions >= kMaxExecs) {
    rep.supported = false;
    rep.note = "too many maximal executions";
    return rep;
  }
  std::sort(rep.leaders.begin(), rep.leaders.end());
  return rep;
}

// ---------------------------------------------------------------------------
// Bounded CMV+ enumeration
// ---------------------------------------------------------------------------

TermPtr pm_network() {
  return parse_term(
      "(new x y)(lin x (l!true.0 + l?(z).0) | lin x (l!false.0 + l?(z).0) | "
      "lin y (l?(z).0 + l!true.0) | lin y (l?(z).0 + l!false.0))",
      Calculus::CmvPlus);
}

namespace {

std::vector<std::string> summand_pool(const std::vector<Label>& labels) {
  std::vector<std::string> out;
  for (const Label& l : labels) {
    out.push_back(l + "!true.0");
    out.push_back(l + "!false.0");
    out.push_back(l + "?(z).0");
  }
  return out;
}

// all non-empty summand subsets of size <= max_summands, on both endpoints
std::vector<std::string> component_pool(const EnumConfig& cfg) {
  std::vector<std::string> sums = summand_pool(cfg.labels);
  std::vector<std::string> bodies;
  std::function<void(size_t, int, std::string)> pick = [&](size_t from,
                                                           int left,
                                                           std::string acc) {
    if (!acc.empty()) bodies.push_back(acc);
    if (left == 0) return;
    for (size_t i = from; i < sums.size(); i++)
      pick(i + 1, left - 1, acc.empty() ? sums[i] : acc + " + " + sums[i]);
  };
  pick(0, cfg.max_summands, "");
  std::vector<std::string> out;
  for (const char* ep : {"x", "y"})
    for (const std::string& b : bodies)
      out.push_back(std::string("lin ") + ep + " (" + b + ")");
  return out;
}

}  // namespace

ScanReport scan_patterns(const EnumConfig& cfg) {
  ScanReport rep;
  std::vector<std::string> pool = component_pool(cfg);
  std::string pm_key = canonical_key(pm_network());

  std::vector<size_t> idx;
  std::function<void()> visit = [&]() {
    std::string src = "(new x y)(";
    for (size_t i = 0; i < idx.size(); i++) {
      if (i) src += " | ";
      src += pool[idx[i]];
    }
    src += ")";
    TermPtr t = parse_term(src, Calculus::CmvPlus);
    rep.terms++;
    StepTable tab(t, Calculus::CmvPlus);
    if (auto m = detect_m_in(tab)) {
      rep.m_hits++;
      if (rep.first_m.empty()) rep.first_m = src;
      if (canonical_key(t) == pm_key) rep.pm_found = true;
    }
    if (auto st = detect_star_in(tab)) {
      rep.star_hits++;
      if (rep.first_star.empty()) rep.first_star = src;
    }
  };
  std::function<void(size_t)> build = [&](size_t from) {
    if (!idx.empty()) visit();
    if ((int)idx.size() == cfg.max_components) return;
    for (size_t i = from; i < pool.size(); i++) {
      idx.push_back(i);
      build(i);
      idx.pop_back();
    }
  };
  build(0);
  return rep;
}

TermPtr random_confluence_instance(std::mt19937& rng) {
  auto coin = [&](int n) { return (int)(rng() % n); };
  const char* labels[2] = {"l", "m"};
  const char* vals[2] = {"true", "false"};
  auto choice = [&](const std::string& ep, const std::string& lab,
                    bool sender) {
    std::string body;
    if (sender)
      body = lab + "!" + vals[coin(2)] + ".0";
    else
      body = lab + "?(z).0";
    if (coin(2)) {  // a distracting extra summand
      std::string lab2 = labels[coin(2)];
      std::string extra =
          coin(2) ? lab2 + "!" + vals[coin(2)] + ".0" : lab2 + "?(w).0";
      if (extra != body) {
        if (coin(2)) body += " + " + extra; else body = extra + " + " + body;
      }
    }
    return "lin " + ep + " (" + body + ")";
  };
  std::string la = labels[coin(2)], lb = labels[coin(2)];
  // one choice per session in each half; matching polarities guarantee the
  // two lemma steps
  std::string p = choice("x1", la, true) + " | " + choice("x2", lb, false);
  std::string q = choice("y1", la, false) + " | " + choice("y2", lb, true);
  std::string src =
      "(new x1 y1)(new x2 y2)(" + p + " | " + q + ")";
  return parse_term(src, Calculus::CmvPlus);
}

}  // namespace wb
