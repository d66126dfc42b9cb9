#include "wb/harness.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "wb/parser.hpp"
#include "wb/printer.hpp"
#include "wb/syntax.hpp"

namespace wb {

Lts explore_encoded(const TermPtr& root, const Bounds& b) {
  Lts l;
  l.calc = Calculus::Cmv;
  l.depth_bound = b.depth;
  l.state_bound = b.max_states;
  std::map<std::string, size_t> index;
  std::vector<int> depth;

  auto add = [&](const TermPtr& t) -> size_t {
    TermPtr g = gc_junk(t);
    std::string key = canonical_key(g);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    LtsState st;
    st.canon = canonicalize(g);
    st.concrete = g;
    st.barbs = barbs(g, Calculus::Cmv);
    l.states.push_back(st);
    l.out.emplace_back();
    depth.push_back(0);
    index[key] = l.states.size() - 1;
    return l.states.size() - 1;
  };

  std::vector<size_t> queue{add(root)};
  for (size_t qi = 0; qi < queue.size(); qi++) {
    size_t s = queue[qi];
    auto steps = enumerate_steps(l.states[s].concrete, Calculus::Cmv);
    if (depth[s] >= b.depth) {
      if (!steps.empty()) l.complete = false;
      continue;
    }
    for (const Step& st : steps) {
      size_t before = l.states.size();
      if (before >= (size_t)b.max_states) {
        TermPtr g = gc_junk(st.target);
        if (!index.count(canonical_key(g))) {
          l.complete = false;
          continue;
        }
      }
      size_t t = add(st.target);
      if (t >= before) {
        depth[t] = depth[s] + 1;
        queue.push_back(t);
      }
      l.edges.push_back({s, t, st.label});
      l.out[s].push_back(l.edges.size() - 1);
    }
  }
  return l;
}

Lts sub_lts(const Lts& l, size_t root) {
  std::vector<size_t> order;
  std::map<size_t, size_t> remap;
  order.push_back(root);
  remap[root] = 0;
  for (size_t qi = 0; qi < order.size(); qi++)
    for (size_t e : l.out[order[qi]]) {
      size_t t = l.edges[e].to;
      if (!remap.count(t)) {
        remap[t] = order.size();
        order.push_back(t);
      }
    }
  Lts out;
  out.calc = l.calc;
  out.complete = l.complete;
  out.depth_bound = l.depth_bound;
  out.state_bound = l.state_bound;
  for (size_t s : order) {
    out.states.push_back(l.states[s]);
    out.out.emplace_back();
  }
  for (size_t s : order)
    for (size_t e : l.out[s]) {
      out.edges.push_back({remap[s], remap[l.edges[e].to], l.edges[e].label});
      out.out[remap[s]].push_back(out.edges.size() - 1);
    }
  return out;
}

namespace {

TypeCtx restrict_ctx(const TypeCtx& g, const TermPtr& t) {
  NameSet fn = free_names(t);
  TypeCtx out;
  for (auto& [n, ty] : g)
    if (fn.count(n)) out[n] = ty;
  return out;
}

bool lts_cycle(const Lts& l) {
  std::vector<int> mark(l.states.size(), 0);
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

// BFS parents for path reconstruction; only edges accepted by `keep`.
std::vector<std::optional<size_t>> bfs_parents(
    const Lts& l, size_t root,
    const std::function<bool(const LtsEdge&)>& keep) {
  std::vector<std::optional<size_t>> par(l.states.size());
  std::vector<char> seen(l.states.size(), 0);
  std::vector<size_t> q{root};
  seen[root] = 1;
  for (size_t qi = 0; qi < q.size(); qi++)
    for (size_t e : l.out[q[qi]]) {
      if (!keep(l.edges[e])) continue;
      size_t t = l.edges[e].to;
      if (!seen[t]) {
        seen[t] = 1;
        par[t] = q[qi];
        q.push_back(t);
      }
    }
  par[root] = root;  // mark reachable; the root has itself as parent
  std::vector<std::optional<size_t>> out(l.states.size());
  for (size_t i = 0; i < l.states.size(); i++)
    if (seen[i]) out[i] = par[i].value_or(root);
  return out;
}

std::vector<size_t> path_from(const std::vector<std::optional<size_t>>& par,
                              size_t root, size_t to) {
  std::vector<size_t> p{to};
  while (to != root) {
    to = *par[to];
    p.push_back(to);
  }
  std::reverse(p.begin(), p.end());
  return p;
}

// Lazy bisimulation table between target states and encoded source states.
struct MatchTable {
  EncodedSystem& sys;
  std::vector<std::optional<Lts>> enc_lts;   // per source state
  std::vector<bool> enc_ok;
  std::map<std::pair<size_t, size_t>, Verdict> memo;

  explicit MatchTable(EncodedSystem& s)
      : sys(s),
        enc_lts(s.src_lts.states.size()),
        enc_ok(s.src_lts.states.size(), true) {}

  const Lts* encoded(size_t src_state) {
    if (!enc_lts[src_state]) {
      TermPtr sp = sys.src_lts.states[src_state].concrete;
      TypecheckResult tr =
          typecheck(Calculus::CmvPlus, restrict_ctx(sys.ctx, sp), sp);
      if (!tr.ok) {
        enc_ok[src_state] = false;
        enc_lts[src_state] = Lts{};
      } else {
        Bounds b{sys.tgt_lts.depth_bound, sys.tgt_lts.state_bound};
        enc_lts[src_state] = explore_encoded(encode(tr.deriv).term, b);
      }
    }
    return enc_ok[src_state] ? &*enc_lts[src_state] : nullptr;
  }

  Verdict match(size_t tgt_state, size_t src_state) {
    auto key = std::make_pair(tgt_state, src_state);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const Lts* e = encoded(src_state);
    Verdict v = Verdict::NotRelated;
    if (e)
      v = weak_bisim(sub_lts(sys.tgt_lts, tgt_state), *e).verdict;
    memo[key] = v;
    return v;
  }
};

Verdict combine(std::initializer_list<Verdict> vs) {
  Verdict out = Verdict::Related;
  for (Verdict v : vs) {
    if (v == Verdict::NotRelated) return Verdict::NotRelated;
    if (v == Verdict::UnknownBounded) out = Verdict::UnknownBounded;
  }
  return out;
}

}  // namespace

EncodedSystem prepare_system(const TermPtr& s, const TypeCtx& g,
                             const Bounds& b) {
  EncodedSystem sys;
  sys.source = s;
  sys.ctx = g;
  TypecheckResult tr = typecheck(Calculus::CmvPlus, g, s);
  if (!tr.ok) throw std::runtime_error("source does not typecheck: " + tr.error);
  sys.enc = encode(tr.deriv);
  sys.src_lts = explore(s, Calculus::CmvPlus, b.depth, b.max_states);
  sys.tgt_lts = explore_encoded(sys.enc.term, b);
  return sys;
}

Verdict check_completeness(EncodedSystem& sys, OcReport& rep) {
  MatchTable mt(sys);
  auto all = [](const LtsEdge&) { return true; };
  auto par = bfs_parents(sys.tgt_lts, 0, all);
  bool unknown = !sys.src_lts.complete || !sys.tgt_lts.complete;
  Verdict out = Verdict::Related;
  for (size_t i = 0; i < sys.src_lts.states.size(); i++) {
    CompletenessFinding f;
    f.source_state = i;
    f.source_term = print_term(sys.src_lts.states[i].concrete, Calculus::CmvPlus);
    f.verdict = Verdict::NotRelated;
    for (size_t j = 0; j < sys.tgt_lts.states.size(); j++) {
      Verdict v = mt.match(j, i);
      if (v == Verdict::Related) {
        f.emulation = path_from(par, 0, j);
        f.verdict = Verdict::Related;
        break;
      }
      if (v == Verdict::UnknownBounded) unknown = true;
    }
    if (f.verdict == Verdict::NotRelated && unknown)
      f.verdict = Verdict::UnknownBounded;
    rep.completeness_findings.push_back(f);
    out = combine({out, f.verdict});
    if (f.verdict == Verdict::NotRelated && rep.witness.empty())
      rep.witness = "{\"check\":\"completeness\",\"source_state\":" +
                    std::to_string(i) + "}";
  }
  if (out == Verdict::Related && unknown) out = Verdict::UnknownBounded;
  return out;
}

Verdict check_soundness(EncodedSystem& sys, OcReport& rep) {
  MatchTable mt(sys);
  auto nonstarting = [&](const LtsEdge& e) {
    return !is_starting_step(e.label, sys.enc.prov);
  };
  bool unknown = !sys.src_lts.complete || !sys.tgt_lts.complete;
  Verdict out = Verdict::Related;
  for (size_t j = 0; j < sys.tgt_lts.states.size(); j++) {
    SoundnessFinding f;
    f.target_state = j;
    f.verdict = Verdict::NotRelated;
    auto par = bfs_parents(sys.tgt_lts, j, nonstarting);
    for (size_t t = 0; t < sys.tgt_lts.states.size() && !f.starting_free; t++) {
      if (!par[t]) continue;  // not reachable without starting-steps
      for (size_t i = 0; i < sys.src_lts.states.size(); i++) {
        Verdict v = mt.match(t, i);
        if (v == Verdict::Related) {
          f.matched_source = i;
          f.completion = path_from(par, j, t);
          f.starting_free = true;
          f.verdict = Verdict::Related;
          break;
        }
        if (v == Verdict::UnknownBounded) unknown = true;
      }
    }
    if (f.verdict == Verdict::NotRelated && unknown)
      f.verdict = Verdict::UnknownBounded;
    rep.soundness_findings.push_back(f);
    out = combine({out, f.verdict});
    if (f.verdict == Verdict::NotRelated && rep.witness.empty())
      rep.witness = "{\"check\":\"soundness\",\"target_state\":" +
                    std::to_string(j) + ",\"term\":" +
                    quote_json(print_term(sys.tgt_lts.states[j].concrete,
                                          Calculus::Cmv)) +
                    "}";
  }
  if (out == Verdict::Related && unknown) out = Verdict::UnknownBounded;
  return out;
}

Verdict check_barb_sensitiveness(const EncodedSystem& sys,
                                 std::string* witness) {
  if (!sys.src_lts.complete || !sys.tgt_lts.complete)
    return Verdict::UnknownBounded;
  std::set<std::string> src, tgt;
  for (const LtsState& st : sys.src_lts.states)
    for (const std::string& b : st.barbs) src.insert(rename_name(Name{b}).text);
  for (const LtsState& st : sys.tgt_lts.states)
    tgt.insert(st.barbs.begin(), st.barbs.end());
  if (src == tgt) return Verdict::Related;
  if (witness) {
    std::ostringstream o;
    o << "{\"check\":\"barbs\",\"source\":[";
    bool first = true;
    for (auto& b : src) { if (!first) o << ","; first = false; o << quote_json(b); }
    o << "],\"target\":[";
    first = true;
    for (auto& b : tgt) { if (!first) o << ","; first = false; o << quote_json(b); }
    o << "]}";
    *witness = o.str();
  }
  return Verdict::NotRelated;
}

Verdict check_divergence_reflection(const EncodedSystem& sys,
                                    std::string* witness) {
  bool tgt_cycle = lts_cycle(sys.tgt_lts);
  if (!tgt_cycle) {
    if (!sys.tgt_lts.complete) return Verdict::UnknownBounded;
    return Verdict::Related;  // no target divergence to reflect
  }
  if (lts_cycle(sys.src_lts)) return Verdict::Related;
  if (!sys.src_lts.complete) return Verdict::UnknownBounded;
  if (witness)
    *witness = "{\"check\":\"divergence\",\"target_cycle\":true,"
               "\"source_cycle\":false}";
  return Verdict::NotRelated;
}

Verdict check_name_invariance(const TermPtr& s, const TypeCtx& g,
                              const std::map<Name, Name>& sigma,
                              std::string* witness) {
  std::set<Name> image;
  for (auto& [a, b] : sigma)
    if (!image.insert(b).second)
      throw std::invalid_argument("non-injective renaming is unsupported");

  TermPtr s2 = apply_subst(s, name_subst(sigma));
  TypeCtx g2;
  for (auto& [n, ty] : g) {
    auto it = sigma.find(n);
    g2[it == sigma.end() ? n : it->second] = ty;
  }
  TypecheckResult t1 = typecheck(Calculus::CmvPlus, g, s);
  TypecheckResult t2 = typecheck(Calculus::CmvPlus, g2, s2);
  if (!t1.ok || !t2.ok) throw std::runtime_error("source does not typecheck");

  std::map<Name, Name> sigma_prime;
  for (auto& [a, b] : sigma) sigma_prime[rename_name(a)] = rename_name(b);
  std::string lhs = print_term(encode(t2.deriv).term, Calculus::Cmv);
  std::string rhs = print_term(
      apply_subst(encode(t1.deriv).term, name_subst(sigma_prime)),
      Calculus::Cmv);
  if (lhs == rhs) return Verdict::Related;
  if (witness)
    *witness = "{\"check\":\"name-invariance\",\"lhs\":" + quote_json(lhs) +
               ",\"rhs\":" + quote_json(rhs) + "}";
  return Verdict::NotRelated;
}

Verdict check_distributability_structural(const TermPtr& s1, const TermPtr& s2,
                                          const TypeCtx& g,
                                          std::string* witness) {
  TermPtr whole = Term::par({s1, s2});
  TypecheckResult tw =
      typecheck(Calculus::CmvPlus, restrict_ctx(g, whole), whole);
  TypecheckResult t1 = typecheck(Calculus::CmvPlus, restrict_ctx(g, s1), s1);
  TypecheckResult t2 = typecheck(Calculus::CmvPlus, restrict_ctx(g, s2), s2);
  if (!tw.ok || !t1.ok || !t2.ok)
    throw std::runtime_error("pair does not typecheck");
  std::string lhs = canonical_key(encode(tw.deriv).term);
  std::string rhs = canonical_key(
      Term::par({encode(t1.deriv).term, encode(t2.deriv).term}));
  if (lhs == rhs) return Verdict::Related;
  if (witness)
    *witness = "{\"check\":\"distributability\",\"lhs\":" + quote_json(lhs) +
               ",\"rhs\":" + quote_json(rhs) + "}";
  return Verdict::NotRelated;
}

OcReport oc_check(const TermPtr& s, const TypeCtx& g, const Bounds& b) {
  OcReport rep;
  rep.source = print_term(s, Calculus::CmvPlus);
  rep.bounds = b;
  EncodedSystem sys = prepare_system(s, g, b);
  rep.completeness = check_completeness(sys, rep);
  rep.soundness = check_soundness(sys, rep);
  std::string w;
  rep.barbs = check_barb_sensitiveness(sys, &w);
  if (rep.witness.empty()) rep.witness = w;
  w.clear();
  rep.divergence = check_divergence_reflection(sys, &w);
  if (rep.witness.empty()) rep.witness = w;
  rep.verdict =
      combine({rep.completeness, rep.soundness, rep.barbs, rep.divergence});
  return rep;
}

std::string oc_report_json(const OcReport& rep) {
  std::ostringstream o;
  o << "{\"source\":" << quote_json(rep.source)
    << ",\"bounds\":{\"depth\":" << rep.bounds.depth
    << ",\"max_states\":" << rep.bounds.max_states << "}"
    << ",\"completeness\":" << quote_json(verdict_text(rep.completeness))
    << ",\"soundness\":" << quote_json(verdict_text(rep.soundness))
    << ",\"barb_sensitiveness\":" << quote_json(verdict_text(rep.barbs))
    << ",\"divergence_reflection\":" << quote_json(verdict_text(rep.divergence))
    << ",\"verdict\":" << quote_json(verdict_text(rep.verdict));
  o << ",\"completeness_findings\":[";
  for (size_t i = 0; i < rep.completeness_findings.size(); i++) {
    const CompletenessFinding& f = rep.completeness_findings[i];
    if (i) o << ",";
    o << "{\"source_state\":" << f.source_state
      << ",\"term\":" << quote_json(f.source_term) << ",\"emulation\":[";
    for (size_t k = 0; k < f.emulation.size(); k++)
      o << (k ? "," : "") << f.emulation[k];
    o << "],\"verdict\":" << quote_json(verdict_text(f.verdict)) << "}";
  }
  o << "],\"soundness_findings\":[";
  for (size_t i = 0; i < rep.soundness_findings.size(); i++) {
    const SoundnessFinding& f = rep.soundness_findings[i];
    if (i) o << ",";
    o << "{\"target_state\":" << f.target_state
      << ",\"matched_source\":" << f.matched_source << ",\"completion\":[";
    for (size_t k = 0; k < f.completion.size(); k++)
      o << (k ? "," : "") << f.completion[k];
    o << "],\"starting_free\":" << (f.starting_free ? "true" : "false")
      << ",\"verdict\":" << quote_json(verdict_text(f.verdict)) << "}";
  }
  o << "]";
  if (!rep.witness.empty()) o << ",\"witness\":" << rep.witness;
  o << "}";
  return o.str();
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

TermPtr CorpusEntry::term() const {
  return parse_term(src, Calculus::CmvPlus);
}

TypeCtx CorpusEntry::ctx() const {
  TypeCtx g;
  for (auto& [n, t] : free_ctx) g[Name{n}] = parse_type(t);
  return g;
}

const std::vector<CorpusEntry>& oc_corpus() {
  static const std::vector<CorpusEntry> corpus = [] {
    std::vector<CorpusEntry> c;
    auto add = [&](std::string name, std::string src,
                   std::vector<std::pair<std::string, std::string>> g = {}) {
      c.push_back({std::move(name), std::move(src), std::move(g)});
    };

    add("inact", "0");
    add("free-lin-int", "lin y (l!true.0)", {{"y", "lin+{l!bool.end}"}});
    add("free-lin-int-recv", "lin y (l?(z).0)", {{"y", "lin+{l?bool.end}"}});
    add("free-lin-ext", "lin y (l!true.0 + l?(z).0)",
        {{"y", "lin&{l!bool.end, l?bool.end}"}});
    add("free-two-subjects", "lin y (l!true.0) | lin w (m?(z).0)",
        {{"y", "lin+{l!bool.end}"}, {"w", "lin&{m?bool.end}"}});

    // one-shot lin sessions, both orientations and labels
    for (std::string lab : {"l", "m"})
      for (std::string val : {"true", "false"}) {
        add("lin-com-" + lab + "-" + val,
            "(new x y : lin+{" + lab + "!bool.end})(lin x (" + lab + "!" +
                val + ".0) | lin y (" + lab + "?(z).0))");
        add("lin-com-swap-" + lab + "-" + val,
            "(new x y : lin+{" + lab + "?bool.end})(lin x (" + lab +
                "?(z).0) | lin y (" + lab + "!" + val + ".0))");
      }

    // genuinely mixed lin choices
    for (std::string val : {"true", "false"}) {
      add("lin-mixed-" + val,
          "(new x y : lin+{l!bool.end, l?bool.end})(lin x (l!" + val +
              ".0 + l?(z).0) | lin y (l!" + val + ".0 + l?(z).0))");
      add("lin-mixed-two-labels-" + val,
          "(new x y : lin+{l!bool.end, m?bool.end})(lin x (l!" + val +
              ".0 + m?(z).0) | lin y (l?(z).0 + m!" + val + ".0))");
    }

    // announcing continuations keep reducts distinguishable
    add("lin-announce",
        "(new x y : lin+{l!bool.end})(lin x (l!true.(lin b1 (m!true.0))) | "
        "lin y (l?(z).(lin b2 (m!true.0))))",
        {{"b1", "lin+{m!bool.end}"}, {"b2", "lin+{m!bool.end}"}});
    add("lin-mixed-announce",
        "(new x y : lin+{l!bool.end, l?bool.end})"
        "(lin x (l!true.(lin b1 (m!true.0)) + l?(z).(lin b2 (m!true.0))) | "
        "lin y (l!false.(lin b3 (m!true.0)) + l?(z).(lin b4 (m!true.0))))",
        {{"b1", "un+{m!bool.end}"},
         {"b2", "un+{m!bool.end}"},
         {"b3", "un+{m!bool.end}"},
         {"b4", "un+{m!bool.end}"}});

    // two-step lin protocols
    add("lin-two-step",
        "(new x y : lin+{l!bool.lin&{m?bool.end}})"
        "(lin x (l!true.(lin x (m?(z).0))) | lin y (l?(z).(lin y (m!false.0))))");
    add("lin-two-step-mixed",
        "(new x y : lin+{l!bool.lin&{m!bool.end, m?bool.end}})"
        "(lin x (l!true.(lin x (m!true.0 + m?(z).0))) | "
        "lin y (l?(z).(lin y (m!false.0 + m?(w).0))))");

    // lin choices on un-typed endpoints (the worked-example shape)
    add("lin-on-un-small",
        "(new x y : rec t . un+{m!bool.t, m?bool.t})"
        "(lin x (m!true.0 + m?(z).0) | lin y (m!false.0 + m?(z).0))");
    add("lin-on-un-send",
        "(new x y : rec t . un+{l!bool.t})"
        "(lin x (l!true.0) | lin y (l?(z).0))");
    add("lin-on-un-recv",
        "(new x y : rec t . un+{l?bool.t})"
        "(lin x (l?(z).0) | lin y (l!false.0))");
    add("pm",
        "(new x y : rec t . un+{l!bool.t, l?bool.t})"
        "(lin x (l!true.0 + l?(z).0) | lin x (l!false.0 + l?(z).0) | "
        "lin y (l?(z).0 + l!true.0) | lin y (l?(z).0 + l!false.0))");
    add("worked-example",
        "(new x y : rec t . un+{l!bool.t, l?bool.t})"
        "(lin y (l!false.(lin b1 (m!true.0)) + l?(z).(lin b2 (m!true.0))) | "
        "lin x (l!true.0 + l?(z).0) | "
        "lin y (l!false.(lin b3 (m!true.0)) + l?(z).(lin b4 (m!true.0))))",
        {{"b1", "un+{m!bool.end}"},
         {"b2", "un+{m!bool.end}"},
         {"b3", "un+{m!bool.end}"},
         {"b4", "un+{m!bool.end}"}});

    // unrestricted choices (divergent token loops in the target)
    add("un-send",
        "(new x y : rec u . un+{l!bool.u})(un x (l!true.0) | un y (l?(z).0))");
    add("un-recv",
        "(new x y : rec u . un+{l?bool.u})(un x (l?(z).0) | un y (l!true.0))");
    add("un-mixed",
        "(new x y : rec u . un+{l!bool.u, l?bool.u})"
        "(un x (l!true.0 + l?(z).0) | un y (l?(z).0 + l!false.0))");
    add("un-with-lin-partner",
        "(new x y : rec u . un+{l!bool.u})(un x (l!true.0) | lin y (l?(z).0))");

    // conditionals
    add("if-true", "if true then lin y (l!true.0) else 0",
        {{"y", "un+{l!bool.end}"}});
    add("if-false", "if false then 0 else lin y (l!true.0)",
        {{"y", "un+{l!bool.end}"}});
    add("if-expr", "if true and not false then lin y (l!true.0) else 0",
        {{"y", "un+{l!bool.end}"}});
    add("if-nested",
        "if true then (if false then 0 else lin y (l!true.0)) else 0",
        {{"y", "un+{l!bool.end}"}});
    add("if-over-session",
        "(new x y : lin+{l!bool.end})"
        "((if true then lin x (l!true.0) else lin x (l!false.0)) | "
        "lin y (l?(z).0))");

    // parallel and nested restriction shapes
    add("par-two-sessions",
        "(new x y : lin+{l!bool.end})(lin x (l!true.0) | lin y (l?(z).0)) | "
        "(new v w : lin+{m!bool.end})(lin v (m!false.0) | lin w (m?(z).0))");
    add("par-free",
        "lin y (l!true.0) | lin w (m!false.0)",
        {{"y", "lin+{l!bool.end}"}, {"w", "lin+{m!bool.end}"}});
    add("res-nested",
        "(new x y : lin+{l!bool.end})((new v w : lin+{m!bool.end})"
        "(lin x (l!true.0) | lin v (m!false.0) | lin w (m?(z).0)) | "
        "lin y (l?(z).0))");
    add("res-unused-pair",
        "(new x y : end)(0) | lin b1 (m!true.0)",
        {{"b1", "lin+{m!bool.end}"}});

    // bigger mixed-choice batteries for case coverage
    for (std::string val : {"true", "false"}) {
      add("lin-ext-first-" + val,
          "(new y x : lin+{l!bool.end, l?bool.end})"
          "(lin x (l!" + val + ".0 + l?(z).0) | lin y (l?(z).0 + l!" + val +
              ".0))");
      add("lin-three-summands-" + val,
          "(new x y : lin+{l!bool.end, l?bool.end, m!bool.end})"
          "(lin x (l!" + val + ".0 + l?(z).0 + m!" + val + ".0) | "
          "lin y (l?(z).0 + l!" + val + ".0 + m?(w).0))");
    }
    add("free-un-subject", "un y (l!true.0)",
        {{"y", "rec u . un+{l!bool.u}"}});
    add("free-un-ext-subject", "un y (l?(z).0)",
        {{"y", "rec u . un&{l?bool.u}"}});
    add("un-if-guarded",
        "(new x y : rec u . un+{l!bool.u})"
        "(if true then un x (l!true.0) else 0 | un y (l?(z).0))");
    add("three-free-announces",
        "lin a1 (l!true.0) | lin a2 (l!false.0) | lin a3 (l?(z).0)",
        {{"a1", "lin+{l!bool.end}"},
         {"a2", "lin+{l!bool.end}"},
         {"a3", "lin&{l?bool.end}"}});
    add("lin-chain-three",
        "(new x y : lin+{l!bool.lin+{m!bool.end}})"
        "(lin x (l!true.(lin x (m!false.0))) | "
        "lin y (l?(z).(lin y (m?(w).0))))");
    add("lin-on-un-announce",
        "(new x y : rec t . un+{l!bool.t})"
        "(lin x (l!true.(lin b1 (m!true.0))) | lin y (l?(z).0))",
        {{"b1", "lin+{m!bool.end}"}});
    add("lin-on-un-both-mixed",
        "(new x y : rec t . un+{l!bool.t, l?bool.t})"
        "(lin x (l!true.0 + l?(z).0) | lin y (l!false.0 + l?(z).0))");
    add("un-two-labels",
        "(new x y : rec u . un+{l!bool.u, m?bool.u})"
        "(un x (l!true.0 + m?(z).0) | un y (l?(z).0 + m!false.0))");

    return c;
  }();
  return corpus;
}

std::map<Name, Name> random_renaming(const TermPtr& s, std::mt19937& rng) {
  NameSet fn = free_names(s);
  std::map<Name, Name> sigma;
  size_t next = 0;
  for (const Name& n : fn) {
    Name target;
    do {
      target = Name{"q" + std::to_string(rng() % 1000) + "n" +
                    std::to_string(next++)};
    } while (fn.count(target));
    sigma[n] = target;
  }
  return sigma;
}

}  // namespace wb
