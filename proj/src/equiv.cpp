#include "wb/equiv.hpp"

#include <algorithm>
#include <sstream>

#include "wb/printer.hpp"

namespace wb {

std::string verdict_text(Verdict v) {
  switch (v) {
    case Verdict::Related: return "related";
    case Verdict::NotRelated: return "not-related";
    case Verdict::UnknownBounded: return "unknown-bounded";
  }
  return "?";
}

namespace {

struct Closure {
  // reach[i]: sorted reflexive-transitive reduction closure of state i
  std::vector<std::vector<size_t>> reach;
  std::vector<std::set<std::string>> wbarbs;
};

Closure closure_of(const Lts& l) {
  Closure c;
  size_t n = l.states.size();
  c.reach.resize(n);
  c.wbarbs.resize(n);
  for (size_t i = 0; i < n; i++) {
    std::vector<char> seen(n, 0);
    std::vector<size_t> stack{i};
    seen[i] = 1;
    while (!stack.empty()) {
      size_t s = stack.back();
      stack.pop_back();
      c.reach[i].push_back(s);
      for (size_t e : l.out[s]) {
        size_t t = l.edges[e].to;
        if (!seen[t]) {
          seen[t] = 1;
          stack.push_back(t);
        }
      }
    }
    std::sort(c.reach[i].begin(), c.reach[i].end());
    for (size_t s : c.reach[i])
      c.wbarbs[i].insert(l.states[s].barbs.begin(), l.states[s].barbs.end());
  }
  return c;
}

std::string json_barbs(const std::set<std::string>& b) {
  std::string o = "[";
  bool first = true;
  for (auto& s : b) {
    if (!first) o += ",";
    first = false;
    o += quote_json(s);
  }
  return o + "]";
}

std::string barb_witness(const char* reason, const Lts& a, const Lts& b,
                         size_t i, size_t j, const Closure& ca,
                         const Closure& cb) {
  std::ostringstream o;
  o << "{\"reason\":" << quote_json(reason) << ",\"state_a\":" << i
    << ",\"state_b\":" << j
    << ",\"term_a\":" << quote_json(print_term(a.states[i].concrete, a.calc))
    << ",\"term_b\":" << quote_json(print_term(b.states[j].concrete, b.calc))
    << ",\"weak_barbs_a\":" << json_barbs(ca.wbarbs[i])
    << ",\"weak_barbs_b\":" << json_barbs(cb.wbarbs[j]) << "}";
  return o.str();
}

std::string move_witness(const char* side, const Lts& l, size_t from,
                         size_t to) {
  std::ostringstream o;
  o << "{\"reason\":\"unmatched-move\",\"side\":" << quote_json(side)
    << ",\"from\":" << from << ",\"to\":" << to
    << ",\"target\":" << quote_json(print_term(l.states[to].concrete, l.calc))
    << "}";
  return o.str();
}

}  // namespace

RelationResult weak_bisim(const Lts& a, const Lts& b) {
  RelationResult r;
  if (!a.complete || !b.complete) {
    r.verdict = Verdict::UnknownBounded;
    return r;
  }
  Closure ca = closure_of(a), cb = closure_of(b);
  size_t na = a.states.size(), nb = b.states.size();
  std::vector<char> alive(na * nb, 0);
  for (size_t i = 0; i < na; i++)
    for (size_t j = 0; j < nb; j++)
      alive[i * nb + j] = ca.wbarbs[i] == cb.wbarbs[j];

  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < na; i++)
      for (size_t j = 0; j < nb; j++) {
        if (!alive[i * nb + j]) continue;
        bool ok = true;
        for (size_t i2 : ca.reach[i]) {
          bool matched = false;
          for (size_t j2 : cb.reach[j])
            if (alive[i2 * nb + j2]) { matched = true; break; }
          if (!matched) { ok = false; break; }
        }
        if (ok)
          for (size_t j2 : cb.reach[j]) {
            bool matched = false;
            for (size_t i2 : ca.reach[i])
              if (alive[i2 * nb + j2]) { matched = true; break; }
            if (!matched) { ok = false; break; }
          }
        if (!ok) {
          alive[i * nb + j] = 0;
          changed = true;
        }
      }
  }

  for (size_t i = 0; i < na; i++)
    for (size_t j = 0; j < nb; j++)
      if (alive[i * nb + j]) r.relation.emplace_back(i, j);

  if (alive[0]) {
    r.verdict = Verdict::Related;
    return r;
  }
  r.verdict = Verdict::NotRelated;
  if (ca.wbarbs[0] != cb.wbarbs[0]) {
    r.witness = barb_witness("weak-barb-mismatch", a, b, 0, 0, ca, cb);
    return r;
  }
  for (size_t i2 : ca.reach[0]) {
    bool matched = false;
    for (size_t j2 : cb.reach[0])
      if (alive[i2 * nb + j2]) { matched = true; break; }
    if (!matched) {
      r.witness = move_witness("a", a, 0, i2);
      return r;
    }
  }
  for (size_t j2 : cb.reach[0]) {
    bool matched = false;
    for (size_t i2 : ca.reach[0])
      if (alive[i2 * nb + j2]) { matched = true; break; }
    if (!matched) {
      r.witness = move_witness("b", b, 0, j2);
      return r;
    }
  }
  r.witness = "{\"reason\":\"root-pair-removed\"}";
  return r;
}

RelationResult coupled_sim(const Lts& a, const Lts& b) {
  RelationResult r;
  if (!a.complete || !b.complete) {
    r.verdict = Verdict::UnknownBounded;
    return r;
  }
  Closure ca = closure_of(a), cb = closure_of(b);
  size_t na = a.states.size(), nb = b.states.size();
  // ab[i*nb+j]: a-state i coupled-simulated by b-state j; ba the converse.
  std::vector<char> ab(na * nb, 0), ba(na * nb, 0);
  for (size_t i = 0; i < na; i++)
    for (size_t j = 0; j < nb; j++) {
      ab[i * nb + j] = std::includes(cb.wbarbs[j].begin(), cb.wbarbs[j].end(),
                                     ca.wbarbs[i].begin(), ca.wbarbs[i].end());
      ba[i * nb + j] = std::includes(ca.wbarbs[i].begin(), ca.wbarbs[i].end(),
                                     cb.wbarbs[j].begin(), cb.wbarbs[j].end());
    }

  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < na; i++)
      for (size_t j = 0; j < nb; j++) {
        if (ab[i * nb + j]) {
          // every a-move answered in same orientation and, separately, by an
          // overtaking b-state related in the swapped orientation
          bool ok = true;
          for (size_t i2 : ca.reach[i]) {
            bool fwd = false, swp = false;
            for (size_t j2 : cb.reach[j]) {
              if (ab[i2 * nb + j2]) fwd = true;
              if (ba[i2 * nb + j2]) swp = true;
              if (fwd && swp) break;
            }
            if (!fwd || !swp) { ok = false; break; }
          }
          if (!ok) { ab[i * nb + j] = 0; changed = true; }
        }
        if (ba[i * nb + j]) {
          bool ok = true;
          for (size_t j2 : cb.reach[j]) {
            bool fwd = false, swp = false;
            for (size_t i2 : ca.reach[i]) {
              if (ba[i2 * nb + j2]) fwd = true;
              if (ab[i2 * nb + j2]) swp = true;
              if (fwd && swp) break;
            }
            if (!fwd || !swp) { ok = false; break; }
          }
          if (!ok) { ba[i * nb + j] = 0; changed = true; }
        }
      }
  }

  for (size_t i = 0; i < na; i++)
    for (size_t j = 0; j < nb; j++) {
      if (ab[i * nb + j]) r.relation.emplace_back(i, j);
      if (ba[i * nb + j]) r.relation_rev.emplace_back(i, j);
    }

  if (ab[0] && ba[0]) {
    r.verdict = Verdict::Related;
    return r;
  }
  r.verdict = Verdict::NotRelated;
  if (!std::includes(cb.wbarbs[0].begin(), cb.wbarbs[0].end(),
                     ca.wbarbs[0].begin(), ca.wbarbs[0].end())) {
    r.witness = barb_witness("weak-barb-not-included", a, b, 0, 0, ca, cb);
    return r;
  }
  if (!std::includes(ca.wbarbs[0].begin(), ca.wbarbs[0].end(),
                     cb.wbarbs[0].begin(), cb.wbarbs[0].end())) {
    r.witness = barb_witness("weak-barb-not-included", b, a, 0, 0, cb, ca);
    return r;
  }
  if (!ab[0]) {
    for (size_t i2 : ca.reach[0]) {
      bool fwd = false, swp = false;
      for (size_t j2 : cb.reach[0]) {
        if (ab[i2 * nb + j2]) fwd = true;
        if (ba[i2 * nb + j2]) swp = true;
      }
      if (!fwd || !swp) {
        r.witness = move_witness("a", a, 0, i2);
        return r;
      }
    }
  }
  for (size_t j2 : cb.reach[0]) {
    bool fwd = false, swp = false;
    for (size_t i2 : ca.reach[0]) {
      if (ba[i2 * nb + j2]) fwd = true;
      if (ab[i2 * nb + j2]) swp = true;
    }
    if (!fwd || !swp) {
      r.witness = move_witness("b", b, 0, j2);
      return r;
    }
  }
  r.witness = "{\"reason\":\"root-pair-removed\"}";
  return r;
}

}  // namespace wb
