#include "wb/types.hpp"

#include <functional>
#include <set>
#include <stdexcept>

namespace wb {

static std::shared_ptr<TypeNode> tnode(TKind k) {
  auto t = std::make_shared<TypeNode>();
  t->kind = k;
  return t;
}

TypePtr TypeNode::end() {
  static TypePtr t = tnode(TKind::End);
  return t;
}
TypePtr TypeNode::unit() {
  static TypePtr t = tnode(TKind::UnitT);
  return t;
}
TypePtr TypeNode::boolean() {
  static TypePtr t = tnode(TKind::BoolT);
  return t;
}
TypePtr TypeNode::var(Name n) {
  auto t = tnode(TKind::Var);
  t->tvar = std::move(n);
  return t;
}
TypePtr TypeNode::rec(Name n, TypePtr body) {
  auto t = tnode(TKind::Rec);
  t->tvar = std::move(n);
  t->rec_body = std::move(body);
  return t;
}
TypePtr TypeNode::mix_choice(Qual q, View v, std::vector<MixTBranch> bs) {
  auto t = tnode(TKind::Mix);
  t->qual = q;
  t->view = v;
  t->mix = std::move(bs);
  return t;
}
TypePtr TypeNode::com(Qual q, Pol p, TypePtr payload, TypePtr cont) {
  auto t = tnode(TKind::Com);
  t->qual = q;
  t->pol = p;
  t->payload = std::move(payload);
  t->cont = std::move(cont);
  return t;
}
TypePtr TypeNode::plain_choice(Qual q, View v,
                               std::vector<std::pair<Label, TypePtr>> arms) {
  auto t = tnode(TKind::Plain);
  t->qual = q;
  t->view = v;
  t->plain = std::move(arms);
  return t;
}

static bool is_atomic(const TypePtr& t) {
  switch (t->kind) {
    case TKind::End:
    case TKind::UnitT:
    case TKind::BoolT:
    case TKind::Var:
    case TKind::Mix:
    case TKind::Plain:
      return true;
    default:
      return false;
  }
}

std::string print_type(const TypePtr& t) {
  switch (t->kind) {
    case TKind::End: return "end";
    case TKind::UnitT: return "unit";
    case TKind::BoolT: return "bool";
    case TKind::Var: return t->tvar.text;
    case TKind::Rec:
      return "rec " + t->tvar.text + "." + print_type(t->rec_body);
    case TKind::Com: {
      std::string pay = print_type(t->payload);
      if (!is_atomic(t->payload)) pay = "(" + pay + ")";
      return std::string(to_string(t->qual)) + to_string(t->pol) + pay + "." +
             print_type(t->cont);
    }
    case TKind::Mix: {
      std::string out = std::string(to_string(t->qual)) + to_string(t->view) + "{";
      for (size_t i = 0; i < t->mix.size(); ++i) {
        if (i) out += ", ";
        const MixTBranch& b = t->mix[i];
        std::string pay = print_type(b.payload);
        if (!is_atomic(b.payload)) pay = "(" + pay + ")";
        out += b.label + to_string(b.pol) + pay + "." + print_type(b.cont);
      }
      return out + "}";
    }
    case TKind::Plain: {
      std::string out = std::string(to_string(t->qual)) + to_string(t->view) + "{";
      for (size_t i = 0; i < t->plain.size(); ++i) {
        if (i) out += ", ";
        out += t->plain[i].first + ": " + print_type(t->plain[i].second);
      }
      return out + "}";
    }
  }
  return "?";
}

static TypePtr subst_tvar(const TypePtr& t, const Name& v, const TypePtr& repl) {
  switch (t->kind) {
    case TKind::End:
    case TKind::UnitT:
    case TKind::BoolT:
      return t;
    case TKind::Var:
      return t->tvar == v ? repl : t;
    case TKind::Rec:
      if (t->tvar == v) return t;  // shadowed
      return TypeNode::rec(t->tvar, subst_tvar(t->rec_body, v, repl));
    case TKind::Com:
      return TypeNode::com(t->qual, t->pol, subst_tvar(t->payload, v, repl),
                           subst_tvar(t->cont, v, repl));
    case TKind::Mix: {
      std::vector<MixTBranch> bs;
      for (const MixTBranch& b : t->mix)
        bs.push_back(MixTBranch{b.label, b.pol, subst_tvar(b.payload, v, repl),
                                subst_tvar(b.cont, v, repl)});
      return TypeNode::mix_choice(t->qual, t->view, std::move(bs));
    }
    case TKind::Plain: {
      std::vector<std::pair<Label, TypePtr>> arms;
      for (const auto& [l, u] : t->plain)
        arms.push_back({l, subst_tvar(u, v, repl)});
      return TypeNode::plain_choice(t->qual, t->view, std::move(arms));
    }
  }
  return t;
}

bool contractive(const TypePtr& t) {
  std::function<bool(const TypePtr&, std::set<std::string>)> go =
      [&](const TypePtr& u, std::set<std::string> pending) -> bool {
    switch (u->kind) {
      case TKind::Var:
        return !pending.count(u->tvar.text);
      case TKind::Rec: {
        pending.insert(u->tvar.text);
        if (!go(u->rec_body, pending)) return false;
        return contractive(u->rec_body);
      }
      case TKind::Com:
        return contractive(u->payload) && contractive(u->cont);
      case TKind::Mix:
        for (const MixTBranch& b : u->mix)
          if (!contractive(b.payload) || !contractive(b.cont)) return false;
        return true;
      case TKind::Plain:
        for (const auto& [l, v] : u->plain)
          if (!contractive(v)) return false;
        return true;
      default:
        return true;
    }
  };
  return go(t, {});
}

TypePtr unfold(const TypePtr& t) {
  TypePtr u = t;
  int guard = 0;
  while (u->kind == TKind::Rec) {
    u = subst_tvar(u->rec_body, u->tvar, u);
    if (++guard > 64) throw std::runtime_error("non-contractive type");
  }
  return u;
}

// ---------------------------------------------------------------------------
// Coinductive relations.  Pairs of (printed) unfolded types already under
// consideration are assumed to be related; regular types make this terminate.
// ---------------------------------------------------------------------------

namespace {

using Seen = std::set<std::pair<std::string, std::string>>;

bool equiv_go(const TypePtr& a0, const TypePtr& b0, Seen& seen) {
  TypePtr a = unfold(a0), b = unfold(b0);
  auto key = std::make_pair(print_type(a), print_type(b));
  if (!seen.insert(key).second) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TKind::End:
    case TKind::UnitT:
    case TKind::BoolT:
      return true;
    case TKind::Var:
      return a->tvar == b->tvar;
    case TKind::Com:
      return a->qual == b->qual && a->pol == b->pol &&
             equiv_go(a->payload, b->payload, seen) &&
             equiv_go(a->cont, b->cont, seen);
    case TKind::Mix: {
      if (a->qual != b->qual || a->view != b->view) return false;
      if (a->mix.size() != b->mix.size()) return false;
      for (const MixTBranch& ba : a->mix) {
        const MixTBranch* bb = nullptr;
        for (const MixTBranch& cand : b->mix)
          if (cand.label == ba.label && cand.pol == ba.pol) bb = &cand;
        if (!bb) return false;
        if (!equiv_go(ba.payload, bb->payload, seen)) return false;
        if (!equiv_go(ba.cont, bb->cont, seen)) return false;
      }
      return true;
    }
    case TKind::Plain: {
      if (a->qual != b->qual || a->view != b->view) return false;
      if (a->plain.size() != b->plain.size()) return false;
      for (const auto& [l, ta] : a->plain) {
        const TypePtr* tb = nullptr;
        for (const auto& [m, cand] : b->plain)
          if (m == l) tb = &cand;
        if (!tb || !equiv_go(ta, *tb, seen)) return false;
      }
      return true;
    }
    default:
      return false;
  }
}

bool dual_go(const TypePtr& a0, const TypePtr& b0, Seen& seen) {
  TypePtr a = unfold(a0), b = unfold(b0);
  auto key = std::make_pair(print_type(a), print_type(b));
  if (!seen.insert(key).second) return true;
  if (a->kind == TKind::End && b->kind == TKind::End) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TKind::Com: {
      if (a->qual != b->qual || a->pol == b->pol) return false;
      Seen eq;
      return equiv_go(a->payload, b->payload, eq) && dual_go(a->cont, b->cont, seen);
    }
    case TKind::Mix: {
      if (a->qual != b->qual || a->view == b->view) return false;
      if (a->mix.size() != b->mix.size()) return false;
      for (const MixTBranch& ba : a->mix) {
        Pol want = ba.pol == Pol::Send ? Pol::Recv : Pol::Send;
        const MixTBranch* bb = nullptr;
        for (const MixTBranch& cand : b->mix)
          if (cand.label == ba.label && cand.pol == want) bb = &cand;
        if (!bb) return false;
        Seen eq;
        if (!equiv_go(ba.payload, bb->payload, eq)) return false;
        if (!dual_go(ba.cont, bb->cont, seen)) return false;
      }
      return true;
    }
    case TKind::Plain: {
      if (a->qual != b->qual || a->view == b->view) return false;
      if (a->plain.size() != b->plain.size()) return false;
      for (const auto& [l, ta] : a->plain) {
        const TypePtr* tb = nullptr;
        for (const auto& [m, cand] : b->plain)
          if (m == l) tb = &cand;
        if (!tb || !dual_go(ta, *tb, seen)) return false;
      }
      return true;
    }
    default:
      return false;
  }
}

bool sub_go(const TypePtr& a0, const TypePtr& b0, Seen& seen) {
  TypePtr a = unfold(a0), b = unfold(b0);
  auto key = std::make_pair(print_type(a), print_type(b));
  if (!seen.insert(key).second) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TKind::End:
    case TKind::UnitT:
    case TKind::BoolT:
      return true;
    case TKind::Var:
      return a->tvar == b->tvar;
    case TKind::Com: {
      if (a->qual != b->qual || a->pol != b->pol) return false;
      bool pay_ok = a->pol == Pol::Send ? sub_go(b->payload, a->payload, seen)
                                        : sub_go(a->payload, b->payload, seen);
      return pay_ok && sub_go(a->cont, b->cont, seen);
    }
    case TKind::Mix: {
      if (a->qual != b->qual || a->view != b->view) return false;
      // an internal-view supertype promises fewer branches, an external-view
      // supertype offers more; shared branches relate componentwise
      const auto& need = a->view == View::Internal ? b->mix : a->mix;
      const auto& have = a->view == View::Internal ? a->mix : b->mix;
      for (const MixTBranch& n : need) {
        const MixTBranch* h = nullptr;
        for (const MixTBranch& cand : have)
          if (cand.label == n.label && cand.pol == n.pol) h = &cand;
        if (!h) return false;
        const MixTBranch& ba = a->view == View::Internal ? *h : n;
        const MixTBranch& bb = a->view == View::Internal ? n : *h;
        bool pay_ok = ba.pol == Pol::Send ? sub_go(bb.payload, ba.payload, seen)
                                          : sub_go(ba.payload, bb.payload, seen);
        if (!pay_ok || !sub_go(ba.cont, bb.cont, seen)) return false;
      }
      return true;
    }
    case TKind::Plain: {
      if (a->qual != b->qual || a->view != b->view) return false;
      const auto& need = a->view == View::Internal ? b->plain : a->plain;
      const auto& have = a->view == View::Internal ? a->plain : b->plain;
      for (const auto& [l, tn] : need) {
        const TypePtr* th = nullptr;
        for (const auto& [m, cand] : have)
          if (m == l) th = &cand;
        if (!th) return false;
        const TypePtr& ta = a->view == View::Internal ? *th : tn;
        const TypePtr& tb = a->view == View::Internal ? tn : *th;
        if (!sub_go(ta, tb, seen)) return false;
      }
      return true;
    }
    default:
      return false;
  }
}

}  // namespace

bool type_equiv(const TypePtr& a, const TypePtr& b) {
  Seen seen;
  return equiv_go(a, b, seen);
}

bool dual(const TypePtr& a, const TypePtr& b) {
  Seen seen;
  return dual_go(a, b, seen);
}

TypePtr dualize(const TypePtr& t) {
  switch (t->kind) {
    case TKind::End:
      return t;
    case TKind::Var:
      return t;
    case TKind::Rec:
      return TypeNode::rec(t->tvar, dualize(t->rec_body));
    case TKind::Com:
      return TypeNode::com(t->qual, t->pol == Pol::Send ? Pol::Recv : Pol::Send,
                           t->payload, dualize(t->cont));
    case TKind::Mix: {
      std::vector<MixTBranch> bs;
      for (const MixTBranch& b : t->mix)
        bs.push_back(MixTBranch{b.label,
                                b.pol == Pol::Send ? Pol::Recv : Pol::Send,
                                b.payload, dualize(b.cont)});
      return TypeNode::mix_choice(
          t->qual, t->view == View::Internal ? View::External : View::Internal,
          std::move(bs));
    }
    case TKind::Plain: {
      std::vector<std::pair<Label, TypePtr>> arms;
      for (const auto& [l, u] : t->plain) arms.push_back({l, dualize(u)});
      return TypeNode::plain_choice(
          t->qual, t->view == View::Internal ? View::External : View::Internal,
          std::move(arms));
    }
    default:
      throw std::runtime_error("dualize: " + print_type(t) + " is not a session type");
  }
}

bool subtype(const TypePtr& a, const TypePtr& b) {
  Seen seen;
  return sub_go(a, b, seen);
}

bool un_type(const TypePtr& t) {
  TypePtr u = unfold(t);
  switch (u->kind) {
    case TKind::End:
    case TKind::UnitT:
    case TKind::BoolT:
      return true;
    case TKind::Com:
    case TKind::Mix:
    case TKind::Plain:
      return u->qual == Qual::Un;
    default:
      return false;
  }
}

bool un_ctx(const TypeCtx& g) {
  for (const auto& [n, t] : g)
    if (!un_type(t)) return false;
  return true;
}

std::string print_ctx(const TypeCtx& g) {
  std::string out;
  for (const auto& [n, t] : g) {
    if (!out.empty()) out += ", ";
    out += n.text + ": " + print_type(t);
  }
  return out;
}

std::vector<std::pair<TypeCtx, TypeCtx>> ctx_split(const TypeCtx& g) {
  std::vector<Name> lin;
  TypeCtx shared;
  for (const auto& [n, t] : g) {
    if (un_type(t))
      shared[n] = t;
    else
      lin.push_back(n);
  }
  if (lin.size() > 20) throw std::runtime_error("ctx_split: too many linear entries");
  std::vector<std::pair<TypeCtx, TypeCtx>> out;
  for (size_t mask = 0; mask < (size_t{1} << lin.size()); ++mask) {
    TypeCtx g1 = shared, g2 = shared;
    for (size_t i = 0; i < lin.size(); ++i) {
      if (mask & (size_t{1} << i))
        g1[lin[i]] = g.at(lin[i]);
      else
        g2[lin[i]] = g.at(lin[i]);
    }
    out.push_back({std::move(g1), std::move(g2)});
  }
  return out;
}

std::optional<TypeCtx> ctx_add(const TypeCtx& g, const Name& x, const TypePtr& t) {
  auto it = g.find(x);
  if (it == g.end()) {
    TypeCtx out = g;
    out[x] = t;
    return out;
  }
  if (un_type(it->second) && un_type(t) && type_equiv(it->second, t)) return g;
  return std::nullopt;
}

}  // namespace wb
