#include "wb/encode.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "wb/printer.hpp"
#include "wb/syntax.hpp"

namespace wb {

std::vector<ChoiceGroup> reorder_choice(const std::vector<MixBranch>& branches) {
  std::vector<ChoiceGroup> groups;
  auto group_of = [&](const Label& l) -> ChoiceGroup& {
    for (ChoiceGroup& g : groups)
      if (g.label == l) return g;
    groups.push_back(ChoiceGroup{l, {}, {}});
    return groups.back();
  };
  for (size_t i = 0; i < branches.size(); ++i) {
    ChoiceGroup& g = group_of(branches[i].label);
    if (branches[i].pol == Pol::Send)
      g.sends.push_back(i);
    else
      g.recvs.push_back(i);
  }
  std::sort(groups.begin(), groups.end(),
            [](const ChoiceGroup& a, const ChoiceGroup& b) { return a.label < b.label; });
  return groups;
}

TermPtr nd_choice(const std::vector<TermPtr>& options, NameGen& gen,
                  std::pair<Name, Name>* session) {
  if (options.empty())
    throw std::runtime_error("nd_choice of an empty option set");
  Name s = gen.fresh("s");
  Name t = gen.fresh("t");
  if (session) *session = {s, t};
  std::vector<CmvArm> arms;
  std::vector<TermPtr> comps;
  for (size_t i = 0; i < options.size(); ++i) {
    Label l = "opt" + std::to_string(i + 1);
    arms.push_back(CmvArm{l, options[i]});
    comps.push_back(Term::cmv_sel(t, l, Term::inact()));
  }
  std::vector<TermPtr> body{Term::cmv_branch(s, std::move(arms))};
  body.insert(body.end(), comps.begin(), comps.end());

  std::vector<std::pair<Label, TypePtr>> sarm;
  for (size_t i = 0; i < options.size(); ++i)
    sarm.push_back({"opt" + std::to_string(i + 1), TypeNode::end()});
  TypePtr stype = TypeNode::plain_choice(Qual::Un, View::External, sarm);
  return Term::res_sess(s, t, Term::par(std::move(body)), print_type(stype));
}

Name rename_name(const Name& n) { return Name{n.text + "_"}; }

Value rename_value(const Value& v) {
  if (v.kind == Value::Kind::NameRef) return Value::of(rename_name(v.name));
  return v;
}

static ExprPtr rename_expr(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Val: return Expr::val(rename_value(e->value));
    case Expr::Kind::Not: return Expr::mk_not(rename_expr(e->lhs));
    case Expr::Kind::And: return Expr::mk_and(rename_expr(e->lhs), rename_expr(e->rhs));
    case Expr::Kind::Or: return Expr::mk_or(rename_expr(e->lhs), rename_expr(e->rhs));
  }
  return e;
}

// ---------------------------------------------------------------------------
// type translation
// ---------------------------------------------------------------------------

static std::string arm_tag(Pol p, View v) {
  bool snd = (p == Pol::Send) == (v == View::Internal);
  return snd ? "$snd" : "$rcv";
}

static void collect_tvars(const TypePtr& t, NameSet& out) {
  if (!t) return;
  switch (t->kind) {
    case TKind::Var: out.insert(t->tvar); break;
    case TKind::Rec:
      out.insert(t->tvar);
      collect_tvars(t->rec_body, out);
      break;
    case TKind::Com:
      collect_tvars(t->payload, out);
      collect_tvars(t->cont, out);
      break;
    case TKind::Mix:
      for (const MixTBranch& b : t->mix) {
        collect_tvars(b.payload, out);
        collect_tvars(b.cont, out);
      }
      break;
    case TKind::Plain:
      for (const auto& [l, a] : t->plain) collect_tvars(a, out);
      break;
    default:
      break;
  }
}

// The payload protocol carried by the channel that stands in for an
// unrestricted mixed choice: the receiver branches on the mangled label and
// then performs the single transmission of that summand.
static TypePtr mix_payload_type(const TypePtr& u) {
  std::vector<std::pair<Label, TypePtr>> arms;
  for (const MixTBranch& b : u->mix) {
    Pol dir = b.pol;
    if (u->view == View::Internal) dir = b.pol == Pol::Send ? Pol::Recv : Pol::Send;
    arms.push_back({b.label + arm_tag(b.pol, u->view),
                    TypeNode::com(Qual::Lin, dir, encode_type(b.payload),
                                  TypeNode::end())});
  }
  std::sort(arms.begin(), arms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return TypeNode::plain_choice(Qual::Lin, View::External, std::move(arms));
}

static TypePtr encode_un_mix(const TypePtr& u) {
  NameSet tvs;
  for (const MixTBranch& b : u->mix) collect_tvars(b.payload, tvs);
  Name tv{"t"};
  for (int i = 1; tvs.count(tv); ++i) tv = Name{"t" + std::to_string(i)};
  Pol dir = u->view == View::Internal ? Pol::Send : Pol::Recv;
  return TypeNode::rec(
      tv, TypeNode::com(Qual::Un, dir, mix_payload_type(u), TypeNode::var(tv)));
}

TypePtr encode_type(const TypePtr& t) {
  switch (t->kind) {
    case TKind::End:
    case TKind::UnitT:
    case TKind::BoolT:
    case TKind::Var:
      return t;
    case TKind::Rec: {
      TypePtr u = unfold(t);
      if (u->kind == TKind::Mix && u->qual == Qual::Un) return encode_un_mix(u);
      return TypeNode::rec(t->tvar, encode_type(t->rec_body));
    }
    case TKind::Mix: {
      if (t->qual == Qual::Un) return encode_un_mix(t);
      std::vector<std::pair<Label, TypePtr>> arms;
      for (const MixTBranch& b : t->mix)
        arms.push_back({b.label + arm_tag(b.pol, t->view),
                        TypeNode::com(Qual::Lin, b.pol, encode_type(b.payload),
                                      encode_type(b.cont))});
      std::sort(arms.begin(), arms.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      return TypeNode::plain_choice(Qual::Lin, t->view, std::move(arms));
    }
    case TKind::Com:
      return TypeNode::com(t->qual, t->pol, encode_type(t->payload),
                           encode_type(t->cont));
    case TKind::Plain: {
      std::vector<std::pair<Label, TypePtr>> arms;
      for (const auto& [l, a] : t->plain) arms.push_back({l, encode_type(a)});
      return TypeNode::plain_choice(t->qual, t->view, std::move(arms));
    }
  }
  return t;
}

TypeCtx encode_ctx(const TypeCtx& g) {
  TypeCtx out;
  for (const auto& [n, t] : g) out[rename_name(n)] = encode_type(t);
  return out;
}

// ---------------------------------------------------------------------------
// the term translation
// ---------------------------------------------------------------------------

namespace {

struct Encoder {
  NameGen gen;
  EncodeProv prov;

  Name draw(const std::string& base) {
    Name n = gen.fresh(base);
    prov.fresh.push_back(n);
    return n;
  }

  TermPtr nd(const std::vector<TermPtr>& options, bool starting) {
    std::pair<Name, Name> st;
    TermPtr r = nd_choice(options, gen, &st);
    prov.fresh.push_back(st.first);
    prov.fresh.push_back(st.second);
    if (starting) prov.start_sessions.insert(st);
    return r;
  }

  TermPtr enc(const DerivPtr& d, const std::string& path) {
    auto tag = [&](const char* c) { prov.cases.push_back({path, c}); };
    if (d->rule == "T-Inact") {
      tag("inact");
      return Term::inact();
    }
    if (d->rule == "T-Par") {
      tag("par");
      std::vector<TermPtr> comps;
      for (size_t i = 0; i < d->premises.size(); ++i)
        comps.push_back(enc(d->premises[i], path + "/p" + std::to_string(i)));
      return Term::par(std::move(comps));
    }
    if (d->rule == "T-If") {
      tag("if");
      return Term::cond_if(rename_expr(d->subject->cond),
                           enc(d->premises[0], path + "/t"),
                           enc(d->premises[1], path + "/e"));
    }
    if (d->rule == "T-Res") {
      tag("res");
      return Term::res_sess(rename_name(d->subject->n1),
                            rename_name(d->subject->n2),
                            enc(d->premises[0], path + "/b"),
                            print_type(encode_type(d->type)));
    }
    if (d->rule == "T-Choice") return enc_choice(d, path);
    throw std::runtime_error("encoding is defined on cmv+ derivations only (rule " +
                             d->rule + ")");
  }

  TermPtr enc_choice(const DerivPtr& d, const std::string& path) {
    const TermPtr& p = d->subject;
    TypePtr a = d->premises[0]->type;
    TypePtr u = unfold(a);
    if (u->kind != TKind::Mix)
      throw std::runtime_error("choice subject is not typed by a mixed choice");
    const std::vector<MixBranch>& bs = p->mix_branches;
    std::vector<ChoiceGroup> groups = reorder_choice(bs);
    Name y = rename_name(p->n1);

    auto cont = [&](size_t idx) {
      const DerivPtr& bd = d->premises[1 + idx];
      const DerivPtr& cd = bd->premises[bd->rule == "T-Out" ? 1 : 0];
      return enc(cd, path + "/m" + std::to_string(idx));
    };
    auto wrap_id = [](TermPtr q) { return q; };

    bool proc_lin = p->qual == Qual::Lin;
    bool type_un = u->qual == Qual::Un;

    if (proc_lin && !type_un) {
      if (u->view == View::Internal) {
        prov.cases.push_back({path, "lin-int"});
        std::vector<TermPtr> options;
        for (const ChoiceGroup& g : groups) {
          if (!g.sends.empty()) {
            std::vector<TermPtr> inner;
            for (size_t j : g.sends)
              inner.push_back(
                  Term::cmv_out(y, rename_value(bs[j].value), cont(j)));
            options.push_back(
                Term::cmv_sel(y, g.label + "$snd", nd(inner, false)));
          }
          if (!g.recvs.empty()) {
            std::vector<TermPtr> inner;
            for (size_t k : g.recvs)
              inner.push_back(Term::cmv_in(Qual::Lin, y,
                                           rename_name(bs[k].var), cont(k)));
            options.push_back(
                Term::cmv_sel(y, g.label + "$rcv", nd(inner, false)));
          }
        }
        return nd(options, true);
      }
      prov.cases.push_back({path, "lin-ext"});
      return Term::cmv_branch(y, ext_arms(y, groups, bs, cont, wrap_id));
    }

    TypePtr payload = mix_payload_type(u);
    std::string ptext = print_type(payload);

    if (proc_lin) {
      if (u->view == View::Internal) {
        prov.cases.push_back({path, "lin-on-un-int"});
        return nd(int_options(y, ptext, groups, bs, cont, wrap_id), true);
      }
      prov.cases.push_back({path, "lin-on-un-ext"});
      Name c = draw("c");
      return Term::cmv_in(Qual::Lin, y, c,
                          Term::cmv_branch(c, ext_arms(c, groups, bs, cont, wrap_id)));
    }

    // unrestricted choices re-arm themselves through a unit token loop
    Name uu = draw("u");
    Name vv = draw("v");
    auto token = [uu] { return Term::cmv_out(uu, Value::unit(), Term::inact()); };
    auto wrap_tok = [&](TermPtr q) { return Term::par({token(), std::move(q)}); };
    TermPtr body;
    if (u->view == View::Internal) {
      prov.cases.push_back({path, "un-int"});
      body = nd(int_options(y, ptext, groups, bs, cont, wrap_tok), true);
    } else {
      prov.cases.push_back({path, "un-ext"});
      Name c = draw("c");
      body = Term::cmv_in(Qual::Lin, y, c,
                          Term::cmv_branch(c, ext_arms(c, groups, bs, cont, wrap_tok)));
    }
    TermPtr loop = Term::cmv_in(Qual::Un, vv, Name{"_"}, body);
    TypePtr utype = TypeNode::rec(
        Name{"t"}, TypeNode::com(Qual::Un, Pol::Send, TypeNode::unit(),
                                 TypeNode::var(Name{"t"})));
    return Term::res_sess(uu, vv, Term::par({token(), loop}), print_type(utype));
  }

  // option list for the internal cases that transmit a fresh session: each
  // option is (vcd)( y!c . d <+ label . ndChoice{ ... } )
  template <typename Cont, typename Wrap>
  std::vector<TermPtr> int_options(const Name& y, const std::string& ptext,
                                   const std::vector<ChoiceGroup>& groups,
                                   const std::vector<MixBranch>& bs, Cont cont,
                                   Wrap wrap) {
    std::vector<TermPtr> options;
    for (const ChoiceGroup& g : groups) {
      if (!g.sends.empty()) {
        Name c = draw("c");
        Name dd = draw("d");
        std::vector<TermPtr> inner;
        for (size_t j : g.sends)
          inner.push_back(
              Term::cmv_out(dd, rename_value(bs[j].value), wrap(cont(j))));
        TermPtr sel = Term::cmv_sel(dd, g.label + "$snd", nd(inner, false));
        options.push_back(Term::res_sess(
            c, dd, Term::cmv_out(y, Value::of(c), sel), ptext));
      }
      if (!g.recvs.empty()) {
        Name c = draw("c");
        Name dd = draw("d");
        std::vector<TermPtr> inner;
        for (size_t k : g.recvs)
          inner.push_back(Term::cmv_in(Qual::Lin, dd, rename_name(bs[k].var),
                                       wrap(cont(k))));
        TermPtr sel = Term::cmv_sel(dd, g.label + "$rcv", nd(inner, false));
        options.push_back(Term::res_sess(
            c, dd, Term::cmv_out(y, Value::of(c), sel), ptext));
      }
    }
    return options;
  }

  // arm list for the external cases: the branching endpoint both receives
  // the partner's sends (mangled "$snd") and serves its receives ("$rcv")
  template <typename Cont, typename Wrap>
  std::vector<CmvArm> ext_arms(const Name& subj,
                               const std::vector<ChoiceGroup>& groups,
                               const std::vector<MixBranch>& bs, Cont cont,
                               Wrap wrap) {
    std::vector<CmvArm> arms;
    for (const ChoiceGroup& g : groups) {
      if (!g.sends.empty()) {
        std::vector<TermPtr> inner;
        for (size_t j : g.sends)
          inner.push_back(
              Term::cmv_out(subj, rename_value(bs[j].value), wrap(cont(j))));
        arms.push_back(CmvArm{g.label + "$rcv", nd(inner, false)});
      }
      if (!g.recvs.empty()) {
        std::vector<TermPtr> inner;
        for (size_t k : g.recvs)
          inner.push_back(Term::cmv_in(Qual::Lin, subj, rename_name(bs[k].var),
                                       wrap(cont(k))));
        arms.push_back(CmvArm{g.label + "$snd", nd(inner, false)});
      }
    }
    return arms;
  }
};

}  // namespace

EncodeResult encode(const DerivPtr& d) {
  if (!d) throw std::runtime_error("encode: empty derivation");
  Encoder e;
  for (const char* r : {"c", "d", "u", "v", "s", "t"}) e.gen.reserve(Name{r});
  EncodeResult out;
  out.term = e.enc(d, "");
  out.prov = std::move(e.prov);
  return out;
}

std::string prov_json(const EncodeProv& p) {
  std::string out = "{\"cases\":[";
  bool first = true;
  for (const auto& [path, tag] : p.cases) {
    if (!first) out += ",";
    first = false;
    out += "{\"path\":" + quote_json(path) + ",\"case\":" + quote_json(tag) + "}";
  }
  out += "],\"start_sessions\":[";
  first = true;
  for (const auto& [s, t] : p.start_sessions) {
    if (!first) out += ",";
    first = false;
    out += "[" + quote_json(s.text) + "," + quote_json(t.text) + "]";
  }
  out += "],\"fresh\":[";
  first = true;
  for (const Name& n : p.fresh) {
    if (!first) out += ",";
    first = false;
    out += quote_json(n.text);
  }
  out += "]}";
  return out;
}

// ---------------------------------------------------------------------------
// junk collection
// ---------------------------------------------------------------------------

namespace {

struct GcBinder {
  bool sess = false;
  Name a, b;
  std::optional<std::string> annot;
  bool removed = false;
};

TermPtr gc_walk(const TermPtr& t, bool* changed);

bool is_junk_sel(const TermPtr& c, const Name& e) {
  return c->op == Op::CmvSel && c->n1 == e && c->body->op == Op::Inact;
}

// One restriction-chain region: apply the collection rule to every session
// binder whose endpoints are only used by dead selections on one side.
TermPtr gc_region(const TermPtr& root, bool* changed) {
  std::vector<GcBinder> binders;
  TermPtr cur = root;
  while (cur->op == Op::ResPi || cur->op == Op::ResSess) {
    if (cur->op == Op::ResPi)
      binders.push_back({false, cur->n1, {}, cur->res_annot});
    else
      binders.push_back({true, cur->n1, cur->n2, cur->res_annot});
    cur = cur->body;
  }
  std::vector<TermPtr> comps;
  if (cur->op == Op::Par)
    comps = cur->children;
  else
    comps = {cur};
  for (TermPtr& c : comps) c = gc_walk(c, changed);

  // shadowed binder names make the flat view unsound; leave those alone
  NameSet bound;
  bool shadowed = false;
  for (const GcBinder& b : binders) {
    if (!bound.insert(b.a).second) shadowed = true;
    if (b.sess && !bound.insert(b.b).second) shadowed = true;
  }

  if (!shadowed) {
    for (GcBinder& b : binders) {
      if (!b.sess) continue;
      for (const Name& e : {b.a, b.b}) {
        Name other = (e == b.a) ? b.b : b.a;
        bool all_junk = true, any = false, other_used = false;
        for (const TermPtr& c : comps) {
          NameSet fn = free_names(c);
          if (fn.count(other)) other_used = true;
          if (!fn.count(e)) continue;
          any = true;
          if (!is_junk_sel(c, e)) all_junk = false;
        }
        if (any && all_junk && !other_used) {
          std::vector<TermPtr> keep;
          for (const TermPtr& c : comps)
            if (!free_names(c).count(e)) keep.push_back(c);
          comps = std::move(keep);
          b.removed = true;
          *changed = true;
          break;
        }
      }
    }
  }

  TermPtr body = Term::par(comps);
  for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
    if (it->removed) continue;
    body = it->sess ? Term::res_sess(it->a, it->b, body, it->annot)
                    : Term::res_pi(it->a, body);
  }
  return body;
}

TermPtr gc_walk(const TermPtr& t, bool* changed) {
  switch (t->op) {
    case Op::Inact:
      return t;
    case Op::ResPi:
    case Op::ResSess:
      return gc_region(t, changed);
    case Op::Par: {
      std::vector<TermPtr> cs;
      for (const TermPtr& c : t->children) cs.push_back(gc_walk(c, changed));
      return Term::par(std::move(cs));
    }
    case Op::Bang:
      return Term::bang(gc_walk(t->body, changed));
    case Op::If:
      return Term::cond_if(t->cond, gc_walk(t->children[0], changed),
                           gc_walk(t->children[1], changed));
    case Op::PiSum: {
      std::vector<PiBranch> bs;
      for (const PiBranch& b : t->pi_branches)
        bs.push_back(PiBranch{b.prefix, gc_walk(b.cont, changed)});
      return Term::pi_sum(std::move(bs));
    }
    case Op::MixChoice: {
      std::vector<MixBranch> bs;
      for (const MixBranch& b : t->mix_branches) {
        MixBranch nb = b;
        nb.cont = gc_walk(b.cont, changed);
        bs.push_back(nb);
      }
      return Term::mix_choice(t->qual, t->n1, std::move(bs));
    }
    case Op::CmvOut:
      return Term::cmv_out(t->n1, t->value, gc_walk(t->body, changed));
    case Op::CmvIn:
      return Term::cmv_in(t->qual, t->n1, t->n2, gc_walk(t->body, changed));
    case Op::CmvSel:
      return Term::cmv_sel(t->n1, t->label, gc_walk(t->body, changed));
    case Op::CmvBranch: {
      std::vector<CmvArm> arms;
      for (const CmvArm& a : t->cmv_arms)
        arms.push_back(CmvArm{a.label, gc_walk(a.cont, changed)});
      return Term::cmv_branch(t->n1, std::move(arms));
    }
  }
  return t;
}

}  // namespace

TermPtr gc_junk(const TermPtr& t) {
  TermPtr cur = t;
  for (int i = 0; i < 64; ++i) {
    bool changed = false;
    cur = gc_walk(cur, &changed);
    if (!changed) break;
  }
  return struct_norm(cur);
}

// ---------------------------------------------------------------------------
// starting steps
// ---------------------------------------------------------------------------

static bool name_matches(const Name& recorded, const Name& got) {
  if (recorded == got) return true;
  // hoisting may freshen a duplicated gadget binder by a digit suffix
  if (got.text.size() <= recorded.text.size()) return false;
  if (got.text.compare(0, recorded.text.size(), recorded.text) != 0) return false;
  for (size_t i = recorded.text.size(); i < got.text.size(); ++i)
    if (!isdigit(static_cast<unsigned char>(got.text[i]))) return false;
  return true;
}

bool is_starting_step(const StepLabel& edge, const EncodeProv& prov) {
  if (edge.kind == StepKind::IfTrue || edge.kind == StepKind::IfFalse) return true;
  if (edge.kind != StepKind::Case) return false;
  for (const auto& [s, t] : prov.start_sessions) {
    if (name_matches(s, edge.ch_a) && name_matches(t, edge.ch_b)) return true;
    if (name_matches(s, edge.ch_b) && name_matches(t, edge.ch_a)) return true;
  }
  return false;
}

}  // namespace wb
