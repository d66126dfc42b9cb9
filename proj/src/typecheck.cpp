#include "wb/typecheck.hpp"

#include <set>
#include <stdexcept>

#include "wb/parser.hpp"
#include "wb/printer.hpp"
#include "wb/syntax.hpp"

namespace wb {

namespace {

struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string ctx_key(const TypeCtx& g) { return print_ctx(g); }

struct Checker {
  Calculus calc;
  TypeCtx ctx;

  TypeCtx un_part() const {
    TypeCtx g;
    for (const auto& [n, t] : ctx)
      if (un_type(t)) g[n] = t;
    return g;
  }

  // The declarative context of a judgment: every unrestricted entry in scope
  // plus the linear entries the subtree consumed.
  static TypeCtx judgment_ctx(const TypeCtx& before, const TypeCtx& after) {
    TypeCtx g;
    for (const auto& [n, t] : before) {
      auto it = after.find(n);
      bool consumed = it == after.end() ||
                      print_type(it->second) != print_type(t);
      if (un_type(t) || consumed) g[n] = t;
    }
    return g;
  }

  TypePtr lookup(const Name& x) const {
    auto it = ctx.find(x);
    if (it == ctx.end()) throw TypeError("name '" + x.text + "' is not in scope");
    return it->second;
  }

  DerivPtr check_value(const Value& v, const TypePtr& expected) {
    TypeCtx before = ctx;
    auto d = std::make_shared<Deriv>();
    d->value = v;
    TypePtr want = unfold(expected);
    switch (v.kind) {
      case Value::Kind::True:
      case Value::Kind::False:
        if (want->kind != TKind::BoolT)
          throw TypeError("boolean constant where " + print_type(expected) +
                          " is expected");
        d->rule = v.kind == Value::Kind::True ? "T-True" : "T-False";
        d->type = TypeNode::boolean();
        break;
      case Value::Kind::Unit:
        if (want->kind != TKind::UnitT)
          throw TypeError("unit constant where " + print_type(expected) +
                          " is expected");
        d->rule = "T-Unit";
        d->type = TypeNode::unit();
        break;
      case Value::Kind::NameRef: {
        TypePtr a = lookup(v.name);
        if (!subtype(a, expected))
          throw TypeError("'" + v.name.text + "' has type " + print_type(a) +
                          ", not a subtype of " + print_type(expected));
        if (!un_type(a)) ctx.erase(v.name);
        d->rule = "T-Var";
        d->type = a;
        if (!type_equiv(a, expected))
          d->note = "subsumed to " + print_type(expected);
        break;
      }
    }
    d->ctx = judgment_ctx(before, ctx);
    return d;
  }

  void check_cond(const ExprPtr& e) {
    switch (e->kind) {
      case Expr::Kind::Val:
        if (e->value.kind == Value::Kind::Unit)
          throw TypeError("unit value in a boolean condition");
        if (e->value.kind == Value::Kind::NameRef) {
          TypePtr a = lookup(e->value.name);
          if (!subtype(a, TypeNode::boolean()))
            throw TypeError("condition variable '" + e->value.name.text +
                            "' has type " + print_type(a) + ", not bool");
        }
        return;
      case Expr::Kind::Not:
        check_cond(e->lhs);
        return;
      case Expr::Kind::And:
      case Expr::Kind::Or:
        check_cond(e->lhs);
        check_cond(e->rhs);
        return;
    }
  }

  // Subject value judgment for a prefix/choice on x, consuming lin entries.
  DerivPtr use_subject(const Name& x, const TypePtr& a) {
    TypeCtx before = ctx;
    if (!un_type(a)) ctx.erase(x);
    auto d = std::make_shared<Deriv>();
    d->rule = "T-Var";
    d->value = Value::of(x);
    d->type = a;
    d->ctx = judgment_ctx(before, ctx);
    return d;
  }

  // After the continuation of a prefix/branch on x: the leftover local entry
  // must be unrestricted, and an unrestricted original is restored for
  // sibling components.
  void finish_endpoint(const Name& x, bool orig_un, const TypePtr& orig) {
    auto it = ctx.find(x);
    if (it != ctx.end()) {
      if (!un_type(it->second))
        throw TypeError("protocol on '" + x.text + "' left unfinished at type " +
                        print_type(it->second));
      ctx.erase(it);
    }
    if (orig_un) ctx[x] = orig;
  }

  void drop_binder(const Name& y) {
    auto it = ctx.find(y);
    if (it != ctx.end()) {
      if (!un_type(it->second))
        throw TypeError("bound name '" + y.text + "' not fully used, type " +
                        print_type(it->second));
      ctx.erase(it);
    }
  }

  void require_no_lin_consumed(const TypeCtx& before, const char* what) {
    TypeCtx j = judgment_ctx(before, ctx);
    for (const auto& [n, t] : j)
      if (!un_type(t))
        throw TypeError(std::string(what) + " may not consume the linear name '" +
                        n.text + "'");
  }

  DerivPtr check(const TermPtr& p) {
    TypeCtx before = ctx;
    auto d = std::make_shared<Deriv>();
    d->subject = p;
    switch (p->op) {
      case Op::Inact:
        d->rule = "T-Inact";
        break;
      case Op::Par: {
        d->rule = "T-Par";
        for (const TermPtr& c : p->children) d->premises.push_back(check(c));
        break;
      }
      case Op::If: {
        d->rule = "T-If";
        check_cond(p->cond);
        d->note = "cond " + print_expr(p->cond);
        TypeCtx snap = ctx;
        d->premises.push_back(check(p->children[0]));
        TypeCtx after_then = ctx;
        ctx = snap;
        d->premises.push_back(check(p->children[1]));
        if (ctx_key(ctx) != ctx_key(after_then))
          throw TypeError("the two branches of a conditional use different resources");
        break;
      }
      case Op::ResSess: {
        d->rule = "T-Res";
        TypePtr t;
        if (p->res_annot) {
          t = parse_type(*p->res_annot);
        } else {
          t = infer_endpoint(p->n1, p->n2, p->body);
        }
        if (!contractive(t))
          throw TypeError("non-contractive type for '" + p->n1.text + "'");
        TypePtr td = dualize(t);
        d->type = t;
        ctx[p->n1] = t;
        ctx[p->n2] = td;
        d->premises.push_back(check(p->body));
        drop_binder(p->n1);
        drop_binder(p->n2);
        break;
      }
      case Op::MixChoice:
        check_choice(p, d);
        break;
      case Op::CmvOut:
        check_cmv_out(p, d);
        break;
      case Op::CmvIn:
        check_cmv_in(p, d);
        break;
      case Op::CmvSel:
        check_cmv_sel(p, d);
        break;
      case Op::CmvBranch:
        check_cmv_branch(p, d);
        break;
      default:
        throw TypeError("process form outside the session fragment");
    }
    d->ctx = judgment_ctx(before, ctx);
    return d;
  }

  void check_choice(const TermPtr& p, const std::shared_ptr<Deriv>& d) {
    if (calc != Calculus::CmvPlus)
      throw TypeError("mixed choice outside cmv+");
    d->rule = "T-Choice";
    TypeCtx node_before = ctx;
    const Name& x = p->n1;
    TypePtr a = lookup(x);
    TypePtr u = unfold(a);
    if (u->kind != TKind::Mix)
      throw TypeError("subject '" + x.text + "' has type " + print_type(a) +
                      ", not a choice type");
    bool orig_un = un_type(a);
    d->premises.push_back(use_subject(x, a));

    std::set<std::pair<Label, Pol>> tset, pset;
    for (const MixTBranch& b : u->mix) tset.insert({b.label, b.pol});
    for (const MixBranch& b : p->mix_branches) pset.insert({b.label, b.pol});
    if (tset != pset)
      throw TypeError("branches of the choice on '" + x.text +
                      "' do not match its type " + print_type(a));

    TypeCtx entry = ctx;
    bool first = true;
    TypeCtx residual;
    for (const MixBranch& b : p->mix_branches) {
      const MixTBranch* tb = nullptr;
      for (const MixTBranch& cand : u->mix)
        if (cand.label == b.label && cand.pol == b.pol) tb = &cand;
      ctx = entry;
      ctx[x] = tb->cont;
      auto db = std::make_shared<Deriv>();
      db->rule = b.pol == Pol::Send ? "T-Out" : "T-In";
      db->label = b.label;
      db->pol = b.pol;
      db->type = tb->payload;
      db->type2 = tb->cont;
      TypeCtx branch_before = ctx;
      if (b.pol == Pol::Send) {
        db->premises.push_back(check_value(b.value, tb->payload));
        db->premises.push_back(check(b.cont));
      } else {
        ctx[b.var] = tb->payload;
        db->note = "binds " + b.var.text;
        db->premises.push_back(check(b.cont));
        drop_binder(b.var);
      }
      finish_endpoint(x, orig_un, a);
      db->ctx = judgment_ctx(branch_before, ctx);
      d->premises.push_back(db);
      if (first) {
        residual = ctx;
        first = false;
      } else if (ctx_key(ctx) != ctx_key(residual)) {
        throw TypeError("branches of the choice on '" + x.text +
                        "' use different resources");
      }
    }
    ctx = residual;
    if (p->qual == Qual::Un)
      require_no_lin_consumed(node_before, "an unrestricted choice");
  }

  void expect_cmv() const {
    if (calc != Calculus::Cmv)
      throw TypeError("separate-choice syntax outside cmv");
  }

  void check_cmv_out(const TermPtr& p, const std::shared_ptr<Deriv>& d) {
    expect_cmv();
    d->rule = "T-Out";
    const Name& x = p->n1;
    TypePtr a = lookup(x);
    TypePtr u = unfold(a);
    if (u->kind != TKind::Com || u->pol != Pol::Send)
      throw TypeError("'" + x.text + "' has type " + print_type(a) +
                      ", not an output type");
    bool orig_un = un_type(a);
    d->premises.push_back(use_subject(x, a));
    ctx[x] = u->cont;
    d->premises.push_back(check_value(p->value, u->payload));
    d->premises.push_back(check(p->body));
    finish_endpoint(x, orig_un, a);
  }

  void check_cmv_in(const TermPtr& p, const std::shared_ptr<Deriv>& d) {
    expect_cmv();
    d->rule = "T-In";
    TypeCtx node_before = ctx;
    const Name& x = p->n1;
    TypePtr a = lookup(x);
    TypePtr u = unfold(a);
    if (u->kind != TKind::Com || u->pol != Pol::Recv)
      throw TypeError("'" + x.text + "' has type " + print_type(a) +
                      ", not an input type");
    bool orig_un = un_type(a);
    d->premises.push_back(use_subject(x, a));
    ctx[x] = u->cont;
    ctx[p->n2] = u->payload;
    d->note = "binds " + p->n2.text;
    d->premises.push_back(check(p->body));
    drop_binder(p->n2);
    finish_endpoint(x, orig_un, a);
    if (p->qual == Qual::Un)
      require_no_lin_consumed(node_before, "an unrestricted input");
  }

  void check_cmv_sel(const TermPtr& p, const std::shared_ptr<Deriv>& d) {
    expect_cmv();
    d->rule = "T-Sel";
    const Name& x = p->n1;
    TypePtr a = lookup(x);
    TypePtr u = unfold(a);
    if (u->kind != TKind::Plain || u->view != View::Internal)
      throw TypeError("'" + x.text + "' has type " + print_type(a) +
                      ", not a selection type");
    const TypePtr* cont_t = nullptr;
    for (const auto& [l, t] : u->plain)
      if (l == p->label) cont_t = &t;
    if (!cont_t)
      throw TypeError("label '" + p->label + "' is not offered by " + print_type(a));
    bool orig_un = un_type(a);
    d->premises.push_back(use_subject(x, a));
    d->label = p->label;
    d->type = *cont_t;
    ctx[x] = *cont_t;
    d->premises.push_back(check(p->body));
    finish_endpoint(x, orig_un, a);
  }

  void check_cmv_branch(const TermPtr& p, const std::shared_ptr<Deriv>& d) {
    expect_cmv();
    d->rule = "T-Branch";
    const Name& x = p->n1;
    TypePtr a = lookup(x);
    TypePtr u = unfold(a);
    if (u->kind != TKind::Plain || u->view != View::External)
      throw TypeError("'" + x.text + "' has type " + print_type(a) +
                      ", not a branching type");
    std::set<Label> tset, pset;
    for (const auto& [l, t] : u->plain) tset.insert(l);
    for (const CmvArm& arm : p->cmv_arms) pset.insert(arm.label);
    if (tset != pset)
      throw TypeError("arms of the branching on '" + x.text +
                      "' do not match its type " + print_type(a));
    bool orig_un = un_type(a);
    d->premises.push_back(use_subject(x, a));
    TypeCtx entry = ctx;
    bool first = true;
    TypeCtx residual;
    for (const CmvArm& arm : p->cmv_arms) {
      const TypePtr* cont_t = nullptr;
      for (const auto& [l, t] : u->plain)
        if (l == arm.label) cont_t = &t;
      ctx = entry;
      ctx[x] = *cont_t;
      auto db = std::make_shared<Deriv>();
      db->rule = "T-BranchArm";
      db->label = arm.label;
      db->type = *cont_t;
      TypeCtx branch_before = ctx;
      db->premises.push_back(check(arm.cont));
      finish_endpoint(x, orig_un, a);
      db->ctx = judgment_ctx(branch_before, ctx);
      d->premises.push_back(db);
      if (first) {
        residual = ctx;
        first = false;
      } else if (ctx_key(ctx) != ctx_key(residual)) {
        throw TypeError("arms of the branching on '" + x.text +
                        "' use different resources");
      }
    }
    ctx = residual;
  }

  // ---- annotation-free restriction: best-effort protocol reconstruction ---

  TypePtr value_type_of(const Value& v) {
    switch (v.kind) {
      case Value::Kind::True:
      case Value::Kind::False:
        return TypeNode::boolean();
      case Value::Kind::Unit:
        return TypeNode::unit();
      case Value::Kind::NameRef: {
        auto it = ctx.find(v.name);
        if (it != ctx.end()) return it->second;
        throw TypeError("cannot infer a payload type for '" + v.name.text +
                        "'; annotate the restriction");
      }
    }
    return TypeNode::unit();
  }

  const Term* first_usage(const Name& x, const TermPtr& t) {
    for (const Subterm& s : subterms(t)) {
      switch (s.term->op) {
        case Op::MixChoice:
        case Op::CmvOut:
        case Op::CmvIn:
        case Op::CmvSel:
        case Op::CmvBranch:
          if (s.term->n1 == x) return s.term.get();
          break;
        default:
          break;
      }
    }
    return nullptr;
  }

  TypePtr type_from_usage(const Name& x, const Term* use) {
    switch (use->op) {
      case Op::MixChoice: {
        if (use->qual == Qual::Un)
          throw TypeError("cannot infer an unrestricted choice type for '" +
                          x.text + "'; annotate the restriction");
        bool any_send = false;
        for (const MixBranch& b : use->mix_branches)
          if (b.pol == Pol::Send) any_send = true;
        std::vector<MixTBranch> bs;
        for (const MixBranch& b : use->mix_branches) {
          MixTBranch tb;
          tb.label = b.label;
          tb.pol = b.pol;
          if (b.pol == Pol::Send)
            tb.payload = value_type_of(b.value);
          else
            tb.payload = TypeNode::boolean();
          const Term* nested = first_usage(x, b.cont);
          tb.cont = nested ? type_from_usage(x, nested) : TypeNode::end();
          bs.push_back(std::move(tb));
        }
        return TypeNode::mix_choice(Qual::Lin,
                                    any_send ? View::Internal : View::External,
                                    std::move(bs));
      }
      case Op::CmvOut: {
        const Term* nested = first_usage(x, use->body);
        return TypeNode::com(Qual::Lin, Pol::Send, value_type_of(use->value),
                             nested ? type_from_usage(x, nested) : TypeNode::end());
      }
      case Op::CmvSel: {
        const Term* nested = first_usage(x, use->body);
        return TypeNode::plain_choice(
            Qual::Lin, View::Internal,
            {{use->label,
              nested ? type_from_usage(x, nested) : TypeNode::end()}});
      }
      default:
        throw TypeError("cannot infer a protocol for '" + x.text +
                        "'; annotate the restriction");
    }
  }

  TypePtr infer_endpoint(const Name& a, const Name& b, const TermPtr& body) {
    if (const Term* use = first_usage(a, body)) return type_from_usage(a, use);
    if (const Term* use = first_usage(b, body))
      return dualize(type_from_usage(b, use));
    return TypeNode::end();
  }
};

void json_of(const DerivPtr& d, Calculus c, std::string& out) {
  out += "{\"rule\":" + quote_json(d->rule);
  out += ",\"ctx\":" + quote_json(print_ctx(d->ctx));
  if (d->subject) out += ",\"term\":" + quote_json(print_term(d->subject, c));
  if (d->value) out += ",\"value\":" + quote_json(print_value(*d->value));
  if (d->type) out += ",\"type\":" + quote_json(print_type(d->type));
  if (d->type2) out += ",\"cont_type\":" + quote_json(print_type(d->type2));
  if (!d->label.empty())
    out += ",\"label\":" + quote_json(d->label + ((d->rule == "T-Out" || d->rule == "T-In") && !d->label.empty() ? to_string(d->pol) : ""));
  if (!d->note.empty()) out += ",\"note\":" + quote_json(d->note);
  if (!d->premises.empty()) {
    out += ",\"premises\":[";
    for (size_t i = 0; i < d->premises.size(); ++i) {
      if (i) out += ",";
      json_of(d->premises[i], c, out);
    }
    out += "]";
  }
  out += "}";
}

}  // namespace

std::string deriv_json(const DerivPtr& d, Calculus c) {
  std::string out;
  json_of(d, c, out);
  return out;
}

TypecheckResult typecheck(Calculus c, const TypeCtx& g, const TermPtr& p) {
  TypecheckResult res;
  if (c == Calculus::Pi) {
    res.error = "the pi fragment is untyped";
    return res;
  }
  NameSet avoid;
  for (const auto& [n, t] : g) avoid.insert(n);
  TermPtr subject = uniquify_binders(p, avoid);
  Checker ck;
  ck.calc = c;
  ck.ctx = g;
  try {
    DerivPtr d = ck.check(subject);
    for (const auto& [n, t] : ck.ctx)
      if (!un_type(t))
        throw TypeError("linear name '" + n.text + "' of type " + print_type(t) +
                        " is never used");
    res.ok = true;
    res.deriv = d;
    res.subject = subject;
  } catch (const TypeError& e) {
    res.error = e.what();
  } catch (const std::runtime_error& e) {
    res.error = e.what();
  }
  return res;
}

namespace {

bool check_node(const DerivPtr& d, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = d->rule + ": " + m;
    return false;
  };
  if (d->rule == "T-Inact" && !un_ctx(d->ctx))
    return fail("context is not unrestricted");
  if (d->rule == "T-Par") {
    // linear entries distribute over the components, unrestricted ones are shared
    std::set<std::string> seen;
    for (const DerivPtr& p : d->premises)
      for (const auto& [n, t] : p->ctx) {
        if (un_type(t)) continue;
        if (!seen.insert(n.text + ":" + print_type(t)).second)
          return fail("linear entry used by two components: " + n.text);
      }
  }
  if (d->rule == "T-Res") {
    if (d->premises.size() != 1) return fail("expects one premise");
    if (d->type) {
      TypePtr td = dualize(d->type);
      if (!dual(d->type, td)) return fail("endpoint types are not dual");
    }
  }
  if (d->rule == "T-Choice") {
    if (d->premises.empty()) return fail("missing subject premise");
    TypePtr a = d->premises[0]->type;
    if (!a) return fail("subject premise carries no type");
    TypePtr u = unfold(a);
    if (u->kind != TKind::Mix) return fail("subject type is not a choice type");
    std::set<std::pair<Label, Pol>> tset, pset;
    for (const MixTBranch& b : u->mix) tset.insert({b.label, b.pol});
    for (size_t i = 1; i < d->premises.size(); ++i)
      pset.insert({d->premises[i]->label, d->premises[i]->pol});
    if (tset != pset) return fail("branch set differs from the subject type");
  }
  if (d->rule == "T-Out" && !d->label.empty()) {
    if (d->premises.size() != 2) return fail("expects value and continuation");
    if (!d->premises[0]->type || !subtype(d->premises[0]->type, d->type))
      return fail("payload is not a subtype of the branch type");
  }
  if (d->rule == "T-In" && !d->label.empty() && d->premises.size() != 1)
    return fail("expects a continuation premise");
  for (const DerivPtr& p : d->premises)
    if (!check_node(p, why)) return false;
  return true;
}

}  // namespace

bool validate_deriv(const DerivPtr& d, std::string* why) {
  return check_node(d, why);
}

}  // namespace wb
