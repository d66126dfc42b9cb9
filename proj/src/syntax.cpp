#include "wb/syntax.hpp"

#include "wb/parser.hpp"
#include "wb/types.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace wb {

Subst name_subst(const std::map<Name, Name>& m) {
  Subst s;
  for (auto& [k, v] : m) s[k] = Value::of(v);
  return s;
}

// ---------------------------------------------------------------------------
// free names
// ---------------------------------------------------------------------------

NameSet free_names(const Value& v) {
  NameSet s;
  if (v.kind == Value::Kind::NameRef) s.insert(v.name);
  return s;
}

NameSet free_names(const ExprPtr& e) {
  NameSet s;
  if (!e) return s;
  switch (e->kind) {
    case Expr::Kind::Val: return free_names(e->value);
    case Expr::Kind::Not: return free_names(e->lhs);
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      s = free_names(e->lhs);
      auto r = free_names(e->rhs);
      s.insert(r.begin(), r.end());
      return s;
    }
  }
  return s;
}

static void fn(const TermPtr& t, NameSet& bound, NameSet& out) {
  auto add = [&](const Name& n) {
    if (!bound.count(n)) out.insert(n);
  };
  switch (t->op) {
    case Op::Inact: return;
    case Op::Par:
      for (auto& c : t->children) fn(c, bound, out);
      return;
    case Op::ResPi: {
      bool fresh = bound.insert(t->n1).second;
      fn(t->body, bound, out);
      if (fresh) bound.erase(t->n1);
      return;
    }
    case Op::ResSess: {
      bool f1 = bound.insert(t->n1).second;
      bool f2 = bound.insert(t->n2).second;
      fn(t->body, bound, out);
      if (f2) bound.erase(t->n2);
      if (f1) bound.erase(t->n1);
      return;
    }
    case Op::Bang: fn(t->body, bound, out); return;
    case Op::If: {
      for (auto& n : free_names(t->cond)) add(n);
      fn(t->children[0], bound, out);
      fn(t->children[1], bound, out);
      return;
    }
    case Op::PiSum:
      for (auto& b : t->pi_branches) {
        switch (b.prefix.kind) {
          case PiPrefix::Kind::Out:
            add(b.prefix.channel);
            add(b.prefix.arg);
            fn(b.cont, bound, out);
            break;
          case PiPrefix::Kind::In: {
            add(b.prefix.channel);
            bool f = bound.insert(b.prefix.arg).second;
            fn(b.cont, bound, out);
            if (f) bound.erase(b.prefix.arg);
            break;
          }
          case PiPrefix::Kind::Tau: fn(b.cont, bound, out); break;
        }
      }
      return;
    case Op::MixChoice:
      add(t->n1);
      for (auto& b : t->mix_branches) {
        if (b.pol == Pol::Send) {
          for (auto& n : free_names(b.value)) add(n);
          fn(b.cont, bound, out);
        } else {
          bool f = bound.insert(b.var).second;
          fn(b.cont, bound, out);
          if (f) bound.erase(b.var);
        }
      }
      return;
    case Op::CmvOut:
      add(t->n1);
      for (auto& n : free_names(t->value)) add(n);
      fn(t->body, bound, out);
      return;
    case Op::CmvIn: {
      add(t->n1);
      bool f = bound.insert(t->n2).second;
      fn(t->body, bound, out);
      if (f) bound.erase(t->n2);
      return;
    }
    case Op::CmvSel:
      add(t->n1);
      fn(t->body, bound, out);
      return;
    case Op::CmvBranch:
      add(t->n1);
      for (auto& a : t->cmv_arms) fn(a.cont, bound, out);
      return;
  }
}

NameSet free_names(const TermPtr& t) {
  NameSet bound, out;
  fn(t, bound, out);
  return out;
}

// ---------------------------------------------------------------------------
// substitution
// ---------------------------------------------------------------------------

Value apply_subst(const Value& v, const Subst& sigma) {
  if (v.kind == Value::Kind::NameRef) {
    auto it = sigma.find(v.name);
    if (it != sigma.end()) return it->second;
  }
  return v;
}

ExprPtr apply_subst(const ExprPtr& e, const Subst& sigma) {
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::Val: return Expr::val(apply_subst(e->value, sigma));
    case Expr::Kind::Not: return Expr::mk_not(apply_subst(e->lhs, sigma));
    case Expr::Kind::And:
      return Expr::mk_and(apply_subst(e->lhs, sigma), apply_subst(e->rhs, sigma));
    case Expr::Kind::Or:
      return Expr::mk_or(apply_subst(e->lhs, sigma), apply_subst(e->rhs, sigma));
  }
  return e;
}

static Name subst_name(const Name& n, const Subst& sigma) {
  auto it = sigma.find(n);
  if (it == sigma.end()) return n;
  if (it->second.kind != Value::Kind::NameRef)
    throw std::logic_error("substitution puts a non-name value in a name position");
  return it->second.name;
}

// Prepares the substitution for descending under binders `vars`, renaming
// binders that would capture names from the image of sigma.  Returns the
// effective substitution; `vars` is updated in place with renamed binders.
static Subst under_binders(std::vector<Name*> vars, const Subst& sigma,
                           const TermPtr& body) {
  Subst eff;
  NameSet bfree = free_names(body);
  NameSet imgs;
  for (auto& [k, v] : sigma) {
    bool shadowed = false;
    for (auto* b : vars)
      if (*b == k) shadowed = true;
    if (shadowed || !bfree.count(k)) continue;
    eff[k] = v;
    auto ns = free_names(v);
    imgs.insert(ns.begin(), ns.end());
  }
  NameGen gen(bfree);
  gen.reserve(imgs);
  for (auto& [k, v] : eff) gen.reserve(k);
  for (auto* b : vars) {
    if (imgs.count(*b)) {
      Name nb = gen.fresh(b->text + "_");
      eff[*b] = Value::of(nb);
      *b = nb;
    }
  }
  return eff;
}

TermPtr apply_subst(const TermPtr& t, const Subst& sigma) {
  if (sigma.empty()) return t;
  switch (t->op) {
    case Op::Inact: return t;
    case Op::Par: {
      std::vector<TermPtr> cs;
      for (auto& c : t->children) cs.push_back(apply_subst(c, sigma));
      return Term::par(std::move(cs));
    }
    case Op::ResPi: {
      Name x = t->n1;
      Subst eff = under_binders({&x}, sigma, t->body);
      return Term::res_pi(x, apply_subst(t->body, eff));
    }
    case Op::ResSess: {
      Name y = t->n1, z = t->n2;
      Subst eff = under_binders({&y, &z}, sigma, t->body);
      return Term::res_sess(y, z, apply_subst(t->body, eff), t->res_annot);
    }
    case Op::Bang: return Term::bang(apply_subst(t->body, sigma));
    case Op::If:
      return Term::cond_if(apply_subst(t->cond, sigma),
                           apply_subst(t->children[0], sigma),
                           apply_subst(t->children[1], sigma));
    case Op::PiSum: {
      std::vector<PiBranch> bs;
      for (auto& b : t->pi_branches) {
        PiBranch nb = b;
        switch (b.prefix.kind) {
          case PiPrefix::Kind::Out:
            nb.prefix.channel = subst_name(b.prefix.channel, sigma);
            nb.prefix.arg = subst_name(b.prefix.arg, sigma);
            nb.cont = apply_subst(b.cont, sigma);
            break;
          case PiPrefix::Kind::In: {
            nb.prefix.channel = subst_name(b.prefix.channel, sigma);
            Name v = b.prefix.arg;
            Subst eff = under_binders({&v}, sigma, b.cont);
            nb.prefix.arg = v;
            nb.cont = apply_subst(b.cont, eff);
            break;
          }
          case PiPrefix::Kind::Tau: nb.cont = apply_subst(b.cont, sigma); break;
        }
        bs.push_back(std::move(nb));
      }
      return Term::pi_sum(std::move(bs));
    }
    case Op::MixChoice: {
      std::vector<MixBranch> bs;
      for (auto& b : t->mix_branches) {
        MixBranch nb = b;
        if (b.pol == Pol::Send) {
          nb.value = apply_subst(b.value, sigma);
          nb.cont = apply_subst(b.cont, sigma);
        } else {
          Name v = b.var;
          Subst eff = under_binders({&v}, sigma, b.cont);
          nb.var = v;
          nb.cont = apply_subst(b.cont, eff);
        }
        bs.push_back(std::move(nb));
      }
      return Term::mix_choice(t->qual, subst_name(t->n1, sigma), std::move(bs));
    }
    case Op::CmvOut:
      return Term::cmv_out(subst_name(t->n1, sigma), apply_subst(t->value, sigma),
                           apply_subst(t->body, sigma));
    case Op::CmvIn: {
      Name v = t->n2;
      Subst eff = under_binders({&v}, sigma, t->body);
      return Term::cmv_in(t->qual, subst_name(t->n1, sigma), v,
                          apply_subst(t->body, eff));
    }
    case Op::CmvSel:
      return Term::cmv_sel(subst_name(t->n1, sigma), t->label,
                           apply_subst(t->body, sigma));
    case Op::CmvBranch: {
      std::vector<CmvArm> as;
      for (auto& a : t->cmv_arms) as.push_back({a.label, apply_subst(a.cont, sigma)});
      return Term::cmv_branch(subst_name(t->n1, sigma), std::move(as));
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {

// Environment for serialization: overrides the spelling of selected names.
struct SerEnv {
  const std::map<Name, std::string>* mask = nullptr;  // external overrides
  std::map<Name, std::string> bound;                  // binder tokens
  int depth = 0;
  bool nameless = false;

  std::string tok(const Name& n) const {
    auto b = bound.find(n);
    if (b != bound.end()) return b->second;
    if (mask) {
      auto m = mask->find(n);
      if (m != mask->end()) return m->second;
    }
    return n.text;
  }
};

struct Shadow {
  SerEnv& e;
  Name n;
  bool had = false;
  std::string old;
  Shadow(SerEnv& env, const Name& name) : e(env), n(name) {
    auto it = e.bound.find(n);
    if (it != e.bound.end()) {
      had = true;
      old = it->second;
    }
    if (e.nameless) {
      e.bound[n] = "%" + std::to_string(e.depth++);
    } else {
      e.bound.erase(n);
    }
  }
  ~Shadow() {
    if (e.nameless) e.depth--;
    if (had)
      e.bound[n] = old;
    else
      e.bound.erase(n);
  }
};

void ser_expr(const ExprPtr& e, SerEnv& env, std::string& o) {
  switch (e->kind) {
    case Expr::Kind::Val:
      if (e->value.kind == Value::Kind::NameRef)
        o += env.tok(e->value.name);
      else if (e->value.kind == Value::Kind::True)
        o += "true";
      else if (e->value.kind == Value::Kind::False)
        o += "false";
      else
        o += "unit";
      return;
    case Expr::Kind::Not:
      o += "not(";
      ser_expr(e->lhs, env, o);
      o += ")";
      return;
    case Expr::Kind::And:
    case Expr::Kind::Or:
      o += e->kind == Expr::Kind::And ? "and(" : "or(";
      ser_expr(e->lhs, env, o);
      o += ",";
      ser_expr(e->rhs, env, o);
      o += ")";
      return;
  }
}

void ser_value(const Value& v, SerEnv& env, std::string& o) {
  switch (v.kind) {
    case Value::Kind::NameRef: o += env.tok(v.name); return;
    case Value::Kind::True: o += "true"; return;
    case Value::Kind::False: o += "false"; return;
    case Value::Kind::Unit: o += "unit"; return;
  }
}

void ser(const TermPtr& t, SerEnv& env, std::string& o) {
  switch (t->op) {
    case Op::Inact: o += "0"; return;
    case Op::Par: {
      o += "par(";
      bool first = true;
      for (auto& c : t->children) {
        if (!first) o += ",";
        first = false;
        ser(c, env, o);
      }
      o += ")";
      return;
    }
    case Op::ResPi: {
      o += "nu(";
      Shadow s(env, t->n1);
      o += env.tok(t->n1);
      o += ",";
      ser(t->body, env, o);
      o += ")";
      return;
    }
    case Op::ResSess: {
      o += "new(";
      Shadow s1(env, t->n1);
      Shadow s2(env, t->n2);
      o += env.tok(t->n1);
      o += ",";
      o += env.tok(t->n2);
      o += ",";
      ser(t->body, env, o);
      o += ")";
      return;
    }
    case Op::Bang:
      o += "bang(";
      ser(t->body, env, o);
      o += ")";
      return;
    case Op::If:
      o += "if(";
      ser_expr(t->cond, env, o);
      o += ",";
      ser(t->children[0], env, o);
      o += ",";
      ser(t->children[1], env, o);
      o += ")";
      return;
    case Op::PiSum: {
      o += "sum(";
      bool first = true;
      for (auto& b : t->pi_branches) {
        if (!first) o += ",";
        first = false;
        switch (b.prefix.kind) {
          case PiPrefix::Kind::Out:
            o += "out(" + env.tok(b.prefix.channel) + "," + env.tok(b.prefix.arg) + ",";
            ser(b.cont, env, o);
            o += ")";
            break;
          case PiPrefix::Kind::In: {
            o += "in(" + env.tok(b.prefix.channel) + ",";
            Shadow s(env, b.prefix.arg);
            o += env.tok(b.prefix.arg);
            o += ",";
            ser(b.cont, env, o);
            o += ")";
            break;
          }
          case PiPrefix::Kind::Tau:
            o += "tau(";
            ser(b.cont, env, o);
            o += ")";
            break;
        }
      }
      o += ")";
      return;
    }
    case Op::MixChoice: {
      o += "choice(";
      o += to_string(t->qual);
      o += ",";
      o += env.tok(t->n1);
      for (auto& b : t->mix_branches) {
        o += ",";
        if (b.pol == Pol::Send) {
          o += b.label + "!(";
          ser_value(b.value, env, o);
          o += ",";
          ser(b.cont, env, o);
          o += ")";
        } else {
          o += b.label + "?(";
          Shadow s(env, b.var);
          o += env.tok(b.var);
          o += ",";
          ser(b.cont, env, o);
          o += ")";
        }
      }
      o += ")";
      return;
    }
    case Op::CmvOut: {
      o += "snd(" + env.tok(t->n1) + ",";
      ser_value(t->value, env, o);
      o += ",";
      ser(t->body, env, o);
      o += ")";
      return;
    }
    case Op::CmvIn: {
      o += "rcv(";
      o += to_string(t->qual);
      o += "," + env.tok(t->n1) + ",";
      Shadow s(env, t->n2);
      o += env.tok(t->n2);
      o += ",";
      ser(t->body, env, o);
      o += ")";
      return;
    }
    case Op::CmvSel:
      o += "sel(" + env.tok(t->n1) + "," + t->label + ",";
      ser(t->body, env, o);
      o += ")";
      return;
    case Op::CmvBranch: {
      o += "bra(" + env.tok(t->n1);
      for (auto& a : t->cmv_arms) {
        o += "," + a.label + ":";
        ser(a.cont, env, o);
      }
      o += ")";
      return;
    }
  }
}

std::string ser_with(const TermPtr& t, bool nameless,
                     const std::map<Name, std::string>* mask) {
  SerEnv env;
  env.nameless = nameless;
  env.mask = mask;
  std::string o;
  ser(t, env, o);
  return o;
}

}  // namespace

std::string term_key(const TermPtr& t, bool nameless) {
  return ser_with(t, nameless, nullptr);
}

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  return term_key(a, true) == term_key(b, true);
}

// ---------------------------------------------------------------------------
// canonicalization
// ---------------------------------------------------------------------------

namespace {

struct Binder {
  bool sess = false;
  Name a, b;
  std::optional<std::string> annot;
};

TermPtr norm(const TermPtr& t);

// Collects the restriction block and parallel components reachable from
// `root` through Par and restriction nodes, freshening binders that clash.
// Every name occurring in the term, bound or free; freshening must avoid
// them all or two hoisted binders of the same name can end up aliased.
static void every_name(const TermPtr& t, NameSet& out) {
  auto val = [&](const Value& v) {
    if (v.kind == Value::Kind::NameRef) out.insert(v.name);
  };
  switch (t->op) {
    case Op::Inact:
      return;
    case Op::Par:
    case Op::If:
      for (auto& c : t->children) every_name(c, out);
      if (t->cond) {
        auto f = free_names(t->cond);
        out.insert(f.begin(), f.end());
      }
      return;
    case Op::ResPi:
      out.insert(t->n1);
      every_name(t->body, out);
      return;
    case Op::ResSess:
      out.insert(t->n1);
      out.insert(t->n2);
      every_name(t->body, out);
      return;
    case Op::Bang:
      every_name(t->body, out);
      return;
    case Op::PiSum:
      for (auto& b : t->pi_branches) {
        if (b.prefix.kind != PiPrefix::Kind::Tau) {
          out.insert(b.prefix.channel);
          out.insert(b.prefix.arg);
        }
        every_name(b.cont, out);
      }
      return;
    case Op::MixChoice:
      out.insert(t->n1);
      for (auto& b : t->mix_branches) {
        if (b.pol == Pol::Send)
          val(b.value);
        else
          out.insert(b.var);
        every_name(b.cont, out);
      }
      return;
    case Op::CmvOut:
      out.insert(t->n1);
      val(t->value);
      every_name(t->body, out);
      return;
    case Op::CmvIn:
      out.insert(t->n1);
      out.insert(t->n2);
      every_name(t->body, out);
      return;
    case Op::CmvSel:
      out.insert(t->n1);
      every_name(t->body, out);
      return;
    case Op::CmvBranch:
      out.insert(t->n1);
      for (auto& a : t->cmv_arms) every_name(a.cont, out);
      return;
  }
}

void collect_region(const TermPtr& root, std::vector<Binder>& binders,
                    std::vector<TermPtr>& comps) {
  NameSet everything;
  every_name(root, everything);
  NameGen gen(everything);
  NameSet used = free_names(root);
  std::vector<TermPtr> stack{root};
  while (!stack.empty()) {
    TermPtr cur = stack.back();
    stack.pop_back();
    switch (cur->op) {
      case Op::Inact: break;
      case Op::Par:
        for (auto it = cur->children.rbegin(); it != cur->children.rend(); ++it)
          stack.push_back(*it);
        break;
      case Op::ResPi: {
        Name x = cur->n1;
        TermPtr body = cur->body;
        if (!used.insert(x).second) {
          Name nx = gen.fresh(x.text);
          used.insert(nx);
          body = apply_subst(body, name_subst({{x, nx}}));
          x = nx;
        }
        binders.push_back({false, x, {}, std::nullopt});
        stack.push_back(body);
        break;
      }
      case Op::ResSess: {
        Name y = cur->n1, z = cur->n2;
        TermPtr body = cur->body;
        std::map<Name, Name> ren;
        if (!used.insert(y).second) {
          Name ny = gen.fresh(y.text);
          used.insert(ny);
          ren[y] = ny;
          y = ny;
        }
        if (!used.insert(z).second) {
          Name nz = gen.fresh(z.text);
          used.insert(nz);
          ren[z] = nz;
          z = nz;
        }
        if (!ren.empty()) body = apply_subst(body, name_subst(ren));
        binders.push_back({true, y, z, cur->res_annot});
        stack.push_back(body);
        break;
      }
      default:
        comps.push_back(norm(cur));
        break;
    }
  }
}

// Region normal form: hoisted restrictions (ordered by usage signature) over
// a sorted parallel multiset.
TermPtr norm_region(const TermPtr& root) {
  std::vector<Binder> binders;
  std::vector<TermPtr> comps;
  collect_region(root, binders, comps);

  // free names of the component multiset
  NameSet cfree;
  for (auto& c : comps) {
    auto f = free_names(c);
    cfree.insert(f.begin(), f.end());
  }

  // drop unused restrictions
  std::vector<Binder> kept;
  for (auto& b : binders) {
    if (b.sess) {
      if (cfree.count(b.a) || cfree.count(b.b)) kept.push_back(b);
    } else {
      if (cfree.count(b.a)) kept.push_back(b);
    }
  }
  binders = std::move(kept);

  // rank refinement over block binder names
  std::vector<Name> bnames;
  for (auto& b : binders) {
    bnames.push_back(b.a);
    if (b.sess) bnames.push_back(b.b);
  }
  std::map<Name, int> rank;
  for (auto& n : bnames) rank[n] = 0;
  std::map<Name, std::string> sig;
  for (int round = 0; round < 4; ++round) {
    std::map<Name, std::string> mask;
    for (auto& n : bnames) mask[n] = "?" + std::to_string(rank[n]);
    // component keys and dense ranks
    std::vector<std::string> ckeys;
    for (auto& c : comps) ckeys.push_back(ser_with(c, true, &mask));
    std::vector<std::string> sorted = ckeys;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    auto crank = [&](const std::string& k) {
      return int(std::lower_bound(sorted.begin(), sorted.end(), k) - sorted.begin());
    };
    // binder signatures
    std::map<Name, std::string> nsig;
    for (auto& n : bnames) {
      auto selfmask = mask;
      selfmask[n] = "!";
      std::vector<std::string> parts;
      for (size_t i = 0; i < comps.size(); ++i) {
        if (!free_names(comps[i]).count(n)) continue;
        parts.push_back(std::to_string(crank(ckeys[i])) + "#" +
                        ser_with(comps[i], true, &selfmask));
      }
      std::sort(parts.begin(), parts.end());
      std::string s;
      for (auto& p : parts) s += p + "|";
      nsig[n] = s;
    }
    // new dense ranks by signature
    std::vector<std::string> sigs;
    for (auto& [n, s] : nsig) sigs.push_back(s);
    std::sort(sigs.begin(), sigs.end());
    sigs.erase(std::unique(sigs.begin(), sigs.end()), sigs.end());
    std::map<Name, int> nrank;
    for (auto& n : bnames)
      nrank[n] = int(std::lower_bound(sigs.begin(), sigs.end(), nsig[n]) - sigs.begin());
    bool stable = nrank == rank;
    rank = std::move(nrank);
    sig = std::move(nsig);
    if (stable) break;
  }

  // order within session pairs, then order the block; swapping an annotated
  // pair moves the annotation to the other endpoint, so it must be dualized
  for (auto& b : binders)
    if (b.sess && sig[b.b] < sig[b.a]) {
      std::swap(b.a, b.b);
      if (b.annot) b.annot = print_type(dualize(parse_type(*b.annot)));
    }
  std::stable_sort(binders.begin(), binders.end(), [&](const Binder& x, const Binder& y) {
    std::string kx = sig[x.a] + (x.sess ? "~" + sig[x.b] : "");
    std::string ky = sig[y.a] + (y.sess ? "~" + sig[y.b] : "");
    return kx < ky;
  });

  // final component order
  std::map<Name, std::string> mask;
  for (auto& n : bnames) mask[n] = "?" + std::to_string(rank[n]);
  std::stable_sort(comps.begin(), comps.end(), [&](const TermPtr& x, const TermPtr& y) {
    return ser_with(x, true, &mask) < ser_with(y, true, &mask);
  });

  TermPtr result = Term::par(comps);
  for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
    if (it->sess)
      result = Term::res_sess(it->a, it->b, result, it->annot);
    else
      result = Term::res_pi(it->a, result);
  }
  return result;
}

TermPtr norm(const TermPtr& t) {
  switch (t->op) {
    case Op::Inact: return t;
    case Op::Par:
    case Op::ResPi:
    case Op::ResSess: return norm_region(t);
    case Op::Bang: return Term::bang(norm(t->body));
    case Op::If:
      return Term::cond_if(t->cond, norm(t->children[0]), norm(t->children[1]));
    case Op::PiSum: {
      std::vector<PiBranch> bs = t->pi_branches;
      for (auto& b : bs) b.cont = norm(b.cont);
      auto bkey = [](const PiBranch& b) {
        return ser_with(Term::pi_sum({b}), true, nullptr);
      };
      std::stable_sort(bs.begin(), bs.end(), [&](const PiBranch& x, const PiBranch& y) {
        return bkey(x) < bkey(y);
      });
      bs.erase(std::unique(bs.begin(), bs.end(),
                           [&](const PiBranch& x, const PiBranch& y) {
                             return bkey(x) == bkey(y);
                           }),
               bs.end());
      return Term::pi_sum(std::move(bs));
    }
    case Op::MixChoice: {
      std::vector<MixBranch> bs = t->mix_branches;
      for (auto& b : bs) b.cont = norm(b.cont);
      auto bkey = [&](const MixBranch& b) {
        return ser_with(Term::mix_choice(t->qual, t->n1, {b}), true, nullptr);
      };
      std::stable_sort(bs.begin(), bs.end(), [&](const MixBranch& x, const MixBranch& y) {
        return bkey(x) < bkey(y);
      });
      bs.erase(std::unique(bs.begin(), bs.end(),
                           [&](const MixBranch& x, const MixBranch& y) {
                             return bkey(x) == bkey(y);
                           }),
               bs.end());
      return Term::mix_choice(t->qual, t->n1, std::move(bs));
    }
    case Op::CmvOut: return Term::cmv_out(t->n1, t->value, norm(t->body));
    case Op::CmvIn: return Term::cmv_in(t->qual, t->n1, t->n2, norm(t->body));
    case Op::CmvSel: return Term::cmv_sel(t->n1, t->label, norm(t->body));
    case Op::CmvBranch: {
      std::vector<CmvArm> as = t->cmv_arms;
      for (auto& a : as) a.cont = norm(a.cont);
      std::stable_sort(as.begin(), as.end(),
                       [](const CmvArm& x, const CmvArm& y) { return x.label < y.label; });
      return Term::cmv_branch(t->n1, std::move(as));
    }
  }
  return t;
}

// Renames every binder to b0, b1, ... in traversal order, skipping names that
// occur free in the full term.
struct Renamer {
  NameSet avoid;
  int next = 0;

  Name take() {
    for (;;) {
      Name cand{"b" + std::to_string(next++)};
      if (!avoid.count(cand)) return cand;
    }
  }

  TermPtr run(const TermPtr& t, std::map<Name, Name> env) {
    auto look = [&env](const Name& n) {
      auto it = env.find(n);
      return it == env.end() ? n : it->second;
    };
    auto lookv = [&](const Value& v) {
      if (v.kind == Value::Kind::NameRef) return Value::of(look(v.name));
      return v;
    };
    std::function<ExprPtr(const ExprPtr&)> looke = [&](const ExprPtr& e) -> ExprPtr {
      switch (e->kind) {
        case Expr::Kind::Val: return Expr::val(lookv(e->value));
        case Expr::Kind::Not: return Expr::mk_not(looke(e->lhs));
        case Expr::Kind::And: return Expr::mk_and(looke(e->lhs), looke(e->rhs));
        case Expr::Kind::Or: return Expr::mk_or(looke(e->lhs), looke(e->rhs));
      }
      return e;
    };
    switch (t->op) {
      case Op::Inact: return t;
      case Op::Par: {
        std::vector<TermPtr> cs;
        for (auto& c : t->children) cs.push_back(run(c, env));
        return Term::par(std::move(cs));
      }
      case Op::ResPi: {
        Name nx = take();
        env[t->n1] = nx;
        return Term::res_pi(nx, run(t->body, env));
      }
      case Op::ResSess: {
        Name ny = take(), nz = take();
        env[t->n1] = ny;
        env[t->n2] = nz;
        return Term::res_sess(ny, nz, run(t->body, env), t->res_annot);
      }
      case Op::Bang: return Term::bang(run(t->body, env));
      case Op::If:
        return Term::cond_if(looke(t->cond), run(t->children[0], env),
                             run(t->children[1], env));
      case Op::PiSum: {
        std::vector<PiBranch> bs;
        for (auto& b : t->pi_branches) {
          PiBranch nb = b;
          if (b.prefix.kind == PiPrefix::Kind::Out) {
            nb.prefix.channel = look(b.prefix.channel);
            nb.prefix.arg = look(b.prefix.arg);
            nb.cont = run(b.cont, env);
          } else if (b.prefix.kind == PiPrefix::Kind::In) {
            nb.prefix.channel = look(b.prefix.channel);
            auto e2 = env;
            Name nv = take();
            e2[b.prefix.arg] = nv;
            nb.prefix.arg = nv;
            nb.cont = run(b.cont, e2);
          } else {
            nb.cont = run(b.cont, env);
          }
          bs.push_back(std::move(nb));
        }
        return Term::pi_sum(std::move(bs));
      }
      case Op::MixChoice: {
        std::vector<MixBranch> bs;
        for (auto& b : t->mix_branches) {
          MixBranch nb = b;
          if (b.pol == Pol::Send) {
            nb.value = lookv(b.value);
            nb.cont = run(b.cont, env);
          } else {
            auto e2 = env;
            Name nv = take();
            e2[b.var] = nv;
            nb.var = nv;
            nb.cont = run(b.cont, e2);
          }
          bs.push_back(std::move(nb));
        }
        return Term::mix_choice(t->qual, look(t->n1), std::move(bs));
      }
      case Op::CmvOut:
        return Term::cmv_out(look(t->n1), lookv(t->value), run(t->body, env));
      case Op::CmvIn: {
        auto e2 = env;
        Name nv = take();
        e2[t->n2] = nv;
        return Term::cmv_in(t->qual, look(t->n1), nv, run(t->body, e2));
      }
      case Op::CmvSel:
        return Term::cmv_sel(look(t->n1), t->label, run(t->body, env));
      case Op::CmvBranch: {
        std::vector<CmvArm> as;
        for (auto& a : t->cmv_arms) as.push_back({a.label, run(a.cont, env)});
        return Term::cmv_branch(look(t->n1), std::move(as));
      }
    }
    return t;
  }
};

}  // namespace

// Re-sorts parallel components and choice branches using fully named keys.
// Run after binders have been renamed canonically: named keys are then stable
// and break ties the nameless ordering of norm() cannot see.
static TermPtr resort_named(const TermPtr& t) {
  switch (t->op) {
    case Op::Inact:
      return t;
    case Op::Par: {
      std::vector<TermPtr> cs;
      for (const TermPtr& c : t->children) cs.push_back(resort_named(c));
      std::stable_sort(cs.begin(), cs.end(), [](const TermPtr& a, const TermPtr& b) {
        return term_key(a, false) < term_key(b, false);
      });
      return Term::par(std::move(cs));
    }
    case Op::ResPi:
      return Term::res_pi(t->n1, resort_named(t->body));
    case Op::ResSess:
      return Term::res_sess(t->n1, t->n2, resort_named(t->body), t->res_annot);
    case Op::Bang:
      return Term::bang(resort_named(t->body));
    case Op::If:
      return Term::cond_if(t->cond, resort_named(t->children[0]),
                           resort_named(t->children[1]));
    case Op::PiSum: {
      std::vector<PiBranch> bs = t->pi_branches;
      for (auto& b : bs) b.cont = resort_named(b.cont);
      auto bkey = [](const PiBranch& b) {
        return term_key(Term::pi_sum({b}), false);
      };
      std::stable_sort(bs.begin(), bs.end(),
                       [&](const PiBranch& x, const PiBranch& y) {
                         return bkey(x) < bkey(y);
                       });
      return Term::pi_sum(std::move(bs));
    }
    case Op::MixChoice: {
      std::vector<MixBranch> bs = t->mix_branches;
      for (auto& b : bs) b.cont = resort_named(b.cont);
      auto bkey = [&](const MixBranch& b) {
        return term_key(Term::mix_choice(t->qual, t->n1, {b}), false);
      };
      std::stable_sort(bs.begin(), bs.end(),
                       [&](const MixBranch& x, const MixBranch& y) {
                         return bkey(x) < bkey(y);
                       });
      return Term::mix_choice(t->qual, t->n1, std::move(bs));
    }
    case Op::CmvOut:
      return Term::cmv_out(t->n1, t->value, resort_named(t->body));
    case Op::CmvIn:
      return Term::cmv_in(t->qual, t->n1, t->n2, resort_named(t->body));
    case Op::CmvSel:
      return Term::cmv_sel(t->n1, t->label, resort_named(t->body));
    case Op::CmvBranch: {
      std::vector<CmvArm> as = t->cmv_arms;
      for (auto& a : as) a.cont = resort_named(a.cont);
      return Term::cmv_branch(t->n1, std::move(as));
    }
  }
  return t;
}

TermPtr canonicalize(const TermPtr& t) {
  // norm() orders everything it can decide namelessly; renaming then pins the
  // binders, and re-sorting with the pinned names resolves the remaining
  // order.  Renaming and sorting feed each other, so iterate to a fixpoint.
  TermPtr cur = norm(t);
  NameSet avoid = free_names(cur);
  std::string best_key;
  TermPtr best;
  std::string prev;
  for (int i = 0; i < 10; ++i) {
    Renamer r;
    r.avoid = avoid;
    TermPtr sorted = resort_named(r.run(cur, {}));
    std::string key = term_key(sorted, false);
    if (key == prev) return sorted;
    if (best_key.empty() || key < best_key) {
      best_key = key;
      best = sorted;
    }
    prev = key;
    cur = sorted;
  }
  // no fixpoint within the bound: fall back to the smallest representative
  return best;
}

std::string canonical_key(const TermPtr& t) {
  return term_key(canonicalize(t), false);
}

TermPtr struct_norm(const TermPtr& t) { return norm(t); }

// ---------------------------------------------------------------------------
// subterms
// ---------------------------------------------------------------------------

namespace {

void collect_subterms(const TermPtr& t, const std::string& path, bool guarded,
                      std::vector<Subterm>& out) {
  out.push_back({path, t, guarded});
  auto step = [&path](const std::string& s) {
    return path.empty() ? s : path + "/" + s;
  };
  switch (t->op) {
    case Op::Inact: return;
    case Op::Par:
      for (size_t i = 0; i < t->children.size(); ++i)
        collect_subterms(t->children[i], step("p" + std::to_string(i)), guarded, out);
      return;
    case Op::ResPi:
    case Op::ResSess:
      collect_subterms(t->body, step("b"), guarded, out);
      return;
    case Op::Bang: collect_subterms(t->body, step("b"), guarded, out); return;
    case Op::If:
      collect_subterms(t->children[0], step("t"), true, out);
      collect_subterms(t->children[1], step("e"), true, out);
      return;
    case Op::PiSum:
      for (size_t i = 0; i < t->pi_branches.size(); ++i)
        collect_subterms(t->pi_branches[i].cont, step("s" + std::to_string(i)), true, out);
      return;
    case Op::MixChoice:
      for (size_t i = 0; i < t->mix_branches.size(); ++i)
        collect_subterms(t->mix_branches[i].cont, step("m" + std::to_string(i)), true, out);
      return;
    case Op::CmvOut:
    case Op::CmvIn:
    case Op::CmvSel:
      collect_subterms(t->body, step("b"), true, out);
      return;
    case Op::CmvBranch:
      for (size_t i = 0; i < t->cmv_arms.size(); ++i)
        collect_subterms(t->cmv_arms[i].cont, step("a" + std::to_string(i)), true, out);
      return;
  }
}

}  // namespace

std::vector<Subterm> subterms(const TermPtr& t) {
  std::vector<Subterm> out;
  collect_subterms(t, "", false, out);
  return out;
}

namespace {

struct Uniquifier {
  NameGen gen;
  NameSet seen;
  std::map<Name, Name> env;

  Name use(const Name& n) const {
    auto it = env.find(n);
    return it == env.end() ? n : it->second;
  }
  Value use(const Value& v) const {
    if (v.kind == Value::Kind::NameRef) return Value::of(use(v.name));
    return v;
  }
  ExprPtr use(const ExprPtr& e) const {
    switch (e->kind) {
      case Expr::Kind::Val: return Expr::val(use(e->value));
      case Expr::Kind::Not: return Expr::mk_not(use(e->lhs));
      case Expr::Kind::And: return Expr::mk_and(use(e->lhs), use(e->rhs));
      case Expr::Kind::Or: return Expr::mk_or(use(e->lhs), use(e->rhs));
    }
    return e;
  }

  Name bind(const Name& n) {
    if (!seen.insert(n).second) {
      Name fresh = gen.fresh(n.text + "_");
      seen.insert(fresh);
      env[n] = fresh;
      return fresh;
    }
    gen.reserve(n);
    env.erase(n);
    return n;
  }

  TermPtr walk(const TermPtr& t) {
    switch (t->op) {
      case Op::Inact:
        return t;
      case Op::Par: {
        std::vector<TermPtr> cs;
        for (const TermPtr& c : t->children) cs.push_back(walk(c));
        return Term::par(std::move(cs));
      }
      case Op::ResPi: {
        auto saved = env;
        Name x = bind(t->n1);
        TermPtr body = walk(t->body);
        env = saved;
        return Term::res_pi(x, body);
      }
      case Op::ResSess: {
        auto saved = env;
        Name a = bind(t->n1);
        Name b = bind(t->n2);
        TermPtr body = walk(t->body);
        env = saved;
        return Term::res_sess(a, b, body, t->res_annot);
      }
      case Op::Bang:
        return Term::bang(walk(t->body));
      case Op::If:
        return Term::cond_if(use(t->cond), walk(t->children[0]), walk(t->children[1]));
      case Op::PiSum: {
        std::vector<PiBranch> bs;
        for (const PiBranch& b : t->pi_branches) {
          PiBranch nb;
          nb.prefix.kind = b.prefix.kind;
          nb.prefix.channel = use(b.prefix.channel);
          if (b.prefix.kind == PiPrefix::Kind::Out) {
            nb.prefix.arg = use(b.prefix.arg);
            nb.cont = walk(b.cont);
          } else if (b.prefix.kind == PiPrefix::Kind::In) {
            auto saved = env;
            nb.prefix.arg = bind(b.prefix.arg);
            nb.cont = walk(b.cont);
            env = saved;
          } else {
            nb.cont = walk(b.cont);
          }
          bs.push_back(std::move(nb));
        }
        return Term::pi_sum(std::move(bs));
      }
      case Op::MixChoice: {
        std::vector<MixBranch> bs;
        for (const MixBranch& b : t->mix_branches) {
          MixBranch nb;
          nb.label = b.label;
          nb.pol = b.pol;
          if (b.pol == Pol::Send) {
            nb.value = use(b.value);
            nb.cont = walk(b.cont);
          } else {
            auto saved = env;
            nb.var = bind(b.var);
            nb.cont = walk(b.cont);
            env = saved;
          }
          bs.push_back(std::move(nb));
        }
        return Term::mix_choice(t->qual, use(t->n1), std::move(bs));
      }
      case Op::CmvOut:
        return Term::cmv_out(use(t->n1), use(t->value), walk(t->body));
      case Op::CmvIn: {
        Name subj = use(t->n1);
        auto saved = env;
        Name var = bind(t->n2);
        TermPtr body = walk(t->body);
        env = saved;
        return Term::cmv_in(t->qual, subj, var, body);
      }
      case Op::CmvSel:
        return Term::cmv_sel(use(t->n1), t->label, walk(t->body));
      case Op::CmvBranch: {
        std::vector<CmvArm> arms;
        for (const CmvArm& a : t->cmv_arms)
          arms.push_back(CmvArm{a.label, walk(a.cont)});
        return Term::cmv_branch(use(t->n1), std::move(arms));
      }
    }
    return t;
  }
};

}  // namespace

TermPtr uniquify_binders(const TermPtr& t, const NameSet& avoid) {
  Uniquifier u;
  u.gen.reserve(avoid);
  u.gen.reserve(free_names(t));
  u.seen = avoid;
  for (const Name& n : free_names(t)) u.seen.insert(n);
  return u.walk(t);
}

}  // namespace wb
