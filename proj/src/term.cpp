#include "wb/term.hpp"

namespace wb {

std::string to_string(Calculus c) {
  switch (c) {
    case Calculus::Pi: return "pi";
    case Calculus::CmvPlus: return "cmv+";
    case Calculus::Cmv: return "cmv";
  }
  return "?";
}

std::optional<Calculus> calculus_from_string(const std::string& s) {
  if (s == "pi") return Calculus::Pi;
  if (s == "cmv+") return Calculus::CmvPlus;
  if (s == "cmv") return Calculus::Cmv;
  return std::nullopt;
}

ExprPtr Expr::val(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Val;
  e->value = std::move(v);
  return e;
}
ExprPtr Expr::mk_not(ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Not;
  e->lhs = std::move(x);
  return e;
}
ExprPtr Expr::mk_and(ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::And;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}
ExprPtr Expr::mk_or(ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Or;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

static std::shared_ptr<Term> node(Op op) {
  auto t = std::make_shared<Term>();
  t->op = op;
  return t;
}

TermPtr Term::inact() {
  static TermPtr zero = node(Op::Inact);
  return zero;
}

TermPtr Term::par(std::vector<TermPtr> comps) {
  if (comps.empty()) return inact();
  if (comps.size() == 1) return comps[0];
  auto t = node(Op::Par);
  t->children = std::move(comps);
  return t;
}

TermPtr Term::res_pi(Name x, TermPtr p) {
  auto t = node(Op::ResPi);
  t->n1 = std::move(x);
  t->body = std::move(p);
  return t;
}

TermPtr Term::res_sess(Name y, Name z, TermPtr p, std::optional<std::string> annot) {
  auto t = node(Op::ResSess);
  t->n1 = std::move(y);
  t->n2 = std::move(z);
  t->body = std::move(p);
  t->res_annot = std::move(annot);
  return t;
}

TermPtr Term::bang(TermPtr p) {
  auto t = node(Op::Bang);
  t->body = std::move(p);
  return t;
}

TermPtr Term::cond_if(ExprPtr e, TermPtr thn, TermPtr els) {
  auto t = node(Op::If);
  t->cond = std::move(e);
  t->children = {std::move(thn), std::move(els)};
  return t;
}

TermPtr Term::pi_sum(std::vector<PiBranch> branches) {
  if (branches.empty()) return inact();
  auto t = node(Op::PiSum);
  t->pi_branches = std::move(branches);
  return t;
}

TermPtr Term::mix_choice(Qual q, Name subj, std::vector<MixBranch> branches) {
  if (branches.empty()) return inact();
  auto t = node(Op::MixChoice);
  t->qual = q;
  t->n1 = std::move(subj);
  t->mix_branches = std::move(branches);
  return t;
}

TermPtr Term::cmv_out(Name subj, Value v, TermPtr cont) {
  auto t = node(Op::CmvOut);
  t->n1 = std::move(subj);
  t->value = std::move(v);
  t->body = std::move(cont);
  return t;
}

TermPtr Term::cmv_in(Qual q, Name subj, Name var, TermPtr cont) {
  auto t = node(Op::CmvIn);
  t->qual = q;
  t->n1 = std::move(subj);
  t->n2 = std::move(var);
  t->body = std::move(cont);
  return t;
}

TermPtr Term::cmv_sel(Name subj, Label l, TermPtr cont) {
  auto t = node(Op::CmvSel);
  t->n1 = std::move(subj);
  t->label = std::move(l);
  t->body = std::move(cont);
  return t;
}

TermPtr Term::cmv_branch(Name subj, std::vector<CmvArm> arms) {
  auto t = node(Op::CmvBranch);
  t->n1 = std::move(subj);
  t->cmv_arms = std::move(arms);
  return t;
}

}  // namespace wb
