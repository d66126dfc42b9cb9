#include "wb/printer.hpp"

#include "wb/syntax.hpp"

namespace wb {

std::string print_value(const Value& v) {
  switch (v.kind) {
    case Value::Kind::NameRef: return v.name.text;
    case Value::Kind::True: return "true";
    case Value::Kind::False: return "false";
    case Value::Kind::Unit: return "()";
  }
  return "?";
}

// precedence: 0 = or, 1 = and, 2 = not / atom
static std::string pexpr(const ExprPtr& e, int prec) {
  std::string s;
  int mine = 2;
  switch (e->kind) {
    case Expr::Kind::Val:
      return print_value(e->value);
    case Expr::Kind::Not:
      s = "not " + pexpr(e->lhs, 2);
      mine = 2;
      break;
    case Expr::Kind::And:
      s = pexpr(e->lhs, 1) + " and " + pexpr(e->rhs, 2);
      mine = 1;
      break;
    case Expr::Kind::Or:
      s = pexpr(e->lhs, 0) + " or " + pexpr(e->rhs, 1);
      mine = 0;
      break;
  }
  if (mine < prec) return "(" + s + ")";
  return s;
}

std::string print_expr(const ExprPtr& e) { return pexpr(e, 0); }

namespace {

struct Printer {
  Calculus c;

  std::string par(const TermPtr& t) {
    if (t->op != Op::Par) return sum_or_below(t);
    std::string out;
    for (size_t i = 0; i < t->children.size(); ++i) {
      if (i) out += " | ";
      out += component(t->children[i]);
    }
    return out;
  }

  std::string component(const TermPtr& t) {
    switch (t->op) {
      case Op::ResPi:
      case Op::ResSess:
      case Op::If:
        return "(" + par(t) + ")";
      default:
        return sum_or_below(t);
    }
  }

  std::string sum_or_below(const TermPtr& t) {
    if (t->op == Op::PiSum && t->pi_branches.size() > 1) {
      std::string out;
      for (size_t i = 0; i < t->pi_branches.size(); ++i) {
        if (i) out += " + ";
        out += pi_branch(t->pi_branches[i]);
      }
      return out;
    }
    return prefixed(t);
  }

  std::string prefixed(const TermPtr& t) {
    switch (t->op) {
      case Op::Inact:
        return "0";
      case Op::Par:
        return "(" + par(t) + ")";
      case Op::ResPi:
        return "(nu " + t->n1.text + ") " + par(t->body);
      case Op::ResSess: {
        std::string head = "(new " + t->n1.text + " " + t->n2.text;
        if (t->res_annot) head += " : " + *t->res_annot;
        return head + ") " + par(t->body);
      }
      case Op::Bang:
        if (t->body->op == Op::Inact) return "!0";
        return "!(" + par(t->body) + ")";
      case Op::If:
        return "if " + print_expr(t->cond) + " then " + par(t->children[0]) +
               " else " + par(t->children[1]);
      case Op::PiSum:
        if (t->pi_branches.size() == 1) return pi_branch(t->pi_branches[0]);
        return "(" + sum_or_below(t) + ")";
      case Op::MixChoice: {
        std::string out = std::string(to_string(t->qual)) + " " + t->n1.text + " (";
        for (size_t i = 0; i < t->mix_branches.size(); ++i) {
          if (i) out += " + ";
          out += mix_branch(t->mix_branches[i]);
        }
        return out + ")";
      }
      case Op::CmvOut:
        return t->n1.text + "!" + print_value(t->value) + cont(t->body);
      case Op::CmvIn:
        return std::string(to_string(t->qual)) + " " + t->n1.text + "?" +
               t->n2.text + cont(t->body);
      case Op::CmvSel:
        return t->n1.text + "<+" + t->label + cont(t->body);
      case Op::CmvBranch: {
        std::string out = t->n1.text + ">>{";
        for (size_t i = 0; i < t->cmv_arms.size(); ++i) {
          if (i) out += ", ";
          out += t->cmv_arms[i].label + ": " + par(t->cmv_arms[i].cont);
        }
        return out + "}";
      }
    }
    return "?";
  }

  std::string cont(const TermPtr& t) {
    if (t->op == Op::Inact) return "";
    switch (t->op) {
      case Op::Par:
      case Op::If:
      case Op::ResPi:
      case Op::ResSess:
        return ".(" + par(t) + ")";
      case Op::PiSum:
        if (t->pi_branches.size() > 1) return ".(" + sum_or_below(t) + ")";
        return "." + prefixed(t);
      default:
        return "." + prefixed(t);
    }
  }

  std::string pi_branch(const PiBranch& b) {
    std::string out;
    switch (b.prefix.kind) {
      case PiPrefix::Kind::Out:
        out = b.prefix.channel.text;
        out += b.prefix.arg == b.prefix.channel ? "!" : "!<" + b.prefix.arg.text + ">";
        break;
      case PiPrefix::Kind::In:
        out = b.prefix.channel.text;
        out += b.prefix.arg.text == "_" ? "?" : "?(" + b.prefix.arg.text + ")";
        break;
      case PiPrefix::Kind::Tau:
        out = "tau";
        break;
    }
    return out + cont(b.cont);
  }

  std::string mix_branch(const MixBranch& b) {
    std::string out = b.label;
    if (b.pol == Pol::Send)
      out += "!" + print_value(b.value);
    else
      out += "?(" + b.var.text + ")";
    return out + cont(b.cont);
  }
};

}  // namespace

std::string print_term(const TermPtr& t, Calculus c) {
  Printer p{c};
  return p.par(t);
}

}  // namespace wb
