#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "wb/encode.hpp"
#include "wb/engine.hpp"
#include "wb/equiv.hpp"
#include "wb/harness.hpp"
#include "wb/parser.hpp"
#include "wb/patterns.hpp"
#include "wb/printer.hpp"
#include "wb/syntax.hpp"
#include "wb/typecheck.hpp"

using namespace wb;

namespace {

constexpr int kOk = 0;
constexpr int kViolated = 1;
constexpr int kInputError = 2;
constexpr int kUnknown = 3;

struct Options {
  std::string calculus = "cmv+";
  int depth = 12;
  int max_states = 20000;
  unsigned seed = 0;
  std::string out;
};

Calculus parse_calculus(const std::string& s) {
  if (s == "pi") return Calculus::Pi;
  if (s == "cmv+") return Calculus::CmvPlus;
  if (s == "cmv") return Calculus::Cmv;
  throw std::runtime_error("unknown calculus '" + s + "'");
}

struct Input {
  Calculus calc = Calculus::CmvPlus;
  TypeCtx ctx;
  TermPtr term;
};

bool is_picl_path(const std::string& s) {
  return s.size() > 5 && s.substr(s.size() - 5) == ".picl";
}

Input load_input(const std::string& src, const Options& opt) {
  Input in;
  if (is_picl_path(src)) {
    std::ifstream f(src);
    if (!f) throw std::runtime_error("cannot open '" + src + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    SourceFile sf = parse_picl(ss.str());
    in.calc = sf.calculus;
    in.ctx = sf.free_types;
    in.term = sf.main();
  } else {
    in.calc = parse_calculus(opt.calculus);
    in.term = parse_term(src, in.calc);
  }
  return in;
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(opt.out);
  if (!f) throw std::runtime_error("cannot write '" + opt.out + "'");
  f << text << "\n";
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Related: return kOk;
    case Verdict::NotRelated: return kViolated;
    case Verdict::UnknownBounded: return kUnknown;
  }
  return kUnknown;
}

std::string step_json(const Step& s, Calculus c) {
  return "{\"label\":" + quote_json(s.label.text()) +
         ",\"target\":" + quote_json(print_term(s.target, c)) + "}";
}

int run_parse(const Input& in, const Options& opt) {
  emit(opt, print_term(in.term, in.calc));
  return kOk;
}

int run_typecheck(const Input& in, const Options& opt) {
  TypecheckResult r = typecheck(in.calc, in.ctx, in.term);
  if (!r.ok) {
    emit(opt, "{\"ok\":false,\"error\":" + quote_json(r.error) + "}");
    return kViolated;
  }
  emit(opt, deriv_json(r.deriv, in.calc));
  return kOk;
}

int run_step(const Input& in, const Options& opt) {
  std::string out = "[";
  bool first = true;
  for (const Step& s : enumerate_steps(in.term, in.calc)) {
    if (!first) out += ",";
    first = false;
    out += step_json(s, in.calc);
  }
  emit(opt, out + "]");
  return kOk;
}

int run_explore(const Input& in, const Options& opt, bool dot) {
  Lts l = explore(in.term, in.calc, opt.depth, opt.max_states);
  emit(opt, dot ? lts_dot(l) : lts_json(l));
  return l.complete ? kOk : kUnknown;
}

int run_encode(const Input& in, const Options& opt) {
  if (in.calc != Calculus::CmvPlus)
    throw std::runtime_error("encode expects a cmv+ source");
  TypecheckResult r = typecheck(in.calc, in.ctx, in.term);
  if (!r.ok) {
    emit(opt, "{\"ok\":false,\"error\":" + quote_json(r.error) + "}");
    return kViolated;
  }
  EncodeResult enc = encode(r.deriv);
  emit(opt, "{\"term\":" + quote_json(print_term(enc.term, Calculus::Cmv)) +
                ",\"prov\":" + prov_json(enc.prov) + "}");
  return kOk;
}

int run_equiv(const Input& a, const Input& b, const Options& opt,
              bool coupled) {
  if (a.calc != b.calc) throw std::runtime_error("calculi differ");
  Lts la = explore(a.term, a.calc, opt.depth, opt.max_states);
  Lts lb = explore(b.term, b.calc, opt.depth, opt.max_states);
  RelationResult r = coupled ? coupled_sim(la, lb) : weak_bisim(la, lb);
  std::string out = "{\"verdict\":" + quote_json(verdict_text(r.verdict)) +
                    ",\"relation_size\":" + std::to_string(r.relation.size());
  if (!r.witness.empty()) out += ",\"witness\":" + r.witness;
  emit(opt, out + "}");
  return verdict_exit(r.verdict);
}

int run_pattern(const Input& in, const Options& opt, const std::string& mode) {
  if (mode == "m") {
    auto w = detect_m(in.term, in.calc);
    if (!w) {
      emit(opt, "{\"found\":false}");
      return kViolated;
    }
    emit(opt, "{\"found\":true,\"a\":" + step_json(w->a, in.calc) +
                  ",\"b\":" + step_json(w->b, in.calc) +
                  ",\"c\":" + step_json(w->c, in.calc) + "}");
    return kOk;
  }
  if (mode == "star") {
    auto w = detect_star(in.term, in.calc);
    if (!w) {
      emit(opt, "{\"found\":false}");
      return kViolated;
    }
    std::string out = "{\"found\":true,\"steps\":[";
    for (size_t i = 0; i < w->steps.size(); i++) {
      if (i) out += ",";
      out += step_json(w->steps[i], in.calc);
    }
    emit(opt, out + "]}");
    return kOk;
  }
  throw std::runtime_error("pattern mode must be m or star");
}

int run_confluence(const Input* in, const Options& opt, int random_n) {
  size_t checked = 0, closed = 0, skipped = 0;
  std::string first_failure;
  auto check_term = [&](const TermPtr& t, Calculus c) {
    auto steps = enumerate_steps(t, c);
    for (size_t i = 0; i < steps.size(); i++)
      for (size_t j = i + 1; j < steps.size(); j++) {
        ConfluenceResult r = confluence_check(t, steps[i], steps[j], c);
        if (!r.precondition_ok) {
          skipped++;
          continue;
        }
        checked++;
        if (r.closes)
          closed++;
        else if (first_failure.empty())
          first_failure = print_term(t, c);
      }
  };
  if (random_n > 0) {
    std::mt19937 rng(opt.seed);
    for (int i = 0; i < random_n; i++)
      check_term(random_confluence_instance(rng), Calculus::CmvPlus);
  } else {
    check_term(in->term, in->calc);
  }
  std::string out = "{\"checked\":" + std::to_string(checked) +
                    ",\"closed\":" + std::to_string(closed) +
                    ",\"skipped\":" + std::to_string(skipped);
  if (!first_failure.empty())
    out += ",\"witness\":" + quote_json(first_failure);
  emit(opt, out + "}");
  return closed == checked ? kOk : kViolated;
}

int run_election(const Input& in, const Options& opt) {
  ElectionReport r = electoral_check(in.term, in.calc,
                                     std::max(opt.depth, 32), opt.max_states);
  std::string out = std::string("{\"supported\":") +
                    (r.supported ? "true" : "false") +
                    ",\"electoral\":" + (r.electoral ? "true" : "false") +
                    ",\"executions\":" + std::to_string(r.executions) +
                    ",\"leaders\":[";
  for (size_t i = 0; i < r.leaders.size(); i++) {
    if (i) out += ",";
    out += quote_json(r.leaders[i]);
  }
  out += "]";
  if (!r.note.empty()) out += ",\"note\":" + quote_json(r.note);
  emit(opt, out + "}");
  if (!r.supported) return kUnknown;
  return r.electoral ? kOk : kViolated;
}

int run_oc_check(const Input& in, const Options& opt) {
  if (in.calc != Calculus::CmvPlus)
    throw std::runtime_error("oc-check expects a cmv+ source");
  Bounds b{opt.depth, opt.max_states};
  OcReport rep = oc_check(in.term, in.ctx, b);
  emit(opt, oc_report_json(rep));
  return verdict_exit(rep.verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed-choice session calculus workbench"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--calculus", opt.calculus, "pi, cmv+ or cmv")
      ->check(CLI::IsMember({"pi", "cmv+", "cmv"}));
  app.add_option("--depth", opt.depth, "exploration depth bound");
  app.add_option("--max-states", opt.max_states, "exploration state bound");
  app.add_option("--seed", opt.seed, "rng seed");
  app.add_option("--out", opt.out, "write output to this file");

  std::string input, input2, mode, fmt = "json";
  int random_n = 0;

  auto with_input = [&](CLI::App* c) {
    c->fallthrough();
    c->add_option("input", input, "term or .picl file")->required();
    return c;
  };

  with_input(app.add_subcommand("parse", "parse and reprint"));
  with_input(app.add_subcommand("typecheck", "typecheck, emit the derivation"));
  with_input(app.add_subcommand("step", "enumerate one-step reductions"));
  with_input(app.add_subcommand("explore", "explore the state space"));
  with_input(app.add_subcommand("encode", "translate cmv+ into cmv"));
  auto* bisim = with_input(app.add_subcommand("bisim", "weak bisimulation"));
  bisim->add_option("input2", input2, "second term or .picl file")->required();
  auto* coup = with_input(app.add_subcommand("coupledsim", "coupled simulation"));
  coup->add_option("input2", input2, "second term or .picl file")->required();
  auto* pat = with_input(app.add_subcommand("pattern", "detect m or star"));
  pat->add_option("mode", mode, "m or star")
      ->required()
      ->check(CLI::IsMember({"m", "star"}));
  auto* conf = app.add_subcommand("confluence", "diamond closure check");
  conf->fallthrough();
  conf->add_option("input", input, "term or .picl file");
  conf->add_option("--random", random_n, "check this many random instances");
  with_input(app.add_subcommand("election", "electoral system check"));
  with_input(app.add_subcommand("oc-check", "operational correspondence"));
  auto* exp = with_input(app.add_subcommand("export", "emit the explored lts"));
  exp->add_flag_callback("--dot", [&] { fmt = "dot"; }, "graphviz output");
  exp->add_flag_callback("--json", [&] { fmt = "json"; }, "json output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "confluence" && random_n > 0)
      return run_confluence(nullptr, opt, random_n);
    if (cmd == "confluence" && input.empty())
      throw std::runtime_error("confluence needs an input or --random");

    Input in = load_input(input, opt);
    if (cmd == "parse") return run_parse(in, opt);
    if (cmd == "typecheck") return run_typecheck(in, opt);
    if (cmd == "step") return run_step(in, opt);
    if (cmd == "explore") return run_explore(in, opt, false);
    if (cmd == "encode") return run_encode(in, opt);
    if (cmd == "bisim" || cmd == "coupledsim")
      return run_equiv(in, load_input(input2, opt), opt, cmd == "coupledsim");
    if (cmd == "pattern") return run_pattern(in, opt, mode);
    if (cmd == "confluence") return run_confluence(&in, opt, 0);
    if (cmd == "election") return run_election(in, opt);
    if (cmd == "oc-check") return run_oc_check(in, opt);
    if (cmd == "export") return run_explore(in, opt, fmt == "dot");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
