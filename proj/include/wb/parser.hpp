#ifndef WB_PARSER_HPP
#define WB_PARSER_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "wb/term.hpp"
#include "wb/types.hpp"

namespace wb {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ")"),
        line(line),
        col(col) {}
  int line, col;
};

TermPtr parse_term(const std::string& src, Calculus c);
ExprPtr parse_expr(const std::string& src);
TypePtr parse_type(const std::string& src);

// A .picl source file: a calculus directive, optional typed free names, and
// named process definitions.
struct SourceFile {
  Calculus calculus = Calculus::Pi;
  TypeCtx free_types;
  std::vector<std::pair<std::string, TermPtr>> defs;

  TermPtr find(const std::string& name) const;
  TermPtr main() const;  // last definition
};

SourceFile parse_picl(const std::string& text);

}  // namespace wb

#endif
