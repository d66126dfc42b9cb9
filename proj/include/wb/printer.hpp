#ifndef WB_PRINTER_HPP
#define WB_PRINTER_HPP

#include <string>

#include "wb/term.hpp"
#include "wb/types.hpp"

namespace wb {

// Surface-syntax printers.  print_term round-trips through the parser for the
// given calculus.
std::string print_term(const TermPtr& t, Calculus c);
std::string print_expr(const ExprPtr& e);
std::string print_value(const Value& v);

}  // namespace wb

#endif
